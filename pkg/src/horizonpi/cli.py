"""Command-line front end: simulate, predict, evaluate, nagaev.

File conventions: CSV is comma-separated with a header row, '.' decimals,
UTF-8, no thousands separators; floats are written with 17 significant
digits in both CSV and JSON so that rerunning a command with the same
config and seed reproduces outputs byte-for-byte at any --jobs value.
Every command writes a RunManifest next to its outputs. Exit codes:
0 success, 2 config error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import math
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .dgp import BetaSpec, DgpSpec, draw_beta, exp_weights, simulate_errors
from .errors import ColumnMismatch, ConfigInvalid, HorizonPiError, NumericError
from .harness import (
    CovariateSpec,
    ExperimentConfig,
    build_covariates,
    get_preset,
    run_coverage_experiment,
)
from .intervals import BootstrapConfig, default_block_len, pi_regression
from .linmodel import DesignMatrix, cv_lasso, default_lambda_grid, fit_lad, fit_lasso, fit_ols
from .nagaev import (
    LinearProcessSpec,
    NagaevConstants,
    effective_coefficients,
    innovation_norms,
    mc_tail_estimate,
    nagaev_bound_terms,
)

SEED_ENV_VAR = "HORIZONPI_SEED"


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _json_dumps(obj) -> str:
    """Canonical JSON with sorted keys and 17-significant-digit floats."""
    if isinstance(obj, dict):
        items = ",".join(f'"{k}":{_json_dumps(obj[k])}' for k in sorted(obj))
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_json_dumps(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{out}"'
    raise TypeError(f"cannot serialize {type(obj)!r}")


def config_digest(resolved: dict) -> str:
    return hashlib.sha256(_json_dumps(resolved).encode("utf-8")).hexdigest()


@dataclass
class RunManifest:
    """Provenance record written alongside every command's outputs."""

    command: str
    config_digest: str
    rng_seed: int
    tool_version: str
    started: str
    finished: str

    def write(self, path: Path):
        payload = dataclasses.asdict(self)
        path.write_text(_json_dumps(payload) + "\n", encoding="utf-8")


class _ManifestTimer:
    def __init__(self, command: str, resolved_config: dict, rng_seed: int):
        self.command = command
        self.digest = config_digest(resolved_config)
        self.rng_seed = rng_seed
        self.started = datetime.now(timezone.utc).isoformat()

    def finish(self, out_dir: Path, name: str = "manifest.json") -> RunManifest:
        manifest = RunManifest(
            command=self.command,
            config_digest=self.digest,
            rng_seed=self.rng_seed,
            tool_version=__version__,
            started=self.started,
            finished=datetime.now(timezone.utc).isoformat(),
        )
        manifest.write(out_dir / name)
        return manifest


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigInvalid(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigInvalid(f"config {path} must be a mapping at top level")
    return cfg


def _field(cfg: dict, key: str, kind, default=None, required=False, where="config"):
    if key not in cfg or cfg[key] is None:
        if required:
            raise ConfigInvalid(f"{where}: missing required field '{key}'")
        return default
    val = cfg[key]
    if kind is float and isinstance(val, int):
        val = float(val)
    if kind is not None and not isinstance(val, kind):
        raise ConfigInvalid(
            f"{where}: field '{key}' should be {getattr(kind, '__name__', kind)}, got {type(val).__name__}"
        )
    return val


def _check_unknown(cfg: dict, allowed, where="config"):
    for key in cfg:
        if key not in allowed:
            raise ConfigInvalid(f"{where}: unknown field '{key}'")


def _resolve_seed(config_seed, cli_seed):
    """Precedence: HORIZONPI_SEED env var, then --seed, then config."""
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigInvalid(f"{SEED_ENV_VAR} must be an integer") from exc
    if cli_seed is not None:
        return int(cli_seed)
    return int(config_seed)


def _parse_dgp(cfg: dict, n: int, where="config.dgp") -> DgpSpec:
    _check_unknown(
        cfg,
        {"kind", "phi1", "phi2", "gamma", "delta", "threshold", "sigma",
         "alpha_star", "burn_in", "truncation_J"},
        where,
    )
    try:
        return DgpSpec(
            kind=_field(cfg, "kind", str, required=True, where=where),
            n=n,
            phi1=_field(cfg, "phi1", float, 0.6, where=where),
            phi2=_field(cfg, "phi2", float, -0.3, where=where),
            gamma=_field(cfg, "gamma", float, -0.8, where=where),
            delta=_field(cfg, "delta", float, 0.05, where=where),
            threshold=_field(cfg, "threshold", float, 0.0, where=where),
            sigma=_field(cfg, "sigma", float, 54.1, where=where),
            alpha_star=_field(cfg, "alpha_star", float, 1.5, where=where),
            burn_in=_field(cfg, "burn_in", int, 1000, where=where),
            truncation_J=_field(cfg, "truncation_J", int, 10000, where=where),
        )
    except (ValueError, HorizonPiError) as exc:
        if isinstance(exc, ConfigInvalid):
            raise
        raise ConfigInvalid(f"{where}: {exc}") from exc


def _parse_covariates(cfg: dict | None, where="config.covariates"):
    if cfg is None:
        return "none", None
    _check_unknown(
        cfg,
        {"layout", "n_freqs", "base_period", "weekend_dummies", "q_stoch", "ar_coef"},
        where,
    )
    layout = _field(cfg, "layout", str, "none", where=where)
    if layout not in ("none", "lowdim", "highdim", "custom"):
        raise ConfigInvalid(f"{where}: unknown layout {layout!r}")
    if layout != "custom":
        extras = set(cfg) - {"layout"}
        if extras:
            raise ConfigInvalid(
                f"{where}: fields {sorted(extras)} only apply to layout 'custom'"
            )
    custom = None
    if layout == "custom":
        custom = CovariateSpec(
            n_freqs=_field(cfg, "n_freqs", int, 4, where=where),
            base_period=_field(cfg, "base_period", int, 168, where=where),
            weekend_dummies=bool(_field(cfg, "weekend_dummies", bool, False, where=where)),
            q_stoch=_field(cfg, "q_stoch", int, 4, where=where),
            ar_coef=_field(cfg, "ar_coef", float, 0.9, where=where),
        )
    return layout, custom


def _parse_beta(cfg: dict | None, p: int, where="config.beta") -> BetaSpec:
    if cfg is None:
        if p == 0:
            return BetaSpec(p=0, sparsity_pct=100.0, dist="uniform", rng_seed=0)
        raise ConfigInvalid(f"{where}: required when covariates are present")
    _check_unknown(cfg, {"sparsity_pct", "dist", "rng_seed", "p"}, where)
    given_p = _field(cfg, "p", int, p, where=where)
    if given_p != p:
        raise ConfigInvalid(f"{where}: p={given_p} does not match covariate count {p}")
    try:
        return BetaSpec(
            p=p,
            sparsity_pct=_field(cfg, "sparsity_pct", float, 100.0, where=where),
            dist=_field(cfg, "dist", str, "uniform", where=where),
            rng_seed=_field(cfg, "rng_seed", int, 0, where=where),
        )
    except ValueError as exc:
        raise ConfigInvalid(f"{where}: {exc}") from exc


def write_csv(path: Path, names: list[str], values: np.ndarray):
    values = np.atleast_2d(values)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for row in values:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path: str, ignore: tuple = ("timestamp",)):
    """Numeric CSV with a header row; columns named in ``ignore`` (the
    optional ISO-8601 timestamp column) are dropped."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header:
                raise ConfigInvalid(f"{path}: empty CSV")
            names = header.split(",")
            keep = [j for j, name in enumerate(names) if name not in ignore]
            data = np.loadtxt(
                fh, delimiter=",", ndmin=2, dtype=np.float64, usecols=keep
            )
    except OSError as exc:
        raise ConfigInvalid(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigInvalid(f"{path}: malformed CSV: {exc}") from exc
    names = [names[j] for j in keep]
    if data.size == 0:
        data = data.reshape(0, len(names))
    if data.shape[1] != len(names):
        raise ConfigInvalid(f"{path}: row width does not match header")
    return names, data


# ---------------------------------------------------------------- simulate

_SIM_KEYS = {"n", "horizon", "rng_seed", "out_dir", "dgp", "covariates", "beta"}


def cmd_simulate(config_path: str, cli_seed=None) -> Path:
    """Write series.csv, covariates.csv (+future rows) and truth.json."""
    raw = load_config(config_path)
    _check_unknown(raw, _SIM_KEYS)
    n = _field(raw, "n", int, required=True)
    if n < 2:
        raise ConfigInvalid("config: n must be at least 2")
    horizon = _field(raw, "horizon", int, 0)
    seed = _resolve_seed(_field(raw, "rng_seed", int, 0), cli_seed)
    out_dir = Path(_field(raw, "out_dir", str, "."))
    layout, custom = _parse_covariates(raw.get("covariates"))
    dgp = _parse_dgp(_field(raw, "dgp", dict, required=True), n + horizon)

    from .harness import layout_spec

    p = layout_spec(layout, custom).p
    beta_spec = _parse_beta(raw.get("beta"), p)

    resolved = {
        "command": "simulate", "n": n, "horizon": horizon, "rng_seed": seed,
        "dgp": dataclasses.asdict(dgp), "layout": layout,
        "custom": None if custom is None else dataclasses.asdict(custom),
        "beta": dataclasses.asdict(beta_spec),
    }
    timer = _ManifestTimer("simulate", resolved, seed)

    probe = ExperimentConfig(
        dgp=dgp, beta=beta_spec, n=n, horizons=[max(1, horizon)],
        methods=["qtl"], estimators=["lasso"], n_reps=1, rng_seed=seed,
        covariate_layout=layout, covariates=custom,
    )
    cov_rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0, 0)))
    X_all = build_covariates(probe, n + horizon, cov_rng)
    beta = draw_beta(beta_spec)
    err_rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1, 0)))
    e_all = simulate_errors(dgp, err_rng)
    y_all = X_all.values @ beta + e_all

    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / "series.csv", ["y"], y_all[:n].reshape(-1, 1))
    if p > 0:
        write_csv(out_dir / "covariates.csv", X_all.col_names, X_all.values[:n])
        if horizon > 0:
            write_csv(
                out_dir / "future_covariates.csv", X_all.col_names, X_all.values[n:]
            )
    truth = {
        "beta": [float(b) for b in beta],
        "beta_spec": dataclasses.asdict(beta_spec),
        "dgp": dataclasses.asdict(dgp),
        "rng_seed": seed,
        "n": n,
        "horizon": horizon,
        "future_y_mean": float(y_all[n:].mean()) if horizon > 0 else None,
    }
    (out_dir / "truth.json").write_text(_json_dumps(truth) + "\n", encoding="utf-8")
    timer.finish(out_dir)
    return out_dir


# ----------------------------------------------------------------- predict

def _align_future(train_names, future_names, future_vals):
    if set(train_names) != set(future_names):
        raise ColumnMismatch("future covariate columns do not match training columns")
    order = [future_names.index(name) for name in train_names]
    return future_vals[:, order]


def cmd_predict(args) -> dict:
    """Fit, forecast and write interval.json; returns the interval payload."""
    names, ydata = read_csv(args.data)
    if "y" not in names:
        raise ConfigInvalid(f"{args.data}: expected a 'y' column")
    y = ydata[:, names.index("y")]
    n = len(y)
    if n < 2:
        raise ConfigInvalid("need at least 2 observations")

    if args.covariates:
        xnames, xvals = read_csv(args.covariates)
        if xvals.shape[0] != n:
            raise ColumnMismatch("covariate rows do not match series length")
        X = DesignMatrix(values=xvals, col_names=xnames)
    else:
        X = DesignMatrix(np.zeros((n, 0)), [])

    m = args.m
    if args.future_covariates:
        fnames, fvals = read_csv(args.future_covariates)
        fvals = _align_future(X.col_names, fnames, fvals)
        if m is None:
            m = fvals.shape[0]
        elif m > fvals.shape[0]:
            raise ConfigInvalid("--m exceeds rows in future covariates")
        x_future = fvals[:m]
    elif args.future_mean and X.p > 0:
        if m is None:
            raise ConfigInvalid("--future-mean requires --m")
        x_future = np.tile(X.values.mean(axis=0), (m, 1))
    elif X.p == 0:
        if m is None:
            raise ConfigInvalid("--m is required without future covariates")
        x_future = np.zeros((m, 0))
    else:
        raise ConfigInvalid("provide --future-covariates or --future-mean")
    if m < 1:
        raise ConfigInvalid("--m must be positive")

    seed = _resolve_seed(0, args.seed)
    alpha = 1.0 - args.level
    w = exp_weights(n, args.weights_delta) if args.weights_delta is not None else None
    if w is not None and args.estimator == "lad":
        raise ConfigInvalid("--weights-delta is not supported with --estimator lad")

    if args.estimator == "ols":
        fit = fit_ols(X, y, w)
    elif args.estimator == "lad":
        fit = fit_lad(X, y)
    else:
        Xs = X.standardize()
        grid = default_lambda_grid(Xs, y, w)
        lam, _ = cv_lasso(Xs, y, 10, grid, w, rng_seed=seed)
        fit = fit_lasso(Xs, y, lam, w)

    if args.method == "adj":
        method_cfg = BootstrapConfig(
            B=args.boot_B,
            expected_block_len=args.boot_block or default_block_len(n),
            rng_seed=seed,
        )
    elif args.method == "clt":
        method_cfg = args.block_len
    else:
        method_cfg = None
    pi = pi_regression(fit, x_future, args.method, alpha, method_cfg)

    payload = {
        "lower": pi.lower, "upper": pi.upper, "level": pi.level,
        "m": pi.horizon_m, "method": pi.method, "point_forecast": pi.point_forecast,
    }
    resolved = {
        "command": "predict", "data": args.data, "covariates": args.covariates,
        "future_covariates": args.future_covariates, "future_mean": bool(args.future_mean),
        "method": args.method, "estimator": args.estimator, "m": m,
        "level": args.level, "weights_delta": args.weights_delta,
        "block_len": args.block_len, "boot_B": args.boot_B,
        "boot_block": args.boot_block, "rng_seed": seed,
    }
    timer = _ManifestTimer("predict", resolved, seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "interval.json").write_text(_json_dumps(payload) + "\n", encoding="utf-8")
    timer.finish(out_dir)

    print(
        f"{args.estimator}-{args.method} interval for the mean of the next {m} values\n"
        f"  level          {100 * args.level:g}%\n"
        f"  point forecast {pi.point_forecast:.6g}\n"
        f"  interval       [{pi.lower:.6g}, {pi.upper:.6g}]\n"
        f"  width          {pi.width:.6g}"
    )
    return payload


# ---------------------------------------------------------------- evaluate

_EVAL_KEYS = {
    "preset", "out_dir", "n", "horizons", "methods", "estimators", "n_reps",
    "level", "rng_seed", "dgp", "beta", "covariates", "k_folds", "n_lambdas",
    "lambda_min_ratio", "cv_rule", "adj_B", "adj_block_len", "clt_block_len",
    "weights_delta", "redraw_covariates",
}


def _experiment_from_config(raw: dict, cli_seed) -> tuple[ExperimentConfig, Path]:
    _check_unknown(raw, _EVAL_KEYS)
    out_dir = Path(_field(raw, "out_dir", str, "."))
    preset = _field(raw, "preset", str)
    overrides = {}
    if _field(raw, "n_reps", int) is not None:
        overrides["n_reps"] = raw["n_reps"]
    if preset is not None:
        for key in ("dgp", "beta", "covariates"):
            if raw.get(key) is not None:
                raise ConfigInvalid(
                    f"config: '{key}' cannot be overridden when a preset is named"
                )
        for key in ("n", "horizons", "methods", "estimators", "level", "k_folds",
                    "n_lambdas", "lambda_min_ratio", "cv_rule", "adj_B",
                    "adj_block_len", "clt_block_len", "weights_delta",
                    "redraw_covariates"):
            if raw.get(key) is not None:
                overrides[key] = raw[key]
        if raw.get("rng_seed") is not None:
            overrides["rng_seed"] = raw["rng_seed"]
        try:
            cfg = get_preset(preset, **overrides)
        except TypeError as exc:
            raise ConfigInvalid(f"config: bad preset override: {exc}") from exc
        seed = _resolve_seed(cfg.rng_seed, cli_seed)
        if seed != cfg.rng_seed:
            cfg = dataclasses.replace(cfg, rng_seed=seed)
        return cfg, out_dir

    n = _field(raw, "n", int, required=True)
    layout, custom = _parse_covariates(raw.get("covariates"))
    from .harness import layout_spec

    p = layout_spec(layout, custom).p
    seed = _resolve_seed(_field(raw, "rng_seed", int, 0), cli_seed)
    try:
        cfg = ExperimentConfig(
            dgp=_parse_dgp(_field(raw, "dgp", dict, required=True), n),
            beta=_parse_beta(raw.get("beta"), p),
            n=n,
            horizons=list(_field(raw, "horizons", list, required=True)),
            methods=list(_field(raw, "methods", list, ["qtl"])),
            estimators=list(_field(raw, "estimators", list, ["lasso"])),
            n_reps=_field(raw, "n_reps", int, 200),
            level=_field(raw, "level", float, 0.90),
            rng_seed=seed,
            covariate_layout=layout,
            covariates=custom,
            k_folds=_field(raw, "k_folds", int, 10),
            n_lambdas=_field(raw, "n_lambdas", int, 100),
            lambda_min_ratio=_field(raw, "lambda_min_ratio", float, 1e-4),
            cv_rule=_field(raw, "cv_rule", str, "min"),
            adj_B=_field(raw, "adj_B", int, 1000),
            adj_block_len=_field(raw, "adj_block_len", float),
            clt_block_len=_field(raw, "clt_block_len", int),
            weights_delta=_field(raw, "weights_delta", float),
            redraw_covariates=bool(_field(raw, "redraw_covariates", bool, False)),
        )
    except HorizonPiError:
        raise
    except ValueError as exc:
        raise ConfigInvalid(f"config: {exc}") from exc
    return cfg, out_dir


def cmd_evaluate(config_path: str, jobs: int = 1, cli_seed=None) -> Path:
    """Run the coverage experiment and write report.csv / report.txt."""
    raw = load_config(config_path)
    cfg, out_dir = _experiment_from_config(raw, cli_seed)
    resolved = dataclasses.asdict(cfg)
    timer = _ManifestTimer("evaluate", resolved, cfg.rng_seed)
    report = run_coverage_experiment(cfg, jobs=jobs)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.csv").write_text(report.to_csv(), encoding="utf-8")
    (out_dir / "report.txt").write_text(report.to_text(), encoding="utf-8")
    timer.finish(out_dir)
    print(report.to_text())
    return out_dir


# ------------------------------------------------------------------ nagaev

_NAGAEV_KEYS = {"rng_seed", "n_mc", "out_dir", "b", "cases"}
_CASE_KEYS = {"case", "q", "innovation", "coeffs", "beta", "x_values",
              "x_multiples", "consts"}


def _parse_coeffs(cfg: dict, where: str) -> np.ndarray:
    kind = _field(cfg, "kind", str, required=True, where=where)
    if kind == "geometric":
        ratio = _field(cfg, "ratio", float, 0.5, where=where)
        count = _field(cfg, "count", int, 31, where=where)
        return ratio ** np.arange(count)
    if kind == "polynomial":
        expo = _field(cfg, "exponent", float, -1.3, where=where)
        count = _field(cfg, "count", int, 201, where=where)
        return (1.0 + np.arange(count)) ** expo
    if kind == "list":
        return np.asarray(_field(cfg, "values", list, required=True, where=where), dtype=float)
    raise ConfigInvalid(f"{where}: unknown coeffs kind {kind!r}")


def cmd_nagaev(config_path: str, cli_seed=None) -> Path:
    """Evaluate bounds against the Monte Carlo oracle; write the table."""
    raw = load_config(config_path)
    _check_unknown(raw, _NAGAEV_KEYS)
    seed = _resolve_seed(_field(raw, "rng_seed", int, 0), cli_seed)
    n_mc = _field(raw, "n_mc", int, 100000)
    out_dir = Path(_field(raw, "out_dir", str, "."))
    bcfg = _field(raw, "b", dict, {"kind": "ones", "n": 100})
    if _field(bcfg, "kind", str, "ones", where="config.b") != "ones":
        raise ConfigInvalid("config.b: only kind 'ones' is supported")
    b = np.ones(_field(bcfg, "n", int, 100, where="config.b"))
    cases = _field(raw, "cases", list, required=True)

    timer = _ManifestTimer("nagaev", {"command": "nagaev", "raw": raw, "rng_seed": seed}, seed)
    rows = []
    for idx, ccfg in enumerate(cases):
        where = f"config.cases[{idx}]"
        if not isinstance(ccfg, dict):
            raise ConfigInvalid(f"{where}: must be a mapping")
        _check_unknown(ccfg, _CASE_KEYS, where)
        case = _field(ccfg, "case", str, required=True, where=where)
        q = _field(ccfg, "q", float, required=True, where=where)
        inn = _field(ccfg, "innovation", dict, {"kind": "gaussian"}, where=where)
        kind = _field(inn, "kind", str, "gaussian", where=f"{where}.innovation")
        param = _field(inn, "param", float, where=f"{where}.innovation")
        coeffs = _parse_coeffs(_field(ccfg, "coeffs", dict, required=True, where=where), f"{where}.coeffs")
        beta = _field(ccfg, "beta", float, where=where)
        overrides = _field(ccfg, "consts", dict, {}, where=where)
        try:
            qnorm, norm2 = innovation_norms(kind, param, q)
            consts = NagaevConstants(
                eps_q_norm=_field(overrides, "eps_q_norm", float, qnorm, where=where),
                eps_2_norm=_field(overrides, "eps_2_norm", float, norm2, where=where),
                c_q_exp=_field(overrides, "c_q_exp", float, where=where),
                c_q_poly=_field(overrides, "c_q_poly", float, where=where),
                C1=_field(overrides, "C1", float, 1.0, where=where),
                C2=_field(overrides, "C2", float, 1.0, where=where),
                beta=beta,
            )
            proc = LinearProcessSpec(coeffs=coeffs, innovation=kind, param=param)
        except ValueError as exc:
            raise ConfigInvalid(f"{where}: {exc}") from exc

        xs = ccfg.get("x_values")
        if xs is None:
            mults = ccfg.get("x_multiples", [1.0, 2.0, 4.0, 8.0, 16.0])
            scale = math.sqrt(float((effective_coefficients(coeffs, b) ** 2).sum()))
            xs = [mult * scale for mult in mults]
        for x in xs:
            try:
                terms = nagaev_bound_terms(coeffs, b, q, float(x), case, consts)
            except ValueError as exc:
                raise ConfigInvalid(f"{where}: {exc}") from exc
            est = mc_tail_estimate(proc, b, float(x), n_mc, rng_seed=seed)
            rows.append(
                (case, q, float(x), terms.poly_term, terms.exp_term, terms.total,
                 est.p_hat, est.se, terms.total >= est.p_hat - 3.0 * est.se)
            )

    out_dir.mkdir(parents=True, exist_ok=True)
    header = "case,q,x,poly_term,exp_term,bound,mc_p,mc_se,bound_holds"
    lines = [header]
    for r in rows:
        lines.append(
            f"{r[0]},{_fmt(r[1])},{_fmt(r[2])},{_fmt(r[3])},{_fmt(r[4])},"
            f"{_fmt(r[5])},{_fmt(r[6])},{_fmt(r[7])},{str(r[8]).lower()}"
        )
    (out_dir / "nagaev.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    text = ["case        q      x            bound        mc_p      mc_se     holds"]
    for r in rows:
        text.append(
            f"{r[0]:<11s} {r[1]:<6.3g} {r[2]:<12.6g} {r[5]:<12.6g} {r[6]:<9.5f} "
            f"{r[7]:<9.6f} {'yes' if r[8] else 'NO'}"
        )
    (out_dir / "nagaev.txt").write_text("\n".join(text) + "\n", encoding="utf-8")
    timer.finish(out_dir)
    print("\n".join(text))
    return out_dir


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horizonpi",
        description="Prediction intervals for horizon averages of a regressed series.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="write simulated series/covariates/truth files")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--seed", type=int, default=None)

    p_pred = sub.add_parser("predict", help="fit and forecast an interval from CSV inputs")
    p_pred.add_argument("--data", required=True, help="CSV with a 'y' column")
    p_pred.add_argument("--covariates", default=None)
    p_pred.add_argument("--future-covariates", dest="future_covariates", default=None)
    p_pred.add_argument("--future-mean", dest="future_mean", action="store_true",
                        help="use training column means as the future covariate rows")
    p_pred.add_argument("--method", choices=["clt", "qtl", "adj"], default="qtl")
    p_pred.add_argument("--estimator", choices=["ols", "lad", "lasso"], default="lasso")
    p_pred.add_argument("--m", type=int, default=None)
    p_pred.add_argument("--level", type=float, default=0.90)
    p_pred.add_argument("--weights-delta", dest="weights_delta", type=float, default=None,
                        help="exponential down-weighting factor (0.8 typical); off by default")
    p_pred.add_argument("--block-len", dest="block_len", type=int, default=None)
    p_pred.add_argument("--boot-B", dest="boot_B", type=int, default=1000)
    p_pred.add_argument("--boot-block", dest="boot_block", type=float, default=None)
    p_pred.add_argument("--seed", type=int, default=None)
    p_pred.add_argument("--out", default=".")

    p_eval = sub.add_parser("evaluate", help="run a Monte Carlo coverage experiment")
    p_eval.add_argument("--config", required=True)
    p_eval.add_argument("--jobs", type=int, default=1)
    p_eval.add_argument("--seed", type=int, default=None)

    p_nag = sub.add_parser("nagaev", help="tail bound vs Monte Carlo comparison table")
    p_nag.add_argument("--config", required=True)
    p_nag.add_argument("--seed", type=int, default=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            cmd_simulate(args.config, cli_seed=args.seed)
        elif args.command == "predict":
            cmd_predict(args)
        elif args.command == "evaluate":
            cmd_evaluate(args.config, jobs=args.jobs, cli_seed=args.seed)
        elif args.command == "nagaev":
            cmd_nagaev(args.config, cli_seed=args.seed)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
