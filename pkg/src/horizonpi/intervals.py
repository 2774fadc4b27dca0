"""Prediction intervals for the average of the next m values.

Three residual-interval constructors (CLT, QTL, ADJ) plus the assembly
step that shifts them by the covariate-based point forecast. Everything
is normalized to the *mean* of the next m values; interval bounds for
raw residual processes are centered at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import ndtr

from .errors import (
    BandwidthNonPositive,
    ColumnMismatch,
    EmptyInput,
    InsufficientData,
    InsufficientWindows,
    InvalidAlpha,
)
from .linmodel import DesignMatrix, FitResult

METHODS = ("clt", "qtl", "adj")


@dataclass
class PredictionInterval:
    """Bounds for the horizon-m average at a given nominal level."""

    lower: float
    upper: float
    level: float
    horizon_m: int
    method: str
    point_forecast: float

    def __post_init__(self):
        if not 0.0 < self.level < 1.0:
            raise InvalidAlpha("level must lie strictly between 0 and 1")
        if self.lower > self.upper:
            raise ValueError("interval lower bound exceeds upper bound")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass
class BootstrapConfig:
    """Stationary-bootstrap replication settings."""

    B: int
    expected_block_len: float
    rng_seed: int

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("replicate count must be positive")
        if self.expected_block_len < 1:
            raise ValueError("expected block length must be at least 1")


def default_block_len(n: int) -> int:
    """Standard subsampling rate: ceil(n^(1/3))."""
    return max(1, math.ceil(n ** (1.0 / 3.0) - 1e-9))


def _check_alpha(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha("alpha must lie strictly between 0 and 1")


def longrun_sd_subsample(e, l: int):
    """Sub-sampling block estimator of the long-run sd.

    sigma_tilde = sqrt(pi*l/2)/n * sum_k |sum of block k|, over
    kappa = ceil(n/l) blocks of length l; the final partial block enters
    like a full one. Returns (sigma_tilde, kappa).
    """
    e = np.asarray(e, dtype=np.float64).ravel()
    n = len(e)
    if n == 0:
        raise EmptyInput("residual vector is empty")
    if l != int(l):
        raise ValueError("block length must be an integer")
    l = int(l)
    if not 1 <= l <= n:
        raise ValueError("block length must satisfy 1 <= l <= n")
    block_sums = np.add.reduceat(e, np.arange(0, n, l))
    kappa = int(math.ceil(n / l))
    sigma_tilde = math.sqrt(math.pi * l / 2.0) / n * float(np.abs(block_sums).sum())
    return sigma_tilde, kappa


def pi_clt(e, m: int, alpha: float, l: int | None = None) -> PredictionInterval:
    """Quenched-CLT interval for the mean of the next m errors.

    Symmetric about 0 with half-width sigma_tilde * |t_{kappa-1}(alpha/2)|
    / sqrt(m), using the sub-sampling long-run sd estimate.
    """
    _check_alpha(alpha)
    e = np.asarray(e, dtype=np.float64).ravel()
    if len(e) == 0:
        raise EmptyInput("residual vector is empty")
    if m < 1:
        raise ValueError("horizon must be positive")
    if l is None:
        l = default_block_len(len(e))
    sigma_tilde, kappa = longrun_sd_subsample(e, l)
    if kappa < 2:
        raise InsufficientData("need at least 2 blocks for the t quantile")
    half = sigma_tilde * abs(stats.t.ppf(alpha / 2.0, kappa - 1)) / math.sqrt(m)
    return PredictionInterval(
        lower=-half, upper=half, level=1.0 - alpha, horizon_m=m,
        method="clt", point_forecast=0.0,
    )


def _window_means(e: np.ndarray, m: int) -> np.ndarray:
    csum = np.cumsum(e)
    sums = csum[m - 1:].copy()
    sums[1:] -= csum[:-m]
    return sums / m


def pi_qtl(e, m: int, alpha: float) -> PredictionInterval:
    """Empirical-quantile interval from moving-window averages.

    Takes the n-m+1 in-sample window averages and returns their alpha/2
    and 1-alpha/2 empirical quantiles (type-7 interpolation).
    """
    _check_alpha(alpha)
    e = np.asarray(e, dtype=np.float64).ravel()
    if m < 1:
        raise ValueError("horizon must be positive")
    if len(e) < m + 20:
        raise InsufficientWindows(
            f"need n >= m + 20 windows for quantiles (n={len(e)}, m={m})"
        )
    w = _window_means(e, m)
    lo, hi = np.quantile(w, [alpha / 2.0, 1.0 - alpha / 2.0])
    return PredictionInterval(
        lower=float(lo), upper=float(hi), level=1.0 - alpha, horizon_m=m,
        method="qtl", point_forecast=0.0,
    )


def _replicate_indices(rng, n: int, expected_block_len: float) -> np.ndarray:
    """Index stream for one stationary-bootstrap replicate: geometric block
    lengths, uniform starts, circular wrap-around."""
    p = 1.0 / expected_block_len
    starts_parts, length_parts, total = [], [], 0
    while total < n:
        k = int(math.ceil((n - total) * p)) + 4
        starts_parts.append(rng.integers(0, n, size=k))
        lengths = rng.geometric(p, size=k)
        length_parts.append(lengths)
        total += int(lengths.sum())
    starts = np.concatenate(starts_parts)
    lengths = np.concatenate(length_parts)
    ends = np.cumsum(lengths)
    nblocks = int(np.searchsorted(ends, n)) + 1
    starts, lengths = starts[:nblocks], lengths[:nblocks]
    lengths[-1] -= int(ends[nblocks - 1]) - n
    begins = np.concatenate([[0], np.cumsum(lengths)[:-1]])
    within = np.arange(int(lengths.sum())) - np.repeat(begins, lengths)
    return (np.repeat(starts, lengths) + within) % n


def stationary_bootstrap(e, cfg: BootstrapConfig) -> np.ndarray:
    """B stationary-bootstrap replicates of e, each of length n.

    Replicate b draws from its own seed stream derived from
    (cfg.rng_seed, b), so results do not depend on how replicates are
    distributed over workers.
    """
    e = np.asarray(e, dtype=np.float64).ravel()
    n = len(e)
    if n < 2:
        raise ValueError("series must have at least 2 observations")
    out = np.empty((cfg.B, n))
    for b in range(cfg.B):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=cfg.rng_seed, spawn_key=(b,))
        )
        out[b] = e[_replicate_indices(rng, n, cfg.expected_block_len)]
    return out


def silverman_bandwidth(samples: np.ndarray) -> float:
    """0.9 * min(sd, IQR/1.34) * B^(-1/5), floored for degenerate samples."""
    samples = np.asarray(samples, dtype=np.float64)
    sd = float(samples.std(ddof=1))
    q75, q25 = np.quantile(samples, [0.75, 0.25])
    spread = min(sd, (q75 - q25) / 1.34)
    floor = 1e-8 * (1.0 + abs(float(samples.mean())))
    return max(0.9 * spread * len(samples) ** (-0.2), floor)


def kernel_quantile(samples, u: float, bandwidth: float | None = None) -> float:
    """u-quantile of the Gaussian-kernel-smoothed sample distribution.

    Solves (1/B) sum_b Phi((q - s_b)/h) = u by bisection; h defaults to
    Silverman's rule.
    """
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if len(samples) < 10:
        raise InsufficientData("kernel quantile needs at least 10 samples")
    if not 0.0 < u < 1.0:
        raise InvalidAlpha("quantile level must lie strictly between 0 and 1")
    if bandwidth is not None:
        if bandwidth <= 0:
            raise BandwidthNonPositive("bandwidth must be positive")
        h = float(bandwidth)
    else:
        h = silverman_bandwidth(samples)

    lo = float(samples.min()) - 40.0 * h
    hi = float(samples.max()) + 40.0 * h
    xtol = 1e-12 * max(1.0, abs(lo), abs(hi))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(ndtr((mid - samples) / h).mean()) >= u:
            hi = mid
        else:
            lo = mid
        if hi - lo <= xtol:
            break
    return 0.5 * (lo + hi)


def bootstrap_window_averages(e, m: int, cfg: BootstrapConfig) -> np.ndarray:
    """All m-window averages (t = m..n) of every bootstrap replicate.

    Shape (B, n-m+1); the ADJ interval consumes only the final column,
    the rest is exposed for diagnostics.
    """
    e = np.asarray(e, dtype=np.float64).ravel()
    if m < 1:
        raise ValueError("horizon must be positive")
    if len(e) < m:
        raise InsufficientWindows(f"need n >= m (n={len(e)}, m={m})")
    reps = stationary_bootstrap(e, cfg)
    csum = np.cumsum(reps, axis=1)
    padded = np.concatenate([np.zeros((cfg.B, 1)), csum], axis=1)
    return (padded[:, m:] - padded[:, :-m]) / m


def pi_adj(e, m: int, alpha: float, cfg: BootstrapConfig) -> PredictionInterval:
    """Bootstrap-adjusted interval: Gaussian-kernel quantiles of the final
    m-window average over B stationary-bootstrap replicates."""
    _check_alpha(alpha)
    if cfg.B < 100:
        raise ValueError("interval use requires B >= 100 replicates")
    wavg = bootstrap_window_averages(e, m, cfg)
    samples = wavg[:, -1]
    lo = kernel_quantile(samples, alpha / 2.0)
    hi = kernel_quantile(samples, 1.0 - alpha / 2.0)
    return PredictionInterval(
        lower=lo, upper=hi, level=1.0 - alpha, horizon_m=m,
        method="adj", point_forecast=0.0,
    )


def _future_values(X_future) -> np.ndarray:
    if isinstance(X_future, DesignMatrix):
        return X_future.original_values()
    arr = np.asarray(X_future, dtype=np.float64)
    return np.atleast_2d(arr)


def pi_regression(
    fit: FitResult,
    X_future,
    method: str,
    alpha: float,
    method_cfg=None,
) -> PredictionInterval:
    """Interval for the mean of the next m responses.

    Shifts the residual interval of the chosen method by the point
    forecast (1/m) sum_i (intercept + x_i' beta) over the m future
    covariate rows (original scale). ``method_cfg`` is the CLT block
    length (int, optional) or the ADJ BootstrapConfig (required).
    """
    method = method.lower()
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    xf = _future_values(X_future)
    if xf.shape[1] != len(fit.beta):
        raise ColumnMismatch(
            f"future covariates have {xf.shape[1]} columns, fit has {len(fit.beta)}"
        )
    m = xf.shape[0]
    point = float(np.mean(fit.intercept + xf @ fit.beta))
    if method == "clt":
        resid_pi = pi_clt(fit.residuals, m, alpha, l=method_cfg)
    elif method == "qtl":
        resid_pi = pi_qtl(fit.residuals, m, alpha)
    else:
        if not isinstance(method_cfg, BootstrapConfig):
            raise ValueError("ADJ requires a BootstrapConfig as method_cfg")
        resid_pi = pi_adj(fit.residuals, m, alpha, method_cfg)
    return PredictionInterval(
        lower=point + resid_pi.lower,
        upper=point + resid_pi.upper,
        level=1.0 - alpha,
        horizon_m=m,
        method=method,
        point_forecast=point,
    )
