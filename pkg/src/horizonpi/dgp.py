"""Simulation of error processes, covariates, coefficients and weights.

Every generator is a deterministic function of its spec and the supplied
``numpy.random.Generator``; experiment-level code derives disjoint seed
streams per repetition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter
from scipy.special import expit

from .errors import (
    AlphaOutOfRange,
    TooManyFrequencies,
    TruncationTooSmall,
    UnstableSpec,
)
from .linmodel import DesignMatrix, ObservationWeights

DGP_KINDS = ("ar1", "longmem", "lstar")


@dataclass
class DgpSpec:
    """Parameters of one simulated error process.

    Defaults follow the autoregressive fits to hourly electricity prices:
    phi1=0.6, phi2=-0.3, transition speed delta=0.05, threshold 0, noise
    sd 54.1, stable tail index 1.5, long-memory decay gamma=-0.8.
    """

    kind: str
    n: int
    phi1: float = 0.6
    phi2: float = -0.3
    gamma: float = -0.8
    delta: float = 0.05
    threshold: float = 0.0
    sigma: float = 54.1
    alpha_star: float = 1.5
    burn_in: int = 1000
    truncation_J: int = 10000

    def __post_init__(self):
        if self.kind not in DGP_KINDS:
            raise ValueError(f"unknown dgp kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.burn_in < 0:
            raise ValueError("burn_in must be nonnegative")
        if self.kind == "ar1" and abs(self.phi1) >= 1:
            raise UnstableSpec("AR(1) requires |phi1| < 1")
        if self.kind == "longmem" and self.gamma >= -0.5:
            raise ValueError("long memory requires gamma < -0.5 for square summability")


@dataclass
class BetaSpec:
    """Sparse coefficient vector: positions and values are seed-fixed."""

    p: int
    sparsity_pct: float
    dist: str
    rng_seed: int

    def __post_init__(self):
        if not 0.0 <= self.sparsity_pct <= 100.0:
            raise ValueError("sparsity_pct must lie in [0, 100]")
        if self.dist not in ("uniform", "cauchy"):
            raise ValueError("dist must be 'uniform' or 'cauchy'")

    @property
    def n_nonzero(self) -> int:
        return int(np.rint(self.p * (1.0 - self.sparsity_pct / 100.0)))


def sample_alpha_stable(alpha_star: float, rng, size=None):
    """Symmetric standard alpha-stable draws (Chambers-Mallows-Stuck).

    Zero skew, unit scale; alpha_star = 2 recovers N(0, 2) and
    alpha_star = 1 the standard Cauchy.
    """
    if not 0.0 < alpha_star <= 2.0:
        raise AlphaOutOfRange("alpha_star must lie in (0, 2]")
    u = np.pi * (rng.random(size) - 0.5)
    w = rng.standard_exponential(size)
    x = (
        np.sin(alpha_star * u)
        / np.cos(u) ** (1.0 / alpha_star)
        * (np.cos((1.0 - alpha_star) * u) / w) ** ((1.0 - alpha_star) / alpha_star)
    )
    return float(x) if size is None else x


def logistic_transition(e_prev, delta: float, threshold: float):
    """Regime weight G(e; delta, T) = 1 / (1 + exp(-delta * (e - T)))."""
    return expit(delta * (np.asarray(e_prev, dtype=np.float64) - threshold))[()]


def gen_ar1(spec: DgpSpec, rng) -> np.ndarray:
    """e_i = phi1 * e_{i-1} + sigma * eps_i, seeded at 0, burn-in dropped."""
    if spec.kind != "ar1":
        raise ValueError("spec.kind must be 'ar1'")
    total = spec.burn_in + spec.n
    innov = spec.sigma * sample_alpha_stable(spec.alpha_star, rng, size=total)
    e = lfilter([1.0], [1.0, -spec.phi1], innov)
    return e[spec.burn_in:]


def _longmem_coeffs(gamma: float, J: int) -> np.ndarray:
    return (np.arange(J + 1) + 1.0) ** gamma


def _check_truncation(gamma: float, J: int):
    # integral proxies for the squared-coefficient tail and partial mass;
    # the l1 coefficient sum diverges for gamma > -1, so the guard works
    # on the (always summable, gamma < -0.5) squares
    if J < 1000:
        raise TruncationTooSmall("truncation_J must be at least 1000")
    tail_sq = (J + 1.0) ** (2 * gamma + 1) / abs(2 * gamma + 1)
    mass_sq = float((_longmem_coeffs(gamma, J) ** 2).sum())
    if tail_sq > 1e-2 * mass_sq:
        raise TruncationTooSmall(
            f"J={J} leaves {tail_sq / mass_sq:.2%} of squared-coefficient mass uncovered"
        )


def longmem_from_innovations(spec: DgpSpec, innov: np.ndarray) -> np.ndarray:
    """Truncated moving average sigma * sum_j (j+1)^gamma eps_{i-j} applied
    to an explicit innovation vector of length n + truncation_J."""
    J = spec.truncation_J
    if len(innov) != spec.n + J:
        raise ValueError("innovation vector must have length n + truncation_J")
    a = _longmem_coeffs(spec.gamma, J)
    return spec.sigma * np.convolve(innov, a, mode="valid")


def gen_longmem(spec: DgpSpec, rng) -> np.ndarray:
    """Long-memory linear process by direct convolution over J lags."""
    if spec.kind != "longmem":
        raise ValueError("spec.kind must be 'longmem'")
    _check_truncation(spec.gamma, spec.truncation_J)
    innov = sample_alpha_stable(spec.alpha_star, rng, size=spec.n + spec.truncation_J)
    return longmem_from_innovations(spec, innov)


def gen_lstar(spec: DgpSpec, rng) -> np.ndarray:
    """Logistic smooth-transition AR: e_i = phi1 e_{i-1}
    + G(e_{i-1}) phi2 e_{i-1} + sigma eps_i."""
    if spec.kind != "lstar":
        raise ValueError("spec.kind must be 'lstar'")
    if abs(spec.phi1) >= 1 or abs(spec.phi1 + spec.phi2) >= 1:
        raise UnstableSpec("need |phi1| < 1 and |phi1 + phi2| < 1")
    total = spec.burn_in + spec.n
    innov = spec.sigma * sample_alpha_stable(spec.alpha_star, rng, size=total)
    out = np.empty(total)
    prev = 0.0
    phi1, phi2 = spec.phi1, spec.phi2
    delta, thr = spec.delta, spec.threshold
    for i in range(total):
        g = expit(delta * (prev - thr))
        prev = phi1 * prev + g * (phi2 * prev) + innov[i]
        out[i] = prev
    return out[spec.burn_in:]


def simulate_errors(spec: DgpSpec, rng) -> np.ndarray:
    """Dispatch to the generator named by spec.kind."""
    if spec.kind == "ar1":
        return gen_ar1(spec, rng)
    if spec.kind == "longmem":
        return gen_longmem(spec, rng)
    return gen_lstar(spec, rng)


def gen_deterministic_covariates(
    n: int,
    n_freqs: int,
    include_weekend_dummies: bool = False,
    base_period: int = 168,
) -> DesignMatrix:
    """Seasonal Fourier columns sin/cos(2 pi k t / base_period), k=1..n_freqs,
    plus two weekend dummies when flagged.

    Phases are computed modulo the base period in integer arithmetic, so
    periodicity is exact. Hour t maps to day floor(t/24) mod 7; days 5
    and 6 are the weekend indicators.
    """
    if n_freqs < 0:
        raise ValueError("n_freqs must be nonnegative")
    if n_freqs > base_period // 2:
        raise TooManyFrequencies(
            f"at most {base_period // 2} frequencies for period {base_period}"
        )
    t = np.arange(n, dtype=np.int64)
    cols, names = [], []
    for k in range(1, n_freqs + 1):
        phase = 2.0 * np.pi * ((k * t) % base_period) / base_period
        cols.append(np.sin(phase))
        names.append(f"sin_{k}")
        cols.append(np.cos(phase))
        names.append(f"cos_{k}")
    if include_weekend_dummies:
        day = (t // 24) % 7
        cols.append((day == 5).astype(np.float64))
        names.append("d_sat")
        cols.append((day == 6).astype(np.float64))
        names.append("d_sun")
    values = np.column_stack(cols) if cols else np.zeros((n, 0))
    return DesignMatrix(values=values, col_names=names)


def gen_stochastic_covariates(
    n: int,
    q: int = 151,
    ar_coef: float = 0.9,
    rng=None,
    burn_in: int = 200,
) -> DesignMatrix:
    """q independent AR(1) columns with unit innovation sd, standardized.

    Stand-in for observed weather series; the default count matches the
    151 wind/temperature series used alongside the deterministic terms.
    """
    if not abs(ar_coef) < 1:
        raise ValueError("|ar_coef| must be below 1")
    rng = np.random.default_rng(rng)
    innov = rng.standard_normal((burn_in + n, q))
    paths = lfilter([1.0], [1.0, -ar_coef], innov, axis=0)[burn_in:]
    names = [f"w{j + 1}" for j in range(q)]
    return DesignMatrix(values=paths, col_names=names).standardize()


def draw_beta(spec: BetaSpec) -> np.ndarray:
    """Sparse coefficient vector with seed-fixed support and values."""
    rng = np.random.default_rng(np.random.SeedSequence(spec.rng_seed))
    beta = np.zeros(spec.p)
    k = spec.n_nonzero
    if k == 0:
        return beta
    support = rng.choice(spec.p, size=k, replace=False)
    if spec.dist == "uniform":
        beta[support] = rng.uniform(-1.0, 1.0, size=k)
    else:
        beta[support] = rng.standard_cauchy(k)
    return beta


def exp_weights_raw(n: int, delta: float) -> np.ndarray:
    """Unnormalized exponential weights in observation order (oldest
    first): observation n-t+1 gets delta^(t-1) (1-delta) / (1-delta^t)."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")
    t = np.arange(1, n + 1, dtype=np.float64)
    raw = delta ** (t - 1) * (1.0 - delta) / (1.0 - delta**t)
    return raw[::-1].copy()


def exp_weights(n: int, delta: float) -> ObservationWeights:
    """Standardized exponential down-weighting; the most recent
    observation gets the largest weight. Renormalized to sum n."""
    return ObservationWeights.from_raw(exp_weights_raw(n, delta))
