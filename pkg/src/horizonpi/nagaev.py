"""Tail-probability bounds for weighted sums of linear processes, plus a
Monte Carlo oracle for direction-of-inequality checks.

The bounds evaluate the four concentration-inequality cases (short/long
range dependence x light/heavy innovation tails) for
S_{n,b} = sum_i b_i e_i with e a linear process. Unspecified constants
default to c_q = 2 e^{-q} (q+2)^{-2} in the exponential term (the
classical Fuk-Nagaev corollary value), (1+2/q)^q in the polynomial term
and C1 = C2 = 1, all overridable; outputs are implementation-calibrated
bounds meant for checking the inequality direction against simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dgp import sample_alpha_stable
from .errors import DivergentCoefficientSum

CASES = ("srd_light", "lrd_light", "srd_heavy", "lrd_heavy")


@dataclass
class NagaevConstants:
    """Innovation moment norms and the calibration constants."""

    eps_q_norm: float
    eps_2_norm: float = 1.0
    c_q_exp: float | None = None   # exponential-term constant, light tails
    c_q_poly: float | None = None  # polynomial-term constant, heavy SRD
    C1: float = 1.0
    C2: float = 1.0
    beta: float | None = None      # LRD decay exponent in K = sum |a_j|(1+j)^beta


class BoundTerms(NamedTuple):
    poly_term: float
    exp_term: float

    @property
    def total(self) -> float:
        return self.poly_term + self.exp_term


def _norm_q(v: np.ndarray, q: float) -> float:
    return float((np.abs(v) ** q).sum()) ** (1.0 / q)


def nagaev_bound_terms(a, b, q: float, x: float, case: str, consts: NagaevConstants) -> BoundTerms:
    """Polynomial and exponential terms of the selected bound separately.

    Heavy-tailed cases have no exponential term (it is returned as 0).
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {CASES}")
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if q <= 1:
        raise ValueError("moment order q must exceed 1")
    light = case.endswith("light")
    if light and q <= 2:
        raise ValueError("light-tailed cases require q > 2")
    if not light and q > 2:
        raise ValueError("heavy-tailed cases require 1 < q <= 2")

    n = len(b)
    bq = _norm_q(b, q) ** q
    if case.startswith("srd"):
        coef_sum = float(np.abs(a).sum())
    else:
        if consts.beta is None or not 0.0 < consts.beta < 1.0:
            raise ValueError("LRD cases need beta in (0, 1)")
        coef_sum = float((np.abs(a) * (1.0 + np.arange(len(a))) ** consts.beta).sum())
    if not np.isfinite(coef_sum):
        raise DivergentCoefficientSum("coefficient sum is not finite")

    if x <= 0:
        return BoundTerms(math.inf, 0.0)

    if case == "srd_light":
        poly = (1.0 + 2.0 / q) ** q * bq * coef_sum**q * consts.eps_q_norm**q / x**q
        c_q = consts.c_q_exp if consts.c_q_exp is not None else 2.0 * math.exp(-q) / (q + 2.0) ** 2
        expo = 2.0 * math.exp(-c_q * x**2 / (n * coef_sum**2 * consts.eps_2_norm**2))
        return BoundTerms(poly, expo)
    if case == "lrd_light":
        beta = consts.beta
        poly = consts.C1 * coef_sum**q * bq * n ** (q * (1.0 - beta)) * consts.eps_q_norm**q / x**q
        expo = 2.0 * math.exp(
            -consts.C2 * x**2 / (n ** (3.0 - 2.0 * beta) * consts.eps_2_norm**2 * coef_sum**2)
        )
        return BoundTerms(poly, expo)
    if case == "srd_heavy":
        c_q = consts.c_q_poly if consts.c_q_poly is not None else (1.0 + 2.0 / q) ** q
        poly = c_q * bq * coef_sum**q * consts.eps_q_norm**q / x**q
        return BoundTerms(poly, 0.0)
    beta = consts.beta
    poly = consts.C1 * coef_sum**q * bq * n ** (q * (1.0 - beta)) * consts.eps_q_norm**q / x**q
    return BoundTerms(poly, 0.0)


def nagaev_bound_linear(a, b, q: float, x: float, case: str, consts: NagaevConstants) -> float:
    """Value of the concentration bound for P(|S_{n,b}| >= x)."""
    return nagaev_bound_terms(a, b, q, x, case, consts).total


@dataclass
class LinearProcessSpec:
    """Finite-coefficient linear process with named iid innovations."""

    coeffs: np.ndarray
    innovation: str = "gaussian"   # gaussian | student_t | alpha_stable
    param: float | None = None     # df for student_t, alpha for alpha_stable

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64).ravel()
        if self.innovation not in ("gaussian", "student_t", "alpha_stable"):
            raise ValueError(f"unknown innovation {self.innovation!r}")
        if self.innovation != "gaussian" and self.param is None:
            raise ValueError("student_t/alpha_stable need a parameter")

    def draw(self, rng, size) -> np.ndarray:
        if self.innovation == "gaussian":
            return rng.standard_normal(size)
        if self.innovation == "student_t":
            return rng.standard_t(self.param, size)
        return sample_alpha_stable(self.param, rng, size)


def innovation_norms(kind: str, param: float | None, q: float):
    """(||eps||_q, ||eps||_2) for gaussian or student_t innovations."""
    if kind == "gaussian":
        mq = 2.0 ** (q / 2.0) * math.gamma((q + 1.0) / 2.0) / math.sqrt(math.pi)
        return mq ** (1.0 / q), 1.0
    if kind == "student_t":
        nu = float(param)
        if q >= nu:
            raise ValueError("student_t moment of order q needs q < df")
        mq = (
            nu ** (q / 2.0)
            * math.gamma((q + 1.0) / 2.0)
            * math.gamma((nu - q) / 2.0)
            / (math.sqrt(math.pi) * math.gamma(nu / 2.0))
        )
        norm2 = math.sqrt(nu / (nu - 2.0)) if nu > 2 else math.inf
        return mq ** (1.0 / q), norm2
    raise ValueError(f"no closed-form moments for innovation {kind!r}")


def effective_coefficients(a, b) -> np.ndarray:
    """Coefficients c with S_{n,b} = sum_t c_t eps_t.

    Exact finite reindexing of sum_i b_i sum_j a_j eps_{i-j}; the
    innovation vector runs over t = 1-J .. n (length n + J).
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    return np.convolve(b, a[::-1], mode="full")


class TailEstimate(NamedTuple):
    p_hat: float
    se: float
    n_mc: int


def mc_tail_estimate(
    proc: LinearProcessSpec, b, x: float, n_mc: int, rng_seed: int = 0,
    chunk: int = 20000,
) -> TailEstimate:
    """Monte Carlo estimate of P(|S_{n,b}| >= x) with its standard error."""
    if n_mc < 10**4:
        raise ValueError("need at least 1e4 Monte Carlo draws")
    c = effective_coefficients(proc.coeffs, b)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=rng_seed, spawn_key=(0,)))
    count = 0
    done = 0
    while done < n_mc:
        k = min(chunk, n_mc - done)
        eps = proc.draw(rng, (k, len(c)))
        s = eps @ c
        count += int((np.abs(s) >= x).sum())
        done += k
    p_hat = count / n_mc
    se = math.sqrt(p_hat * (1.0 - p_hat) / n_mc)
    return TailEstimate(p_hat, se, n_mc)
