"""Weighted linear-model estimation: OLS, LAD, and lasso with CV.

All fitters accept a :class:`DesignMatrix` plus a target (``Series`` or
plain array) and return a :class:`FitResult` whose coefficients live on
the *original* covariate scale, with an always-present unpenalized
intercept. Residuals therefore satisfy

    residuals[i] == y[i] - intercept - x_orig[i] @ beta

up to float rounding, where ``x_orig`` are the unstandardized covariates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._backend import lasso_cd
from .errors import (
    DimensionMismatch,
    EmptyGrid,
    NonConvergence,
    RankDeficient,
)

_CONST_TOL = 1e-12


@dataclass
class Series:
    """Ordered observations of the target variable."""

    values: np.ndarray
    timestamps: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).ravel()
        if self.timestamps is not None and len(self.timestamps) != len(self.values):
            raise DimensionMismatch("timestamps and values length disagree")

    def __len__(self) -> int:
        return len(self.values)


def _as_target(y) -> np.ndarray:
    if isinstance(y, Series):
        return y.values
    return np.asarray(y, dtype=np.float64).ravel()


def _constant_mask(values: np.ndarray) -> np.ndarray:
    sd = values.std(axis=0, ddof=1)
    mean = np.abs(values.mean(axis=0))
    return sd <= _CONST_TOL * (1.0 + mean)


@dataclass
class DesignMatrix:
    """n x p covariate matrix with column labels and scaling metadata.

    ``col_means``/``col_scales`` map stored values back to the original
    scale via ``original = values * col_scales + col_means``; they are
    identity for matrices that were never standardized. Constant columns
    are exempt from standardization and flagged in ``constant_mask``.
    """

    values: np.ndarray
    col_names: list[str]
    standardized: bool = False
    col_means: np.ndarray | None = None
    col_scales: np.ndarray | None = None
    constant_mask: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise DimensionMismatch("design matrix must be 2-dimensional")
        n, p = self.values.shape
        if n < 2:
            raise DimensionMismatch("design matrix needs at least 2 rows")
        if len(self.col_names) != p:
            raise DimensionMismatch("col_names length does not match column count")
        if self.col_means is None:
            self.col_means = np.zeros(p)
        if self.col_scales is None:
            self.col_scales = np.ones(p)
        self.col_means = np.asarray(self.col_means, dtype=np.float64)
        self.col_scales = np.asarray(self.col_scales, dtype=np.float64)
        if self.constant_mask is None:
            self.constant_mask = _constant_mask(self.values) if n >= 2 else np.zeros(p, bool)
        self.constant_mask = np.asarray(self.constant_mask, dtype=bool)

    @classmethod
    def from_values(cls, values, col_names=None) -> "DesignMatrix":
        values = np.atleast_2d(np.asarray(values, dtype=np.float64))
        if col_names is None:
            col_names = [f"x{j + 1}" for j in range(values.shape[1])]
        return cls(values=values, col_names=list(col_names))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def standardize(self) -> "DesignMatrix":
        """Scale non-constant columns to sample mean 0 and sample sd 1."""
        if self.standardized:
            return self
        mask = self.constant_mask
        means = self.values.mean(axis=0)
        sds = self.values.std(axis=0, ddof=1)
        use_means = np.where(mask, 0.0, means)
        use_scales = np.where(mask, 1.0, sds)
        new_values = (self.values - use_means) / use_scales
        return DesignMatrix(
            values=new_values,
            col_names=list(self.col_names),
            standardized=True,
            col_means=use_means,
            col_scales=use_scales,
            constant_mask=mask,
        )

    def original_values(self) -> np.ndarray:
        """Covariates on the pre-standardization scale."""
        if not self.standardized:
            return self.values
        return self.values * self.col_scales + self.col_means

    def take_rows(self, idx) -> "DesignMatrix":
        """Row subset; scaling metadata is kept but sample-stat invariants
        only hold for the full matrix ``standardize`` produced."""
        return DesignMatrix(
            values=self.values[idx],
            col_names=list(self.col_names),
            standardized=False,
            col_means=self.col_means.copy(),
            col_scales=self.col_scales.copy(),
            constant_mask=self.constant_mask.copy(),
        )

    @classmethod
    def concat(cls, mats: list["DesignMatrix"]) -> "DesignMatrix":
        """Column-wise concatenation; stored values are taken as the raw
        covariates of the combined matrix."""
        values = np.hstack([m.values for m in mats])
        names = [name for m in mats for name in m.col_names]
        if len(set(names)) != len(names):
            raise DimensionMismatch("duplicate column names in concat")
        return cls.from_values(values, names)


@dataclass
class ObservationWeights:
    """Nonnegative per-observation weights normalized to sum n."""

    v: np.ndarray

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=np.float64).ravel()
        if np.any(self.v < 0):
            raise ValueError("weights must be nonnegative")
        n = len(self.v)
        total = self.v.sum()
        if abs(total - n) > 1e-10 * max(1.0, n):
            raise ValueError("weights must sum to n; use from_raw to normalize")

    @classmethod
    def from_raw(cls, raw) -> "ObservationWeights":
        raw = np.asarray(raw, dtype=np.float64).ravel()
        if np.any(raw < 0):
            raise ValueError("weights must be nonnegative")
        total = raw.sum()
        if total <= 0:
            raise ValueError("weights must have positive sum")
        return cls(v=raw * (len(raw) / total))


@dataclass
class FitResult:
    """Coefficients (original covariate scale), residuals and fit metadata."""

    beta: np.ndarray
    intercept: float
    residuals: np.ndarray
    estimator: str
    lambda_: float | None = None
    weights_used: np.ndarray | None = None
    n_sweeps: int | None = None
    objective_path: np.ndarray | None = field(default=None, repr=False)

    def predict(self, X: DesignMatrix) -> np.ndarray:
        if X.p != len(self.beta):
            raise DimensionMismatch("column count does not match coefficient length")
        return self.intercept + X.original_values() @ self.beta


def _weights_vector(w: ObservationWeights | None, n: int) -> np.ndarray:
    if w is None:
        return np.ones(n)
    if len(w.v) != n:
        raise DimensionMismatch("weights length does not match sample size")
    return w.v


def _to_original_scale(X: DesignMatrix, beta_fit: np.ndarray, b0_fit: float):
    beta = beta_fit / X.col_scales
    intercept = b0_fit - float((beta_fit * X.col_means / X.col_scales).sum())
    return beta, intercept


def _solve_weighted_ls(Z: np.ndarray, y: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Solve argmin sum v_i (y_i - z_i'c)^2 with an explicit rank check."""
    A = Z.T @ (Z * v[:, None])
    b = Z.T @ (v * y)
    eigs = np.linalg.eigvalsh(A)
    if eigs[-1] <= 0 or eigs[0] < 1e-10 * eigs[-1]:
        raise RankDeficient(
            "weighted normal equations singular beyond tolerance 1e-10*||X'WX||"
        )
    return np.linalg.solve(A, b)


def fit_ols(X: DesignMatrix, y, w: ObservationWeights | None = None) -> FitResult:
    """Weighted least squares with unpenalized intercept.

    Requires n > p and full column rank; constant columns are dropped
    into the intercept (their coefficient is reported as 0).
    """
    yv = _as_target(y)
    if len(yv) != X.n:
        raise DimensionMismatch("y length does not match design rows")
    v = _weights_vector(w, X.n)
    active = ~X.constant_mask
    if X.n <= X.p:
        raise RankDeficient("need n > p for least squares")
    Z = np.hstack([np.ones((X.n, 1)), X.values[:, active]])
    coef = _solve_weighted_ls(Z, yv, v)
    beta_fit = np.zeros(X.p)
    beta_fit[active] = coef[1:]
    residuals = yv - Z @ coef
    beta, intercept = _to_original_scale(X, beta_fit, float(coef[0]))
    return FitResult(
        beta=beta,
        intercept=intercept,
        residuals=residuals,
        estimator="ols",
        weights_used=None if w is None else w.v.copy(),
    )


def fit_lad(
    X: DesignMatrix,
    y,
    max_iter: int = 200,
    tol: float = 1e-9,
    floor: float = 1e-8,
) -> FitResult:
    """Least absolute deviations via iteratively reweighted least squares.

    IRLS weights are 1/max(floor, |r_i|); converges when the largest
    coefficient change falls below tol*(1 + max|coef|).
    """
    yv = _as_target(y)
    if len(yv) != X.n:
        raise DimensionMismatch("y length does not match design rows")
    active = ~X.constant_mask
    if X.n <= X.p:
        raise RankDeficient("need n > p for LAD regression")
    Z = np.hstack([np.ones((X.n, 1)), X.values[:, active]])

    coef = _solve_weighted_ls(Z, yv, np.ones(X.n))
    for _ in range(max_iter):
        r = yv - Z @ coef
        u = 1.0 / np.maximum(floor, np.abs(r))
        new_coef = _solve_weighted_ls(Z, yv, u)
        delta = np.max(np.abs(new_coef - coef))
        coef = new_coef
        if delta < tol * (1.0 + np.max(np.abs(coef))):
            break
    else:
        raise NonConvergence(f"LAD IRLS did not converge in {max_iter} iterations")

    beta_fit = np.zeros(X.p)
    beta_fit[active] = coef[1:]
    residuals = yv - Z @ coef
    beta, intercept = _to_original_scale(X, beta_fit, float(coef[0]))
    return FitResult(beta=beta, intercept=intercept, residuals=residuals, estimator="lad")


def soft_threshold(z: float, g: float) -> float:
    """sign(z) * max(|z| - g, 0); the coordinate-descent shrinkage kernel."""
    if g < 0:
        raise ValueError("threshold must be nonnegative")
    if z > g:
        return z - g
    if z < -g:
        return z + g
    return 0.0


def _response_scale(yv: np.ndarray) -> float:
    """Robust response scale used to make the coordinate-descent stopping
    rule scale-free: the solver works on y/s with penalty lam/s, so the
    tol applies to a unit-scale problem. Heavy-tailed responses (sigma in
    the tens, occasional huge spikes) would otherwise need absurdly many
    sweeps to move coefficients by less than an absolute tol."""
    med = float(np.median(yv))
    mad = float(np.median(np.abs(yv - med)))
    return max(1.0, 1.4826 * mad)


_BURST_SWEEPS = 5


def _support_newton(values, ys, v, lam, beta, n):
    """Descent step toward the exact minimizer of the objective restricted
    to the current support with frozen signs.

    The frozen-sign objective is convex and minimized at the solved
    coefficients, so it is non-increasing along the segment from the
    current iterate; it coincides with the true objective until the first
    sign crossing. A full step is taken when signs stay consistent,
    otherwise the step stops exactly at the first crossing (zeroing that
    coordinate). Either way the true objective cannot increase. Speeds up
    the dense small-lambda end of the path where plain sweeps crawl.
    """
    sup = np.flatnonzero(beta)
    k = len(sup)
    if k == 0 or k > n - 2:
        return beta
    Z = np.concatenate([np.ones((n, 1)), values[:, sup]], axis=1)
    A = Z.T @ (Z * v[:, None])
    rhs = Z.T @ (v * ys)
    signs = np.sign(beta[sup])
    rhs[1:] -= 0.5 * n * lam * signs
    try:
        coef = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        return beta
    if not np.all(np.isfinite(coef)):
        return beta
    target = coef[1:]
    out = beta.copy()
    if np.all(np.sign(target) == signs):
        out[sup] = target
        return out
    d = target - beta[sup]
    flipped = (np.sign(target) != signs) & (d != 0)
    steps = -beta[sup][flipped] / d[flipped]
    t = float(steps.min())
    if t <= 0.0:
        return beta
    stepped = beta[sup] + t * d
    stepped[np.flatnonzero(flipped)[steps <= t]] = 0.0
    out[sup] = stepped
    return out


def _cd_solve(values, ys, v, lam, beta_init, active, tol, max_sweeps):
    """Coordinate descent with interleaved support-Newton refinements.

    Convergence is always certified by the kernel itself (a full sweep
    moving no coefficient by tol or more), so results satisfy the same
    stopping contract as plain cyclic descent.
    """
    n = values.shape[0]
    beta = np.asarray(beta_init, dtype=np.float64).copy()
    b0 = 0.0
    used = 0
    obj_parts = []
    while used < max_sweeps:
        burst = min(_BURST_SWEEPS, max_sweeps - used)
        beta, b0, ns, obj, converged = lasso_cd(
            values, ys, v, lam, beta, 0.0, active, tol, burst
        )
        used += ns
        obj_parts.append(obj)
        if converged:
            return beta, b0, used, np.concatenate(obj_parts), True
        beta = _support_newton(values, ys, v, lam, beta, n)
    return beta, b0, used, np.concatenate(obj_parts), False


def fit_lasso(
    X: DesignMatrix,
    y,
    lam: float,
    w: ObservationWeights | None = None,
    tol: float = 1e-7,
    max_sweeps: int = 10000,
    beta_init: np.ndarray | None = None,
) -> FitResult:
    """Lasso with unpenalized intercept by cyclic coordinate descent.

    Minimizes (1/n) sum v_i (y_i - b0 - x_i'beta)^2 + lam * ||beta||_1 on
    the standardized values of X; reported coefficients are mapped back
    to the original covariate scale. ``beta_init`` (standardized scale)
    enables warm starts.
    """
    if not X.standardized:
        raise ValueError("fit_lasso requires a standardized DesignMatrix")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    yv = _as_target(y)
    if len(yv) != X.n:
        raise DimensionMismatch("y length does not match design rows")
    v = _weights_vector(w, X.n)
    active = (~X.constant_mask).astype(np.uint8)
    if beta_init is None:
        beta_init = np.zeros(X.p)
    s = _response_scale(yv)
    beta_fit, b0_fit, n_sweeps, obj_path, converged = _cd_solve(
        np.asfortranarray(X.values), yv / s, v, float(lam) / s,
        np.asarray(beta_init) / s, active, tol, max_sweeps,
    )
    if not converged:
        raise NonConvergence(f"coordinate descent did not converge in {max_sweeps} sweeps")
    beta_fit = beta_fit * s
    b0_fit = b0_fit * s
    obj_path = obj_path * s**2
    residuals = yv - b0_fit - X.values @ beta_fit
    beta, intercept = _to_original_scale(X, beta_fit, b0_fit)
    return FitResult(
        beta=beta,
        intercept=intercept,
        residuals=residuals,
        estimator="lasso",
        lambda_=float(lam),
        weights_used=None if w is None else w.v.copy(),
        n_sweeps=n_sweeps,
        objective_path=obj_path,
    )


def lambda_max(X: DesignMatrix, y, w: ObservationWeights | None = None) -> float:
    """Smallest penalty that forces all lasso coefficients to zero.

    KKT threshold at beta = 0 with the intercept at the weighted mean:
    max_j |(2/n) sum_i v_i x_ij (y_i - ybar_w)|. For standardized X and
    unit weights this equals max_j |(2/n) sum_i x_ij y_i|.
    """
    yv = _as_target(y)
    v = _weights_vector(w, X.n)
    ybar = float(v @ yv) / float(v.sum())
    grad = 2.0 / X.n * (X.values * v[:, None]).T @ (yv - ybar)
    return float(np.max(np.abs(grad))) if X.p else 0.0


def default_lambda_grid(
    X: DesignMatrix,
    y,
    w: ObservationWeights | None = None,
    n_values: int = 100,
    min_ratio: float = 1e-4,
) -> np.ndarray:
    """Log-spaced grid from lambda_max down to min_ratio * lambda_max."""
    lmax = max(lambda_max(X, y, w), 1e-12)
    return np.geomspace(lmax, lmax * min_ratio, n_values)


def _lasso_path(values, yv, v, active, grid, tol, max_sweeps):
    """Warm-started coordinate descent along a decreasing lambda grid.

    Returns (betas, intercepts) on the scale of ``values``; solved on the
    response-rescaled problem (see _response_scale) and mapped back.
    """
    n, p = values.shape
    values = np.asfortranarray(values)
    s = _response_scale(yv)
    ys = yv / s
    betas = np.empty((len(grid), p))
    intercepts = np.empty(len(grid))
    beta = np.zeros(p)
    for g, lam in enumerate(grid):
        beta, b0, _, _, converged = _cd_solve(
            values, ys, v, float(lam) / s, beta, active, tol, max_sweeps
        )
        if not converged:
            raise NonConvergence(
                f"coordinate descent did not converge at lambda={lam:.3g}"
            )
        betas[g] = beta
        intercepts[g] = b0
    return betas * s, intercepts * s


def cv_lasso(
    X: DesignMatrix,
    y,
    k_folds: int,
    lambda_grid,
    w: ObservationWeights | None = None,
    rng_seed: int = 0,
    tol: float = 1e-7,
    max_sweeps: int = 10000,
    rule: str = "min",
):
    """Pick the lasso penalty by k-fold cross validation.

    Folds are contiguous blocks in time order (dependence-respecting; the
    assignment consumes no randomness, so any rng_seed gives the same
    folds). Training and validation losses are both weighted. Under the
    default rule the winner minimizes the mean out-of-fold error, ties
    breaking toward the larger lambda; rule="1se" instead takes the
    largest lambda whose mean error is within one standard error of the
    minimum (the parsimonious choice R users get when predicting from a
    cross-validated fit without naming a lambda).

    Returns (lambda_star, cv_errors) with cv_errors aligned to the grid.
    """
    grid = np.asarray(lambda_grid, dtype=np.float64).ravel()
    if grid.size == 0:
        raise EmptyGrid("lambda grid is empty")
    if grid.size > 1 and np.any(np.diff(grid) >= 0):
        raise ValueError("lambda grid must be strictly decreasing")
    if k_folds < 2:
        raise ValueError("k_folds must be at least 2")
    if rule not in ("min", "1se"):
        raise ValueError("rule must be 'min' or '1se'")
    yv = _as_target(y)
    if len(yv) != X.n:
        raise DimensionMismatch("y length does not match design rows")
    if k_folds > X.n:
        raise DimensionMismatch("more folds than observations")
    v = _weights_vector(w, X.n)
    active = (~X.constant_mask).astype(np.uint8)

    folds = np.array_split(np.arange(X.n), k_folds)
    fold_errors = np.empty((k_folds, grid.size))
    for k, val_idx in enumerate(folds):
        train_idx = np.concatenate([f for i, f in enumerate(folds) if i != k])
        v_train = v[train_idx]
        v_train = v_train * (len(train_idx) / v_train.sum())
        betas, intercepts = _lasso_path(
            X.values[train_idx], yv[train_idx], v_train, active, grid, tol, max_sweeps
        )
        preds = X.values[val_idx] @ betas.T + intercepts
        sq = (yv[val_idx, None] - preds) ** 2
        v_val = v[val_idx]
        fold_errors[k] = v_val @ sq / v_val.sum()

    cv_errors = fold_errors.mean(axis=0)
    i_min = int(np.argmin(cv_errors))
    if rule == "1se":
        se = float(fold_errors[:, i_min].std(ddof=1)) / np.sqrt(k_folds)
        i_min = int(np.argmax(cv_errors <= cv_errors[i_min] + se))
    lambda_star = float(grid[i_min])
    return lambda_star, cv_errors
