"""Pure-numpy cyclic coordinate descent for the weighted lasso objective.

Reference implementation of the compiled kernel in ``_cd_fast.pyx``; the
active backend is chosen at import time in ``_backend``. Both minimize

    (1/n) sum_i v_i (y_i - b0 - x_i' beta)^2 + lam * ||beta||_1

with an unpenalized intercept b0. Coordinates with ``active[j] == 0`` are
held at zero (constant columns). Between full sweeps the solver iterates
on the current support only (glmnet-style); convergence is declared when
a full sweep moves no coefficient by tol or more.
"""

import numpy as np


def _sweep(X, vX, col_w2, active, r, beta, half_lam, n, support_only):
    max_delta = 0.0
    p = len(beta)
    for j in range(p):
        cj = col_w2[j]
        if not active[j] or cj <= 0.0:
            continue
        bj = beta[j]
        if support_only and bj == 0.0:
            continue
        rho = float(vX[:, j] @ r) / n + cj * bj
        if rho > half_lam:
            bj_new = (rho - half_lam) / cj
        elif rho < -half_lam:
            bj_new = (rho + half_lam) / cj
        else:
            bj_new = 0.0
        d = bj_new - bj
        if d != 0.0:
            r -= d * X[:, j]
            beta[j] = bj_new
            if abs(d) > max_delta:
                max_delta = abs(d)
    return max_delta


def lasso_cd(X, y, v, lam, beta_init, intercept_init, active, tol, max_sweeps):
    """Coordinate descent until a full sweep changes nothing by >= tol.

    Parameters
    ----------
    X : (n, p) float64 array, Fortran order preferred
    y, v : (n,) float64 arrays; v has nonnegative entries summing to n
    lam : nonnegative penalty on the l1 norm of beta
    beta_init, intercept_init : warm start
    active : (p,) uint8 mask; inactive coordinates stay at their init value
    tol, max_sweeps : convergence controls

    Returns
    -------
    (beta, intercept, n_sweeps, objective_path, converged)
    ``objective_path[k]`` is the objective after sweep k+1 (full and
    support-only sweeps both count).
    """
    n, p = X.shape
    beta = np.array(beta_init, dtype=np.float64, copy=True)
    b0 = float(intercept_init)
    r = y - X @ beta - b0
    vsum = float(v.sum())
    vX = X * v[:, None]
    col_w2 = (vX * X).sum(axis=0) / n
    half_lam = 0.5 * lam

    def _objective():
        return float(v @ (r * r)) / n + lam * float(np.abs(beta).sum())

    obj_path = []
    converged = False
    sweeps = 0
    while sweeps < max_sweeps:
        delta0 = float(v @ r) / vsum
        b0 += delta0
        r -= delta0
        max_delta = max(
            abs(delta0), _sweep(X, vX, col_w2, active, r, beta, half_lam, n, False)
        )
        sweeps += 1
        obj_path.append(_objective())
        if max_delta < tol:
            converged = True
            break
        while sweeps < max_sweeps:
            delta0 = float(v @ r) / vsum
            b0 += delta0
            r -= delta0
            max_delta = max(
                abs(delta0), _sweep(X, vX, col_w2, active, r, beta, half_lam, n, True)
            )
            sweeps += 1
            obj_path.append(_objective())
            if max_delta < tol:
                break

    return beta, b0, sweeps, np.asarray(obj_path), converged
