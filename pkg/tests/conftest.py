import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_standardized(n, p, seed=0):
    """Random standardized design plus the generator used to build it."""
    from horizonpi.linmodel import DesignMatrix

    gen = np.random.default_rng(seed)
    X = DesignMatrix.from_values(gen.standard_normal((n, p))).standardize()
    return X, gen


def grid_search_lasso_p2(X, y, lam, span=3.0, step=1e-3):
    """Brute-force oracle for the p=2 lasso: exhaustive search of the
    objective over [-span, span]^2 at the given step, with the intercept
    profiled out exactly (centering), evaluated via the expanded
    quadratic form."""
    yc = y - y.mean()
    x1 = X[:, 0] - X[:, 0].mean()
    x2 = X[:, 1] - X[:, 1].mean()
    n = len(y)
    c0 = yc @ yc / n
    s1, s2 = x1 @ yc / n, x2 @ yc / n
    q1, q2, q12 = x1 @ x1 / n, x2 @ x2 / n, x1 @ x2 / n

    b = np.arange(-span, span + step / 2, step)
    absb = np.abs(b)
    best = (np.inf, 0.0, 0.0)
    for v1 in b:
        obj = (
            c0 - 2 * v1 * s1 - 2 * b * s2
            + v1 * v1 * q1 + b * b * q2 + 2 * v1 * b * q12
            + lam * (abs(v1) + absb)
        )
        k = int(np.argmin(obj))
        if obj[k] < best[0]:
            best = (float(obj[k]), float(v1), float(b[k]))
    return np.array([best[1], best[2]])
