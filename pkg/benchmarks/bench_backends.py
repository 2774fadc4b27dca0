"""Benchmark the compiled coordinate-descent kernel against the pure-numpy
fallback on the short-sample p > n problem the harness runs per repetition.

Usage: python benchmarks/bench_backends.py [--n 336] [--p 487] [--repeats 3]
"""

import argparse
import time

import numpy as np

from horizonpi import _cd_py
from horizonpi._backend import backend_name
from horizonpi.linmodel import DesignMatrix, default_lambda_grid, _response_scale

try:
    from horizonpi import _cd_fast
except ImportError:
    _cd_fast = None


def make_problem(n, p, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[rng.choice(p, 5, replace=False)] = rng.uniform(-1, 1, 5)
    y = X @ beta + 54.1 * rng.standard_t(3, n)
    Xd = DesignMatrix.from_values(X).standardize()
    return Xd, y


def run_path(kernel, Xd, y, grid):
    values = np.asfortranarray(Xd.values)
    s = _response_scale(y)
    ys = y / s
    active = (~Xd.constant_mask).astype(np.uint8)
    v = np.ones(len(y))
    beta = np.zeros(Xd.p)
    sweeps = 0
    for lam in grid:
        beta, b0, ns, _, conv = kernel(values, ys, v, lam / s, beta, 0.0, active, 1e-7, 10000)
        sweeps += ns
    return sweeps


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=336)
    ap.add_argument("--p", type=int, default=487)
    ap.add_argument("--n-lambdas", type=int, default=20)
    ap.add_argument("--min-ratio", type=float, default=0.05,
                    help="smallest lambda as a fraction of lambda_max; the "
                    "dense tail below ~0.05 makes the fallback very slow")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    Xd, y = make_problem(args.n, args.p)
    grid = default_lambda_grid(Xd, y, n_values=args.n_lambdas, min_ratio=args.min_ratio)
    print(f"active backend: {backend_name()}")
    print(f"problem: n={args.n} p={args.p}, warm-started path over {len(grid)} lambdas")

    kernels = [("python", _cd_py.lasso_cd)]
    if _cd_fast is not None:
        kernels.append(("cython", _cd_fast.lasso_cd))
    else:
        print("compiled kernel not built; benchmarking the fallback only")

    timings = {}
    for name, kernel in kernels:
        best = float("inf")
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            sweeps = run_path(kernel, Xd, y, grid)
            best = min(best, time.perf_counter() - t0)
        timings[name] = best
        print(f"  {name:>7s}: {best:8.3f}s  ({sweeps} sweeps)")

    if "cython" in timings:
        print(f"speedup: {timings['python'] / timings['cython']:.1f}x")


if __name__ == "__main__":
    main()
