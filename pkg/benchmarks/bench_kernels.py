#!/usr/bin/env python3
"""Time the numpy and numba kernel backends on the hot paths.

Runs the Monte Carlo evidence sweep (the dominant cost of Bayes scans and
the approximation-error experiment) and the dense log-likelihood block
(the quadrature inner loop) under both backends, prints a table, and
reports the agreement between the paths.

Usage: python benchmarks/bench_kernels.py [--B 20000] [--n 400] [--k 2]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from glmevidence import ModelIndex, SimConfig, simulate_dataset
from glmevidence import kernels


def time_call(fn, repeats=3):
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--B", type=int, default=20000)
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    ds, _, _ = simulate_dataset(
        SimConfig(n=args.n, p=max(args.k, 4), q_true=args.k, amplitude=1.0, seed=args.seed)
    )
    J = ModelIndex(tuple(range(1, args.k + 1)))
    X = ds.columns(J)
    betas = np.linspace(-1.0, 1.0, 512 * args.k).reshape(512, args.k)

    print(f"n={args.n} k={args.k} B={args.B}  (MC sweep = B draws x n observations)")
    print(f"{'backend':<16}{'mc sweep':>12}{'block/512':>12}{'logZ':>16}")

    results = {}
    for backend in ("numpy", "numba"):
        kernels.set_backend(backend)
        kernels.mc_evidence_sums(X, ds.Y, ds.family.code, 1, 64, 1.0)  # warm / compile
        kernels.loglik_block(X, ds.Y, ds.family.code, betas[:4])

        t_mc, sums = time_call(
            lambda: kernels.mc_evidence_sums(X, ds.Y, ds.family.code, args.seed, args.B, 1.0)
        )
        t_blk, _ = time_call(
            lambda: kernels.loglik_block(X, ds.Y, ds.family.code, betas)
        )
        M, s1, _ = sums
        logz = M + math.log(s1 / args.B)
        results[backend] = logz
        print(f"{backend:<16}{t_mc * 1e3:>10.1f}ms{t_blk * 1e3:>10.2f}ms{logz:>16.8f}")

    if "GLMEVIDENCE_MC_DTYPE" not in __import__("os").environ:
        kernels.set_backend("numpy")
        t_mc, sums = time_call(
            lambda: kernels.mc_evidence_sums(
                X, ds.Y, ds.family.code, args.seed, args.B, 1.0, dtype=np.float64
            )
        )
        M, s1, _ = sums
        print(f"{'numpy fp64':<16}{t_mc * 1e3:>10.1f}ms{'':>12}{M + math.log(s1 / args.B):>16.8f}")

    gap = abs(results["numpy"] - results["numba"])
    print(f"\nbackend log-evidence gap: {gap:.2e}")


if __name__ == "__main__":
    main()
