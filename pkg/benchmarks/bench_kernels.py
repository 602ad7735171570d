"""Benchmark the per-frequency quotient kernel: numba vs pure numpy.

The kernel is the innermost objective of the structured backward-error
optimization and is evaluated tens of thousands of times per frequency
sweep. Run with:

    python3 benchmarks/bench_kernels.py

Set DISSMAP_DISABLE_NUMBA=1 to check which backend the package selects.
"""

import time

import numpy as np

from dissmap import kernels


def bench(fn, P, Qm, T, vs, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        acc = 0.0
        for v in vs:
            acc += fn(P, Qm, T, v)
        best = min(best, time.perf_counter() - t0)
    return best, acc


def main():
    rng = np.random.default_rng(0)
    print(f"selected backend: {kernels.BACKEND}")
    numba_fn = None
    if kernels.BACKEND == "numba":
        numba_fn = kernels.quotient_value
    else:
        maybe = kernels._make_numba_kernel()
        if maybe is not None:
            numba_fn = maybe
    for k, n_evals in ((2, 20000), (6, 20000), (12, 10000)):
        r = 2 * k
        P = rng.standard_normal((r, k)) + 1j * rng.standard_normal((r, k))
        Qm = rng.standard_normal((r, k)) + 1j * rng.standard_normal((r, k))
        T = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        vs = [rng.standard_normal(2 * k) for _ in range(n_evals)]
        t_np, acc_np = bench(kernels._quotient_value_numpy, P, Qm, T, vs)
        line = f"k={k:2d}  numpy: {t_np / n_evals * 1e6:8.2f} us/eval"
        if numba_fn is not None:
            numba_fn(P, Qm, T, vs[0])  # compile outside the timer
            t_nb, acc_nb = bench(numba_fn, P, Qm, T, vs)
            speedup = t_np / t_nb
            dev = abs(acc_np - acc_nb) / max(1.0, abs(acc_np))
            line += (f"   numba: {t_nb / n_evals * 1e6:8.2f} us/eval"
                     f"   speedup: {speedup:5.1f}x   agreement: {dev:.2e}")
        else:
            line += "   numba: unavailable"
        print(line)


if __name__ == "__main__":
    main()
