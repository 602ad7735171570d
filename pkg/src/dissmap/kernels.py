"""Hot numeric kernels for the per-frequency quotient minimization.

The backward-error optimization evaluates, many thousands of times per
sweep, the quotient

    f(a) = 2 ||P a||^2 / ||Qm a||^2 - |a* T a|^2 / ||Qm a||^4

over unit vectors a built from real coordinates. The evaluation is
compiled with numba when available; set DISSMAP_DISABLE_NUMBA=1 to force
the pure-numpy path (benchmarks/bench_kernels.py compares both).
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("DISSMAP_DISABLE_NUMBA", "") not in ("", "0")


def _quotient_value_numpy(P, Qm, T, v):
    k = T.shape[0]
    a = v[:k] + 1j * v[k:]
    na = np.sqrt(np.sum(v * v))
    if na == 0.0:
        return np.inf
    a = a / na
    Pa = P @ a
    Qa = Qm @ a
    den = np.real(np.vdot(Qa, Qa))
    if den <= 0.0:
        return np.inf
    num1 = 2.0 * np.real(np.vdot(Pa, Pa))
    ta = np.vdot(a, T @ a)
    return num1 / den - (ta.real * ta.real + ta.imag * ta.imag) / (den * den)


def _make_numba_kernel():
    from numba import njit

    @njit(cache=True, fastmath=False)
    def kernel(P, Qm, T, v):  # pragma: no cover - compiled
        k = T.shape[0]
        na = 0.0
        for i in range(2 * k):
            na += v[i] * v[i]
        if na == 0.0:
            return np.inf
        na = np.sqrt(na)
        a = np.empty(k, dtype=np.complex128)
        for i in range(k):
            a[i] = complex(v[i], v[k + i]) / na
        Pa = P @ a
        Qa = Qm @ a
        den = 0.0
        for i in range(Qa.shape[0]):
            den += Qa[i].real * Qa[i].real + Qa[i].imag * Qa[i].imag
        if den <= 0.0:
            return np.inf
        num1 = 0.0
        for i in range(Pa.shape[0]):
            num1 += Pa[i].real * Pa[i].real + Pa[i].imag * Pa[i].imag
        num1 *= 2.0
        Ta = T @ a
        ta = complex(0.0, 0.0)
        for i in range(k):
            ta += np.conj(a[i]) * Ta[i]
        return num1 / den - (ta.real * ta.real + ta.imag * ta.imag) / (den * den)

    return kernel


if _DISABLE:
    quotient_value = _quotient_value_numpy
    BACKEND = "numpy"
else:
    try:
        quotient_value = _make_numba_kernel()
        BACKEND = "numba"
    except ImportError:
        quotient_value = _quotient_value_numpy
        BACKEND = "numpy"
