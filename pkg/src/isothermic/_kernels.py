"""Hot kernels for truncated bivariate Taylor arithmetic.

Coefficient arrays have shape ``(K + 1, K + 1, n)``: entry ``[i, j, p]`` is the
normalized Taylor coefficient of ``u1**i * u2**j`` at batch point ``p``.  Entries
with ``i + j > K`` are always zero.

Two backends implement the same two kernels:

* ``numba``: explicit loops compiled with ``@njit``.
* ``numpy``: slice-broadcast loops over the coefficient triangle.

The numba path is used when numba imports and ``ISOTHERMIC_NUMBA`` is not set
to ``0``.  The flag is read once at import; call :func:`set_backend` to switch
at run time (tests and the benchmark do this).
"""

import os

import numpy as np

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def _env_wants_numba():
    return os.environ.get("ISOTHERMIC_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


# ---------------------------------------------------------------------------
# numpy backend


def _triangle_mask(K):
    idx = np.arange(K + 1)
    return (idx[:, None] + idx[None, :]) <= K


_MASKS = {}


def _mask(K):
    m = _MASKS.get(K)
    if m is None:
        m = _MASKS[K] = _triangle_mask(K)[:, :, None]
    return m


def mul_numpy(a, b, K):
    out = np.zeros((K + 1, K + 1, a.shape[2]))
    for i in range(K + 1):
        for j in range(K + 1 - i):
            aij = a[i, j]
            if not aij.any():
                continue
            out[i:, j:] += aij * b[: K + 1 - i, : K + 1 - j]
    out *= _mask(K)
    return out


def compose_numpy(fk, delta, K):
    """Horner evaluation of ``sum_k fk[k] * delta**k`` (``delta`` has zero constant term)."""
    out = np.zeros((K + 1, K + 1, delta.shape[2]))
    out[0, 0] = fk[K]
    for k in range(K - 1, -1, -1):
        out = mul_numpy(out, delta, K)
        out[0, 0] += fk[k]
    return out


# ---------------------------------------------------------------------------
# numba backend

if HAS_NUMBA:

    @numba.njit(cache=True)
    def mul_numba(a, b, K):
        n = a.shape[2]
        out = np.zeros((K + 1, K + 1, n))
        for i in range(K + 1):
            for j in range(K + 1 - i):
                for k in range(K + 1 - i - j):
                    for l in range(K + 1 - i - j - k):
                        for p in range(n):
                            out[i + k, j + l, p] += a[i, j, p] * b[k, l, p]
        return out

    @numba.njit(cache=True)
    def compose_numba(fk, delta, K):
        n = delta.shape[2]
        out = np.zeros((K + 1, K + 1, n))
        for p in range(n):
            out[0, 0, p] = fk[K, p]
        for k in range(K - 1, -1, -1):
            out = mul_numba(out, delta, K)
            for p in range(n):
                out[0, 0, p] += fk[k, p]
        return out

else:  # pragma: no cover
    mul_numba = None
    compose_numba = None


_BACKEND = "numba" if (HAS_NUMBA and _env_wants_numba()) else "numpy"


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"``; returns the previous backend name."""
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not available")
    previous, _BACKEND = _BACKEND, name
    return previous


def get_backend():
    return _BACKEND


def trunc_mul(a, b, K):
    """Truncated product of two flattened coefficient arrays."""
    if _BACKEND == "numba":
        return mul_numba(np.ascontiguousarray(a), np.ascontiguousarray(b), K)
    return mul_numpy(a, b, K)


def compose(fk, delta, K):
    """Evaluate a univariate Taylor series ``fk`` (shape ``(K+1, n)``) at ``delta``."""
    if _BACKEND == "numba":
        return compose_numba(np.ascontiguousarray(fk), np.ascontiguousarray(delta), K)
    return compose_numpy(fk, delta, K)
