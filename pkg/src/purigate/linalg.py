"""Cyclic Jacobi eigenvalue solver for small dense Hermitian matrices."""

import numpy as np
from numba import njit

HERMITIAN_TOL = 1e-8
OFFDIAG_TOL = 1e-14
MAX_SWEEPS = 60


@njit(cache=True)
def _jacobi_eigvals(a, tol, max_sweeps):
    n = a.shape[0]
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += a[i, j].real ** 2 + a[i, j].imag ** 2
    scale = np.sqrt(scale)
    if scale == 0.0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += a[i, j].real ** 2 + a[i, j].imag ** 2
        if np.sqrt(2.0 * off) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                # unit phase taking a[p, q] to the positive real axis
                ph = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                phc = np.conj(ph)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * phc * akq
                    a[k, q] = s * akp + c * phc * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * ph * aqk
                    a[q, k] = s * apk + c * ph * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    out = np.empty(n)
    for i in range(n):
        out[i] = a[i, i].real
    return out


def hermitian_eigvals(m, tol=OFFDIAG_TOL):
    """All eigenvalues of a Hermitian matrix in ascending order.

    Raises ValueError if ``m`` is not square or deviates from Hermitian by more
    than 1e-8 elementwise.
    """
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size and np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    return np.sort(_jacobi_eigvals(a, tol, MAX_SWEEPS))


def hermitian_min_eig(m):
    """Smallest eigenvalue of a Hermitian matrix (dimension <= 64 in practice)."""
    return float(hermitian_eigvals(m)[0])
