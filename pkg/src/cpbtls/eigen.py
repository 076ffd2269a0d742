"""Cyclic Jacobi eigensolver for small real symmetric matrices.

The solver sweeps the strict upper triangle in fixed row-major order and
applies Givens rotations until the off-diagonal Frobenius norm drops below
1e-12 times the diagonal Frobenius norm. Everything downstream (sorting,
sign fixing) is deterministic, so repeated runs on the same matrix produce
bit-identical output. Matrices are small (the models top out at 32 x 32;
the solver accepts up to 64 x 64), where Jacobi is accurate and fast and
its rotations preserve orthogonality to machine precision.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._accel import jit_kernel

__all__ = ["EigenSystem", "ConvergenceError", "eigendecompose", "residual_norm"]

MAX_DIM = 64
REL_TOL = 1e-12
MAX_SWEEPS = 100
SIGN_TOL = 1e-12


class ConvergenceError(RuntimeError):
    """Raised when the sweep limit is hit before the off-diagonal norm drops.

    Attributes
    ----------
    residual : float
        Off-diagonal Frobenius norm at the point of failure.
    sweeps : int
        Number of full sweeps performed.
    """

    def __init__(self, residual, sweeps):
        super().__init__(
            f"Jacobi sweep limit reached after {sweeps} sweeps; "
            f"off-diagonal norm {residual:.3e}"
        )
        self.residual = residual
        self.sweeps = sweeps


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (ascending) and matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray
    sweeps: int

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@jit_kernel
def _jacobi_sweeps(a, v, rel_tol, max_sweeps):
    # Diagonalizes a in place, accumulating rotations into v (preloaded with
    # the identity). Returns (sweeps, off_norm, converged).
    n = a.shape[0]
    sweeps = 0
    while True:
        off2 = 0.0
        dia2 = 0.0
        for i in range(n):
            dia2 += a[i, i] * a[i, i]
            for j in range(i + 1, n):
                off2 += 2.0 * a[i, j] * a[i, j]
        off = math.sqrt(off2)
        if off == 0.0 or off <= rel_tol * math.sqrt(dia2):
            return sweeps, off, True
        if sweeps >= max_sweeps:
            return sweeps, off, False
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                a[p, p] -= t * apq
                a[q, q] += t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    if i != p and i != q:
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = c * aip - s * aiq
                        a[p, i] = a[i, p]
                        a[i, q] = s * aip + c * aiq
                        a[q, i] = a[i, q]
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip - s * viq
                    v[i, q] = s * vip + c * viq


@jit_kernel
def _sort_canonical(a, v, sign_tol):
    # a holds the diagonalized matrix, v the accumulated rotations. Sorts
    # columns by eigenvalue with a stable insertion sort (ties keep their
    # rotation order) and flips each column so its first component larger
    # than sign_tol in magnitude is positive.
    n = a.shape[0]
    idx = np.arange(n)
    for i in range(1, n):
        k = idx[i]
        key = a[k, k]
        j = i - 1
        while j >= 0 and a[idx[j], idx[j]] > key:
            idx[j + 1] = idx[j]
            j -= 1
        idx[j + 1] = k
    values = np.empty(n)
    vectors = np.empty((n, n))
    for col in range(n):
        src = idx[col]
        values[col] = a[src, src]
        flip = 1.0
        for i in range(n):
            x = v[i, src]
            if x > sign_tol or x < -sign_tol:
                if x < 0.0:
                    flip = -1.0
                break
        for i in range(n):
            vectors[i, col] = flip * v[i, src]
    return values, vectors


@jit_kernel
def _eig_sorted(a, rel_tol, max_sweeps, sign_tol):
    # Destroys a. Returns (converged, off_norm, sweeps, values, vectors).
    n = a.shape[0]
    v = np.eye(n)
    sweeps, off, converged = _jacobi_sweeps(a, v, rel_tol, max_sweeps)
    if not converged:
        return False, off, sweeps, np.zeros(n), np.zeros((n, n))
    values, vectors = _sort_canonical(a, v, sign_tol)
    return True, off, sweeps, values, vectors


def eigendecompose(matrix, max_sweeps: int = MAX_SWEEPS) -> EigenSystem:
    """Diagonalize a real symmetric matrix.

    Parameters
    ----------
    matrix : array_like
        Exactly symmetric square matrix, at most 64 x 64. The input is
        copied, never modified.
    max_sweeps : int
        Sweep budget before giving up (default 100).

    Returns
    -------
    EigenSystem
        Eigenvalues ascending; ``vectors[:, k]`` is the unit eigenvector of
        ``values[k]``, sign-fixed so its first component of magnitude above
        1e-12 is positive.

    Raises
    ------
    ValueError
        If the matrix is not square, not exactly symmetric, or too large.
    ConvergenceError
        If the sweep budget is exhausted; carries the off-diagonal norm.
    """
    a = np.array(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    n = a.shape[0]
    if n < 1 or n > MAX_DIM:
        raise ValueError(f"matrix dimension must be 1..{MAX_DIM}, got {n}")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix must be exactly symmetric")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    converged, off, sweeps, values, vectors = _eig_sorted(
        a, REL_TOL, max_sweeps, SIGN_TOL
    )
    if not converged:
        raise ConvergenceError(off, sweeps)
    return EigenSystem(values=values, vectors=vectors, sweeps=sweeps)


def residual_norm(system: EigenSystem, matrix) -> float:
    """Worst relative residual ``max |H v - lambda v| / (1 + |lambda|)``.

    The maximum runs over all entries of all eigenpairs; values near machine
    epsilon indicate a fully converged decomposition.
    """
    h = np.asarray(matrix, dtype=np.float64)
    r = h @ system.vectors - system.vectors * system.values
    return float(np.max(np.abs(r) / (1.0 + np.abs(system.values))))
