"""Eigendecomposition of real symmetric matrices by cyclic Jacobi rotations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .hamiltonian import SectorMatrix

MAX_SWEEPS = 100
REL_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues in ascending order; column ``j`` of ``eigenvectors`` is ``u_j``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]


def _off_norm(a: np.ndarray) -> float:
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return float(np.sqrt(np.dot(off, off)))


def jacobi_eigh(matrix: np.ndarray, tol: float = REL_TOL, max_sweeps: int = MAX_SWEEPS):
    """Cyclic-by-row Jacobi on a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` unsorted.  Convergence is
    declared when the off-diagonal Frobenius norm drops to
    ``tol * ||A||_F``.
    """
    a = np.array(matrix, dtype=float, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    v = np.eye(n)
    threshold = tol * float(np.linalg.norm(a))

    off = _off_norm(a)
    for _ in range(max_sweeps):
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                h = a[q, q] - a[p, p]
                if abs(apq) < 1e-150 * abs(h):
                    t = apq / h
                else:
                    theta = h / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        off = _off_norm(a)
    else:
        if off > threshold:
            raise NumericalError(
                f"Jacobi did not converge in {max_sweeps} sweeps; "
                f"off-diagonal norm {off:.3e} > {threshold:.3e}"
            )
    return np.diag(a).copy(), v


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude component positive; argmax picks the lowest index on ties
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def decompose(matrix: SectorMatrix | np.ndarray) -> SpectralDecomposition:
    """Full eigendecomposition of the sector matrix ``D``.

    Deterministic: eigenvalues ascending (stable on ties), eigenvector signs
    fixed so the largest-magnitude component is positive.
    """
    entries = matrix.entries if isinstance(matrix, SectorMatrix) else np.asarray(matrix, float)
    values, vectors = jacobi_eigh(entries)
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = _fix_signs(vectors[:, order])
    values.setflags(write=False)
    vectors.setflags(write=False)
    return SpectralDecomposition(eigenvalues=values, eigenvectors=vectors)
