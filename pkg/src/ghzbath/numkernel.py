"""Dense complex linear algebra used throughout the package.

All matrices are plain ``numpy`` arrays of dtype ``complex128``.  The
functions here are thin, checked wrappers: they validate shapes and
finiteness and reject inputs outside the regime the rest of the code is
written for.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

#: ``expm`` refuses matrices whose 1-norm exceeds this.
EXPM_NORM_GUARD = 1e4


class HermitianEigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kron(a, b) -> np.ndarray:
    """Tensor product with ``a`` as the leftmost (most significant) factor."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*factors) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for f in factors:
        out = kron(out, f)
    return out


def hermiticity_error(h) -> float:
    """Relative Frobenius asymmetry ``||h - h^dag|| / ||h||`` (0 for the zero matrix)."""
    h = np.asarray(h)
    scale = np.linalg.norm(h)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(h - h.conj().T) / scale)


def eig_hermitian(h, tol: float = 1e-12) -> HermitianEigenDecomposition:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.

    Degenerate eigenspaces come back in whatever basis LAPACK picks;
    callers must only rely on the spanned subspaces.
    """
    h = as_matrix(h)
    asym = hermiticity_error(h)
    if asym > tol:
        raise ValueError(f"matrix is not Hermitian: relative asymmetry {asym:.3e} > {tol:.1e}")
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return HermitianEigenDecomposition(w, v)


def expm(m) -> np.ndarray:
    m = as_matrix(m)
    norm1 = np.linalg.norm(m, 1)
    if norm1 > EXPM_NORM_GUARD:
        raise ValueError(f"expm: ||m||_1 = {norm1:.3e} exceeds guard {EXPM_NORM_GUARD:.0e}")
    out = scipy.linalg.expm(m)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("expm produced non-finite entries")
    return out


def frobenius_distance(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def dagger(a) -> np.ndarray:
    return np.asarray(a).conj().T


def phase_align(v) -> np.ndarray:
    """Rotate a state vector so its largest-magnitude amplitude is real positive."""
    v = np.asarray(v, dtype=complex)
    k = int(np.argmax(np.abs(v)))
    if v[k] == 0:
        return v.copy()
    return v * (abs(v[k]) / v[k])


def phase_aligned_distance(a, b) -> float:
    """``min_phi ||a - e^{i phi} b||`` for two state vectors."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))
