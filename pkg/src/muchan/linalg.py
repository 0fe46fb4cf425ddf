"""Dense complex matrix kernel.

Conventions fixed here and inherited by every other module:

* Matrices are numpy ``complex128`` arrays, row-major.
* ``vec`` stacks rows (``vec(A)[(j)*cols + k] = A[j, k]``), so
  ``vec(A X B^T) = kron(A, B) @ vec(X)``.  Never mix with column stacking.
* Numerical rank counts singular values above ``eps_rank`` times the
  largest one, for Hermitian inputs too (uniform behavior near defective
  matrices).
* Random isometries are Haar distributed and reproducible: the RNG is
  numpy's ``default_rng`` (PCG64) and the QR phase ambiguity is fixed by
  making the triangular factor's diagonal real positive.
"""
from __future__ import annotations

import numpy as np

from .exceptions import NumericalError, ValidationError
from .tolerances import DEFAULT_TOL, Tolerance

__all__ = [
    "as_matrix", "vec", "unvec", "dagger", "frob_inner", "numerical_rank",
    "haar_isometry", "haar_unitary", "kron", "schur_product", "dirsum",
    "is_unitary", "unitarity_defect",
]


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValidationError(f"{name} must be a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValidationError(f"{name} contains non-finite entries")
    return m


def vec(a) -> np.ndarray:
    """Row-stacking vectorization: entry (j, k) lands at index j*cols + k."""
    return np.asarray(a, dtype=complex).reshape(-1)


def unvec(v, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec` for a rows x cols matrix."""
    v = np.asarray(v, dtype=complex)
    if v.size != rows * cols:
        raise ValidationError(f"cannot unvec length-{v.size} vector to {rows}x{cols}")
    return v.reshape(rows, cols)


def dagger(a) -> np.ndarray:
    return np.asarray(a).conj().T


def frob_inner(a, b) -> complex:
    """Frobenius inner product Tr(a* b), conjugate-linear in ``a``."""
    return complex(np.sum(np.conj(a) * b))


def numerical_rank(m, tol: Tolerance = DEFAULT_TOL) -> int:
    """Number of singular values above ``eps_rank`` times the largest.

    Returns 0 for the zero matrix.  Raises :class:`NumericalError` if the
    SVD does not converge.
    """
    m = as_matrix(m)
    try:
        s = np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"SVD failed to converge on a {m.shape[0]}x{m.shape[1]} matrix: {exc}"
        ) from exc
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.eps_rank * s[0]))


def haar_isometry(n_rows: int, n_cols: int, seed: int) -> np.ndarray:
    """Haar-random isometry V with ``V* V = I``, deterministic per seed.

    A standard complex Gaussian matrix is orthonormalized by QR; the
    diagonal phases of the triangular factor are absorbed into the
    columns, which makes the distribution Haar and the output unique.
    """
    if n_rows < n_cols:
        raise ValidationError(f"need n_rows >= n_cols, got {n_rows} < {n_cols}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n_rows, n_cols))
         + 1j * rng.standard_normal((n_rows, n_cols))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return q


def haar_unitary(n: int, seed: int) -> np.ndarray:
    return haar_isometry(n, n, seed)


def kron(a, b) -> np.ndarray:
    """Tensor product matching the row-vec convention."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def schur_product(a, b) -> np.ndarray:
    """Entrywise product; shapes must agree."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValidationError(f"shape mismatch in schur product: {a.shape} vs {b.shape}")
    return a * b


def dirsum(a, b) -> np.ndarray:
    """Block-diagonal direct sum of two matrices."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=complex)
    out[:a.shape[0], :a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def unitarity_defect(u) -> float:
    u = np.asarray(u)
    n = u.shape[1]
    return float(np.linalg.norm(dagger(u) @ u - np.eye(n)))


def is_unitary(u, tol: Tolerance = DEFAULT_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return unitarity_defect(u) <= tol.eps_eq * max(1.0, np.sqrt(u.shape[0]))
