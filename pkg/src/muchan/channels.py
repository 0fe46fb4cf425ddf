"""Channel representations: Kraus and Choi forms, complementary channels,
operator systems, direct sums, Schur channels.

Choi index convention
---------------------
The Choi matrix of a channel taking n x n inputs to m x m outputs is the
(m n) x (m n) matrix

    J = sum_{j,k} Phi(E_jk) (x) E_jk        (output factor first),

equivalently ``J = sum_k vec(A_k) vec(A_k)*`` under the row-vec
convention.  Worked 2 x 2 example to pin the ordering: for the identity
channel on M_2, ``vec(I_2) = (1, 0, 0, 1)`` and

    J = outer(vec(I_2), vec(I_2)) =
        [[1, 0, 0, 1],
         [0, 0, 0, 0],
         [0, 0, 0, 0],
         [1, 0, 0, 1]],

whose row index is (output, input) = (j, a) at position j*n + a.  The
partial trace of J over the *output* factor is the n x n identity for
every trace-preserving channel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .linalg import (as_matrix, dagger, dirsum, frob_inner, numerical_rank,
                     unvec, vec)
from .tolerances import DEFAULT_TOL, Tolerance

__all__ = [
    "KrausChannel", "ChoiMatrix", "OperatorSystemBasis",
    "choi_of", "minimal_kraus", "apply", "complementary",
    "operator_system", "direct_sum", "schur_channel", "identity_channel",
    "dephasing_channel",
]


class KrausChannel:
    """A completely positive trace-preserving map given by Kraus matrices.

    ``kraus`` is a nonempty list of m x n matrices A_k with
    ``sum_k A_k* A_k = I_n`` (checked on construction unless the channel
    is built through :meth:`unchecked`).  Instances are immutable.
    """

    __slots__ = ("kraus", "dim_in", "dim_out")

    def __init__(self, kraus, tol: Tolerance = DEFAULT_TOL, *, _validate=True):
        ops = tuple(as_matrix(a, "Kraus operator") for a in kraus)
        if not ops:
            raise ValidationError("Kraus list must be nonempty")
        m, n = ops[0].shape
        if any(a.shape != (m, n) for a in ops):
            raise ValidationError("all Kraus operators must share one shape")
        if _validate:
            tp = sum(dagger(a) @ a for a in ops)
            defect = np.linalg.norm(tp - np.eye(n))
            if defect > tol.eps_eq * max(1.0, np.sqrt(n)):
                raise ValidationError(
                    f"Kraus list is not trace-preserving: ||sum A*A - I|| = {defect:.3e}")
        for a in ops:
            a.setflags(write=False)
        object.__setattr__(self, "kraus", ops)
        object.__setattr__(self, "dim_in", n)
        object.__setattr__(self, "dim_out", m)

    def __setattr__(self, *_):
        raise AttributeError("KrausChannel is immutable")

    @classmethod
    def unchecked(cls, kraus) -> "KrausChannel":
        """Build without the trace-preservation check (test fixtures)."""
        return cls(kraus, _validate=False)

    def __len__(self) -> int:
        return len(self.kraus)

    def __repr__(self) -> str:
        return (f"KrausChannel({self.dim_in}->{self.dim_out}, "
                f"{len(self.kraus)} Kraus operators)")

    def __call__(self, x) -> np.ndarray:
        return apply(self, x)

    def is_unital(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        """Whether Phi(I) = I (requires square dimensions)."""
        if self.dim_in != self.dim_out:
            return False
        s = sum(a @ dagger(a) for a in self.kraus)
        return np.linalg.norm(s - np.eye(self.dim_out)) <= tol.eps_eq * max(
            1.0, np.sqrt(self.dim_out))

    def stacked(self) -> np.ndarray:
        """Kraus operators as one (r, m, n) array."""
        return np.array(self.kraus)


class ChoiMatrix:
    """Choi representation of a channel, output (x) input index order.

    Validated to be Hermitian and PSD within tolerance, with the partial
    trace over the output factor equal to the identity.
    """

    __slots__ = ("matrix", "dim_in", "dim_out")

    def __init__(self, matrix, dim_in: int, dim_out: int,
                 tol: Tolerance = DEFAULT_TOL, *, _validate=True):
        m = as_matrix(matrix, "Choi matrix")
        if m.shape != (dim_in * dim_out, dim_in * dim_out):
            raise ValidationError(
                f"Choi matrix must be {dim_in * dim_out} square, got {m.shape}")
        if _validate:
            scale = max(1.0, float(np.linalg.norm(m)))
            if np.linalg.norm(m - dagger(m)) > tol.eps_eq * scale:
                raise ValidationError("Choi matrix is not Hermitian within tolerance")
            w = np.linalg.eigvalsh((m + dagger(m)) / 2)
            wmax = max(float(w[-1]), 0.0)
            if w[0] < -tol.eps_rank * max(wmax, 1e-300):
                raise ValidationError(
                    f"Choi matrix is not PSD: smallest eigenvalue {w[0]:.3e}")
            pt = partial_trace_output(m, dim_out, dim_in)
            if np.linalg.norm(pt - np.eye(dim_in)) > tol.eps_eq * max(1.0, np.sqrt(dim_in)):
                raise ValidationError(
                    "partial trace over the output factor is not the identity")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dim_in", dim_in)
        object.__setattr__(self, "dim_out", dim_out)

    def __setattr__(self, *_):
        raise AttributeError("ChoiMatrix is immutable")

    @classmethod
    def unchecked(cls, matrix, dim_in: int, dim_out: int) -> "ChoiMatrix":
        return cls(matrix, dim_in, dim_out, _validate=False)

    def rank(self, tol: Tolerance = DEFAULT_TOL) -> int:
        return numerical_rank(self.matrix, tol)

    def __repr__(self) -> str:
        return f"ChoiMatrix({self.dim_in}->{self.dim_out})"


@dataclass(frozen=True)
class OperatorSystemBasis:
    """Orthonormal basis of the operator system span{A_k* A_j} of a channel."""

    dim: int
    basis: tuple
    s: int


def partial_trace_output(j: np.ndarray, dim_out: int, dim_in: int) -> np.ndarray:
    """Trace the (leading) output factor out of a Choi matrix."""
    return np.einsum("jajb->ab", j.reshape(dim_out, dim_in, dim_out, dim_in))


def choi_of(phi: KrausChannel, tol: Tolerance = DEFAULT_TOL) -> ChoiMatrix:
    """Choi matrix ``sum_k vec(A_k) vec(A_k)*`` of a Kraus channel."""
    vecs = np.array([vec(a) for a in phi.kraus])
    j = np.einsum("ki,kj->ij", vecs, vecs.conj())
    return ChoiMatrix(j, phi.dim_in, phi.dim_out, tol)


def minimal_kraus(j: ChoiMatrix, tol: Tolerance = DEFAULT_TOL) -> KrausChannel:
    """Minimal Kraus representation from the Choi eigendecomposition.

    Returns exactly ``numerical_rank(J)`` operators ``unvec(sqrt(l) v)``,
    ordered by descending eigenvalue, each eigenvector's global phase
    fixed by making its largest-magnitude entry real positive.  The list
    is pairwise orthogonal in the Frobenius inner product.
    """
    w, v = np.linalg.eigh(j.matrix)
    wmax = max(float(w[-1]), 0.0)
    neg = float(w[0])
    if neg < -tol.eps_rank * max(wmax, 1e-300):
        raise ValidationError(
            f"Choi matrix is not PSD: offending eigenvalue {neg:.6e}")
    r = numerical_rank(j.matrix, tol)
    order = np.argsort(w)[::-1][:r]
    ops = []
    for i in order:
        col = v[:, i]
        k = int(np.argmax(np.abs(col)))
        col = col * (np.conj(col[k]) / abs(col[k]))
        ops.append(np.sqrt(w[i]) * unvec(col, j.dim_out, j.dim_in))
    return KrausChannel(ops, tol)


def apply(phi: KrausChannel, x) -> np.ndarray:
    """Evaluate ``Phi(X) = sum_k A_k X A_k*``."""
    x = as_matrix(x, "input")
    if x.shape != (phi.dim_in, phi.dim_in):
        raise ValidationError(
            f"input must be {phi.dim_in}x{phi.dim_in}, got {x.shape}")
    out = np.zeros((phi.dim_out, phi.dim_out), dtype=complex)
    for a in phi.kraus:
        out += a @ x @ dagger(a)
    return out


def _is_minimal(phi: KrausChannel, tol: Tolerance) -> bool:
    vecs = np.array([vec(a) for a in phi.kraus])
    return numerical_rank(vecs, tol) == len(phi.kraus)


def minimize_kraus(phi: KrausChannel, tol: Tolerance = DEFAULT_TOL) -> KrausChannel:
    """Return ``phi`` itself if its Kraus list is minimal, else re-derive."""
    if _is_minimal(phi, tol):
        return phi
    return minimal_kraus(choi_of(phi, tol), tol)


def complementary(phi: KrausChannel, tol: Tolerance = DEFAULT_TOL) -> KrausChannel:
    """Complementary channel of a minimal Kraus representation.

    For a channel with minimal Kraus list A_1..A_r this is the n -> r
    channel with entries ``Psi(X)[j, k] = Tr(A_k* A_j X)``.  A non-minimal
    input is minimized first.  Mixing the Kraus list by an isometry V
    conjugates the output: the list B_k = sum_j V(k,j) A_j has
    complementary V Psi(.) V*.
    """
    phi = minimize_kraus(phi, tol)
    r, n = len(phi.kraus), phi.dim_in
    # Choi of Psi, assembled from Psi(E_ab)[j,k] = (A_k^* A_j)[b, a]
    gram = np.empty((r, r, n, n), dtype=complex)
    for jj in range(r):
        for kk in range(r):
            gram[jj, kk] = dagger(phi.kraus[kk]) @ phi.kraus[jj]
    jpsi = np.einsum("jkba->jakb", gram).reshape(r * n, r * n)
    return minimal_kraus(ChoiMatrix(jpsi, n, r, tol), tol)


def operator_system(phi: KrausChannel, tol: Tolerance = DEFAULT_TOL) -> OperatorSystemBasis:
    """Orthonormal basis of span{A_k* A_j} for a minimal Kraus list.

    The dimension s equals the rank of the r^2 x n^2 matrix whose rows
    are vec(A_k* A_j)*, and satisfies r <= s <= r^2.  The basis spans an
    operator system: it contains the identity direction and is closed
    under adjoints.
    """
    phi = minimize_kraus(phi, tol)
    r, n = len(phi.kraus), phi.dim_in
    rows = np.array([vec(dagger(phi.kraus[k]) @ phi.kraus[j]).conj()
                     for j in range(r) for k in range(r)])
    try:
        u, sv, vh = np.linalg.svd(rows, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ValidationError(f"operator system SVD failed: {exc}") from exc
    smax = sv[0] if sv.size else 0.0
    keep = int(np.count_nonzero(sv > tol.eps_rank * smax)) if smax > 0 else 0
    basis = tuple(unvec(vh[i].conj(), n, n) for i in range(keep))
    if not keep:
        raise ValidationError("operator system is empty; invalid channel")
    # identity must lie in the span (trace preservation)
    eye = np.eye(n, dtype=complex) / np.sqrt(n)
    proj = sum(frob_inner(b, eye) * b for b in basis)
    if np.linalg.norm(proj - eye) > max(tol.eps_eq, 1e-7):
        raise ValidationError("identity not contained in the operator system span")
    return OperatorSystemBasis(dim=n, basis=basis, s=keep)


def direct_sum(phi: KrausChannel, psi: KrausChannel,
               tol: Tolerance = DEFAULT_TOL, minimal: bool = False) -> KrausChannel:
    """Direct sum channel on M_{n+m}, block constructed.

    Kraus list is {A_i (+) 0} plus {0 (+) B_j}; off-diagonal blocks of the
    input are annihilated.  Choi ranks add.  With ``minimal=True`` the
    result is reduced to a minimal Kraus list.
    """
    if phi.dim_in != phi.dim_out or psi.dim_in != psi.dim_out:
        raise ValidationError("direct_sum requires square channels")
    n, m = phi.dim_in, psi.dim_in
    ops = [dirsum(a, np.zeros((m, m))) for a in phi.kraus]
    ops += [dirsum(np.zeros((n, n)), b) for b in psi.kraus]
    out = KrausChannel(ops, tol)
    return minimize_kraus(out, tol) if minimal else out


def schur_channel(c, tol: Tolerance = DEFAULT_TOL) -> KrausChannel:
    """Schur multiplication channel X -> C (.) X of a correlation matrix.

    ``c`` must be PSD with unit diagonal.  The Kraus operators are the
    diagonal matrices diag(sqrt(l_k) v_k) from the eigendecomposition of
    C, so the Choi rank equals rank(C).
    """
    c = as_matrix(c, "correlation matrix")
    n = c.shape[0]
    if c.shape != (n, n):
        raise ValidationError("correlation matrix must be square")
    if np.max(np.abs(np.diag(c) - 1)) > tol.eps_eq:
        raise ValidationError("correlation matrix must have unit diagonal")
    ch = (c + dagger(c)) / 2
    if np.linalg.norm(c - ch) > tol.eps_eq * max(1.0, np.linalg.norm(c)):
        raise ValidationError("correlation matrix must be Hermitian")
    w, v = np.linalg.eigh(ch)
    if w[0] < -tol.eps_rank * max(float(w[-1]), 1e-300):
        raise ValidationError(
            f"correlation matrix is not PSD: eigenvalue {w[0]:.3e}")
    ops = [np.diag(np.sqrt(max(float(w[i]), 0.0)) * v[:, i])
           for i in range(n) if w[i] > tol.eps_rank * max(float(w[-1]), 1e-300)]
    return KrausChannel(ops, tol)


def identity_channel(n: int) -> KrausChannel:
    return KrausChannel([np.eye(n, dtype=complex)])


def dephasing_channel(n: int) -> KrausChannel:
    """Completely dephasing channel: keeps the diagonal, kills the rest."""
    ops = []
    for i in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[i, i] = 1
        ops.append(e)
    return KrausChannel(ops)
