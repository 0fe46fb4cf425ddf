"""Constructive decomposition algorithms.

* ``zero_diagonal_unitary``: for traceless Z, a unitary U with U Z U*
  having (numerically) vanishing diagonal, by deflation.
* ``decompose_low_dim``: channels whose operator system has dimension at
  most 3 are mixed unitary with rank equal to their Choi rank; the proof
  is run as an algorithm.
* ``toroidal_decompose_small``: convex decompositions of 2x2 and 3x3
  correlation matrices into unimodular rank-one factors.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .analysis import MixedUnitaryDecomposition
from .channels import KrausChannel, complementary, minimize_kraus, operator_system, schur_channel
from .exceptions import NumericalError, ValidationError
from .linalg import as_matrix, dagger, vec, unvec
from .tolerances import DEFAULT_TOL, Tolerance

__all__ = [
    "ToroidalDecomposition", "zero_diagonal_unitary", "decompose_low_dim",
    "toroidal_decompose_small", "toroidal_from_decomposition",
]

FALLBACK_RESTARTS = 64
FALLBACK_ITERS = 500


class ToroidalDecomposition:
    """Convex decomposition C = sum_k p_k u_k u_k* with unimodular vectors."""

    __slots__ = ("dim", "probs", "vectors")

    def __init__(self, probs, vectors, tol: Tolerance = DEFAULT_TOL, *,
                 _validate=True):
        p = np.asarray(probs, dtype=float)
        vs = tuple(np.asarray(v, dtype=complex).reshape(-1) for v in vectors)
        if p.ndim != 1 or p.size != len(vs) or p.size == 0:
            raise ValidationError("probs and vectors must be matching nonempty lists")
        n = vs[0].size
        if any(v.size != n for v in vs):
            raise ValidationError("all vectors must share one length")
        if _validate:
            if np.any(p < -tol.eps_eq) or abs(p.sum() - 1.0) > max(tol.eps_eq, 1e-12):
                raise ValidationError("weights must be a probability vector")
            for i, v in enumerate(vs):
                dev = float(np.max(np.abs(np.abs(v) - 1.0)))
                if dev > max(tol.eps_eq, 1e-8):
                    raise ValidationError(
                        f"vector {i} is not unimodular: max deviation {dev:.3e}")
        p.setflags(write=False)
        for v in vs:
            v.setflags(write=False)
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "vectors", vs)

    def __setattr__(self, *_):
        raise AttributeError("ToroidalDecomposition is immutable")

    @property
    def n_terms(self) -> int:
        return len(self.probs)

    def matrix(self) -> np.ndarray:
        """The correlation matrix sum_k p_k u_k u_k* this decomposes."""
        vs = np.array(self.vectors)
        return np.einsum("k,ki,kj->ij", self.probs, vs, vs.conj())

    def __repr__(self) -> str:
        return f"ToroidalDecomposition(dim={self.dim}, terms={self.n_terms})"


def _solve_bracketed_2x2(m: np.ndarray) -> np.ndarray:
    """Unit v = (cos t, e^{i phi} sin t) with v* M v = 0, assuming 0 lies on
    the segment between the diagonal entries of the 2x2 matrix M."""
    z0, z1 = m[0, 0], m[1, 1]
    scale = max(abs(z0), abs(z1), np.abs(m).max(), 1e-300)
    if abs(z0) <= 1e-14 * scale:
        return np.array([1.0, 0.0], dtype=complex)
    if abs(z1) <= 1e-14 * scale:
        return np.array([0.0, 1.0], dtype=complex)
    mu = abs(z1) / abs(z0)
    psi = z0 / abs(z0)
    ap, bp = m[0, 1] / psi, m[1, 0] / psi
    num = -(ap.imag + bp.imag)
    den = ap.real - bp.real
    phi = 0.0 if (abs(num) < 1e-300 and abs(den) < 1e-300) else float(np.arctan2(num, den))
    w = np.exp(1j * phi) * ap + np.exp(-1j * phi) * bp
    g0 = w.real / abs(z0)
    t = float(np.arctan((g0 + np.sqrt(g0 * g0 + 4 * mu)) / (2 * mu)))
    return np.array([np.cos(t), np.exp(1j * phi) * np.sin(t)], dtype=complex)


def _opposite_through_zero(z0: complex, z1: complex, rel: float) -> bool:
    p = z0 * np.conj(z1)
    scale = abs(z0) * abs(z1)
    return scale > 0 and p.real < 0 and abs(p.imag) <= rel * scale


def _fallback_minimize(z: np.ndarray, seed: int) -> np.ndarray | None:
    """Projected-gradient minimization of |v* Z v|^2 on the unit sphere."""
    n = z.shape[0]
    zh = dagger(z)
    for restart in range(FALLBACK_RESTARTS):
        rng = np.random.default_rng([seed, restart])
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        step = 0.5
        for _ in range(FALLBACK_ITERS):
            q = complex(np.conj(v) @ (z @ v))
            if abs(q) ** 2 < 1e-28:
                return v
            g = 2 * (np.conj(q) * (z @ v) + q * (zh @ v))
            g = g - (np.conj(v) @ g).real * v
            gn = np.linalg.norm(g)
            if gn < 1e-14:
                break
            w = v - step * g
            w /= np.linalg.norm(w)
            if abs(np.conj(w) @ (z @ w)) ** 2 < abs(q) ** 2:
                v = w
                step = min(0.5, step * 1.5)
            else:
                step *= 0.5
                if step < 1e-12:
                    break
        if abs(np.conj(v) @ (z @ v)) ** 2 < 1e-28:
            return v
    return None


def _null_rayleigh_vector(z: np.ndarray, seed: int) -> np.ndarray:
    """A unit vector v with v* Z v = 0 for traceless Z.

    Fast paths: a vanishing diagonal entry, then a coordinate pair whose
    diagonal entries bracket 0.  Certified path: in a Schur basis the
    eigenvalues average to zero, so a single eigenvalue vanishes, or a
    pair brackets 0, or some triangle of eigenvalues contains 0; each case
    reduces to closed-form 2x2 compressions.  A projected-gradient
    minimizer remains as a last resort.
    """
    n = z.shape[0]
    nrm = float(np.linalg.norm(z))
    d = np.diag(z)
    for i in range(n):
        if abs(d[i]) <= 1e-14 * nrm:
            e = np.zeros(n, dtype=complex)
            e[i] = 1
            return e
    for i in range(n):
        for j in range(i + 1, n):
            if _opposite_through_zero(d[i], d[j], 1e-12):
                x = _solve_bracketed_2x2(z[np.ix_([i, j], [i, j])])
                v = np.zeros(n, dtype=complex)
                v[i], v[j] = x
                return v
    t, q = sla.schur(z, output="complex")
    lam = np.diag(t)
    for i in range(n):
        if abs(lam[i]) <= 1e-12 * nrm:
            return q[:, i]
    for i in range(n):
        for j in range(i + 1, n):
            if _opposite_through_zero(lam[i], lam[j], 1e-12):
                # compression onto Schur vectors i < j is upper triangular
                b = np.array([[t[i, i], t[i, j]], [0.0, t[j, j]]], dtype=complex)
                return q[:, [i, j]] @ _solve_bracketed_2x2(b)
    best = None
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                a = np.array([[lam[i].real, lam[j].real, lam[k].real],
                              [lam[i].imag, lam[j].imag, lam[k].imag],
                              [1.0, 1.0, 1.0]])
                try:
                    bary = np.linalg.solve(a, np.array([0.0, 0.0, 1.0]))
                except np.linalg.LinAlgError:
                    continue
                if best is None or bary.min() > best[0]:
                    best = (float(bary.min()), (i, j, k), bary)
    if best is not None and best[0] >= -1e-12:
        _, (i, j, k), bary = best
        wij = bary[0] + bary[1]
        rho = (bary[0] * lam[i] + bary[1] * lam[j]) / wij
        b = np.array([[t[i, i] - rho, t[i, j]], [0.0, t[j, j] - rho]], dtype=complex)
        v1 = q[:, [i, j]] @ _solve_bracketed_2x2(b)
        qk = q[:, k]
        b2 = np.array([[rho, np.conj(v1) @ (z @ qk)],
                       [np.conj(qk) @ (z @ v1), lam[k]]], dtype=complex)
        x2 = _solve_bracketed_2x2(b2)
        return np.vstack([v1, qk]).T @ x2
    v = _fallback_minimize(z, seed)
    if v is None:
        raise NumericalError(
            f"could not locate a zero of the numerical range of a {n}x{n} "
            "traceless matrix within the search budget")
    return v


def _first_column_unitary(v: np.ndarray) -> np.ndarray:
    """A unitary whose first column is the given unit vector."""
    n = v.size
    m = np.eye(n, dtype=complex)
    m[:, 0] = v
    q, _ = np.linalg.qr(m)
    q[:, 0] *= np.conj(q[:, 0]) @ v
    return q


def zero_diagonal_unitary(z, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> np.ndarray:
    """Unitary U such that U Z U* has vanishing diagonal, for traceless Z.

    Deflation: find a unit vector v with v* Z v = 0, rotate it to the
    first coordinate, and recurse on the trailing block (still traceless).
    The identity is returned whenever the diagonal already vanishes.
    """
    z = as_matrix(z, "matrix")
    n = z.shape[0]
    if z.shape != (n, n):
        raise ValidationError("zero_diagonal_unitary requires a square matrix")
    nrm = float(np.linalg.norm(z))
    if abs(np.trace(z)) > max(tol.eps_eq * nrm, 1e-12):
        raise ValidationError(
            f"matrix is not traceless: |Tr| = {abs(np.trace(z)):.3e}")
    u = _zero_diag_recurse(z, seed)
    resid = float(np.max(np.abs(np.diag(u @ z @ dagger(u)))))
    if nrm > 0 and resid > 1e-8 * nrm:
        raise NumericalError(
            f"zero-diagonal construction missed tolerance: residual {resid:.3e}")
    return u


def _zero_diag_recurse(z: np.ndarray, seed: int) -> np.ndarray:
    n = z.shape[0]
    if n == 1:
        return np.eye(1, dtype=complex)
    nrm = float(np.linalg.norm(z))
    if nrm == 0 or np.max(np.abs(np.diag(z))) <= 1e-16 * nrm:
        return np.eye(n, dtype=complex)
    v = _null_rayleigh_vector(z, seed)
    q = _first_column_unitary(v)
    z1 = dagger(q) @ z @ q
    sub = _zero_diag_recurse(z1[1:, 1:], seed + 1)
    u = np.eye(n, dtype=complex)
    u[1:, 1:] = sub
    return u @ dagger(q)


def _traceless_hermitian_directions(basis, n: int, tol: Tolerance):
    """Split an operator-system basis into at most two orthonormal traceless
    Hermitian directions (plus the identity), via an isometric real
    embedding so the principal directions stay Hermitian."""
    eye = np.eye(n, dtype=complex)
    cands = []
    for b in basis:
        c = b - (np.trace(b) / n) * eye
        for h in ((c + dagger(c)) / 2, (c - dagger(c)) / 2j):
            if np.linalg.norm(h) > 1e-13:
                cands.append(h)
    if not cands:
        return []
    x = np.array([np.concatenate([vec(h).real, vec(h).imag]) for h in cands])
    _, sv, vh = np.linalg.svd(x, full_matrices=False)
    if sv[0] <= 1e-13:
        return []
    keep = [i for i in range(sv.size) if sv[i] > tol.eps_rank * sv[0]]
    if len(keep) > 2:
        raise ValidationError(
            f"operator system has {len(keep)} traceless directions; "
            "the low-dimension construction needs at most 2")
    dirs = []
    for i in keep:
        w = vh[i]
        dirs.append(unvec(w[:n * n] + 1j * w[n * n:], n, n))
    return dirs


def decompose_low_dim(phi: KrausChannel, tol: Tolerance = DEFAULT_TOL,
                      seed: int = 0) -> MixedUnitaryDecomposition:
    """Mixed-unitary decomposition with N = Choi rank, for s <= 3.

    Steps: build the minimal Kraus list and the complementary channel Psi;
    extract traceless Hermitian H, K spanning the operator system together
    with the identity (K = 0 when s <= 2, H = K = 0 when s = 1); rotate
    Psi(H) + i Psi(K) to vanishing diagonal by a unitary U; remix the
    Kraus list by U rows; each remixed operator is then a scalar multiple
    of a unitary, giving the weights and unitaries directly.
    """
    if phi.dim_in != phi.dim_out:
        raise ValidationError("decompose_low_dim requires a square channel")
    if not phi.is_unital(tol):
        raise ValidationError("decompose_low_dim requires a unital channel")
    n = phi.dim_in
    phi = minimize_kraus(phi, tol)
    sys = operator_system(phi, tol)
    if sys.s > 3:
        raise ValidationError(
            f"refusal: operator system has dimension {sys.s} > 3")
    psi = complementary(phi, tol)
    dirs = _traceless_hermitian_directions(sys.basis, n, tol)
    r = len(phi.kraus)
    zmat = np.zeros((r, r), dtype=complex)
    if len(dirs) >= 1:
        zmat = zmat + psi(dirs[0])
    if len(dirs) >= 2:
        zmat = zmat + 1j * psi(dirs[1])
    u = zero_diagonal_unitary(zmat, tol, seed)
    remixed = [sum(u[k, j] * phi.kraus[j] for j in range(r)) for k in range(r)]
    probs, us = [], []
    for k, b in enumerate(remixed):
        p = float(np.linalg.norm(b) ** 2 / n)
        uk = b / np.sqrt(p)
        defect = np.linalg.norm(dagger(uk) @ uk - np.eye(n))
        if defect > 1e-8 * max(1.0, np.sqrt(n)):
            raise NumericalError(
                f"remixed Kraus operator {k} is not unitary: defect {defect:.3e}")
        uk = _phase_fix_first_entry(uk)
        probs.append(p)
        us.append(uk)
    return MixedUnitaryDecomposition(probs, us, tol)


def _phase_fix_first_entry(u: np.ndarray) -> np.ndarray:
    """Make the first nonzero entry (row-major) real positive."""
    flat = u.reshape(-1)
    cutoff = 1e-9 * float(np.max(np.abs(flat)))
    idx = int(np.argmax(np.abs(flat) > cutoff))
    return u * (np.conj(flat[idx]) / abs(flat[idx]))


def toroidal_from_decomposition(d: MixedUnitaryDecomposition,
                                tol: Tolerance = DEFAULT_TOL) -> ToroidalDecomposition:
    """Convert a diagonal-unitary decomposition of a Schur channel into the
    corresponding toroidal decomposition (vectors = diagonals)."""
    vectors = []
    for u in d.unitaries:
        off = np.linalg.norm(u - np.diag(np.diag(u)))
        if off > max(tol.eps_eq, 1e-8):
            raise ValidationError(
                "decomposition terms are not diagonal; not a Schur-channel decomposition")
        vectors.append(np.diag(u))
    return ToroidalDecomposition(d.probs, vectors, tol)


def toroidal_decompose_small(c, tol: Tolerance = DEFAULT_TOL,
                             seed: int = 0) -> ToroidalDecomposition:
    """Toroidal decomposition of a 2x2 or 3x3 correlation matrix with
    N = rank(C) terms.  Larger matrices are refused (use the isometry
    search on the Schur channel instead)."""
    c = as_matrix(c, "correlation matrix")
    if c.shape[0] > 3:
        raise ValidationError(
            "refusal: constructive toroidal decompositions cover dim <= 3 only; "
            "run the isometry search on the Schur channel for larger matrices")
    phi = schur_channel(c, tol)
    d = decompose_low_dim(phi, tol, seed)
    return toroidal_from_decomposition(d, tol)
