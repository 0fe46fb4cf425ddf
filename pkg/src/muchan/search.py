"""Isometry search for mixed-unitary decompositions.

A channel with Choi rank r and complementary channel Psi is mixed unitary
with at most N terms iff some isometry V (N x r) makes V Psi(X) V* have
vanishing diagonal for every traceless X.  The search minimizes

    f(V) = sum_k sum_j |(V B_k V*)(j, j)|^2

over the Stiefel manifold {V : V* V = I_r}, where B_1..B_m is an
orthonormal basis of the image of the traceless subspace under Psi, by
Riemannian gradient descent (Wirtinger gradient, tangent projection,
QR retraction, Armijo backtracking) from Haar-random starts.

A failed search is never a certificate: ``not_found`` only reports that
all restarts plateaued above the objective tolerance.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analysis import (MixedUnitaryDecomposition, RankBoundsReport,
                       rank_bounds, verify_decomposition)
from .channels import KrausChannel, complementary, minimize_kraus
from .exceptions import NumericalError, ValidationError
from .linalg import dagger, haar_isometry, unvec, vec
from .tolerances import DEFAULT_TOL, Tolerance

__all__ = [
    "SearchConfig", "SearchResult", "MurankReport",
    "traceless_image_basis", "search_isometry",
    "decomposition_from_isometry", "murank_search",
]

STALL_PATIENCE = 30
STALL_REL = 1e-9
POLISH_TOL = 1e-28
UNITARITY_SLACK = 1e-6
DECOMP_RESIDUAL = 1e-8


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the Stiefel search.

    Restart i draws its Haar start from ``default_rng(seed + i)``, so
    sequential and parallel runs coincide.  ``max_workers`` > 1 runs
    restarts concurrently with a deterministic index-ordered merge.
    """

    restarts: int = 50
    max_iters: int = 2000
    step_init: float = 0.1
    armijo_beta: float = 0.5
    seed: int = 0
    objective_tol: float = 1e-16
    time_budget: Optional[float] = None
    max_workers: int = 1

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1 or self.max_workers < 1:
            raise ValidationError("restarts, max_iters, max_workers must be positive")
        if not (self.step_init > 0 and 0 < self.armijo_beta < 1):
            raise ValidationError("need step_init > 0 and armijo_beta in (0, 1)")
        if not self.objective_tol > 0:
            raise ValidationError("objective_tol must be positive")


@dataclass(frozen=True)
class SearchResult:
    """Outcome of one isometry search at a fixed candidate size N."""

    status: str                      # found | not_found | budget_exhausted
    n_terms: int
    objective: float
    isometry: Optional[np.ndarray]
    decomposition: Optional[MixedUnitaryDecomposition]
    restart_log: tuple


@dataclass(frozen=True)
class MurankReport:
    """Outcome of the N-scan: smallest N at which the search succeeded."""

    n_found: Optional[int]
    decomposition: Optional[MixedUnitaryDecomposition]
    bounds: RankBoundsReport
    results: tuple  # per-N SearchResult, in scan order


def traceless_image_basis(psi: KrausChannel, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of {Psi(X) : Tr X = 0} as an (m, r, r) array.

    Every basis element is traceless because Psi preserves trace; the
    count m is at most min(n^2 - 1, r^2).
    """
    n, r = psi.dim_in, psi.dim_out
    mats = []
    for j in range(n):
        for k in range(n):
            if j != k:
                e = np.zeros((n, n), dtype=complex)
                e[j, k] = 1
                mats.append(e)
    for l in range(n - 1):
        e = np.zeros((n, n), dtype=complex)
        e[l, l], e[l + 1, l + 1] = 1, -1
        mats.append(e / np.sqrt(2))
    if not mats:
        return np.zeros((0, r, r), dtype=complex)
    rows = np.array([vec(psi(x)) for x in mats])
    _, sv, vh = np.linalg.svd(rows, full_matrices=False)
    if sv.size == 0 or sv[0] <= 0:
        return np.zeros((0, r, r), dtype=complex)
    keep = int(np.count_nonzero(sv > tol.eps_rank * sv[0]))
    basis = np.array([unvec(vh[i], r, r) for i in range(keep)])
    worst = max((abs(np.trace(b)) for b in basis), default=0.0)
    if worst > max(tol.eps_eq, 1e-8):
        raise NumericalError(f"image basis not traceless: |Tr| = {worst:.3e}")
    return basis


def _objective(v: np.ndarray, basis: np.ndarray):
    # t[k, j, :] = row j of (V B_k); d[k, j] = (V B_k V*)(j, j)
    t = np.matmul(v[None, :, :], basis)
    d = np.einsum("kjq,jq->kj", t, v.conj())
    return float(np.sum(np.abs(d) ** 2)), d, t


def _euclidean_gradient(v, basis, d, t):
    g = np.einsum("kj,kjq->jq", d.conj(), t)
    th = np.matmul(v[None, :, :], basis.conj().transpose(0, 2, 1))
    g += np.einsum("kj,kjq->jq", d, th)
    return 2 * g


def _retract(v: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(v)
    ph = np.diag(r)
    ph = np.where(np.abs(ph) > 0, ph / np.abs(ph), 1.0)
    return q * ph


def _run_restart(basis: np.ndarray, n_terms: int, r: int, cfg: SearchConfig,
                 index: int):
    """One gradient-descent restart; returns (final objective, V)."""
    rng_seed = cfg.seed + index
    v = haar_isometry(n_terms, r, rng_seed)
    if basis.shape[0] == 0:
        return 0.0, v
    f, d, t = _objective(v, basis)
    step = cfg.step_init
    stall = 0
    # successful restarts keep polishing well below the acceptance
    # threshold so the induced unitaries come out at machine precision
    target = min(cfg.objective_tol, POLISH_TOL)
    for _ in range(cfg.max_iters):
        if f <= target:
            break
        g = _euclidean_gradient(v, basis, d, t)
        a = dagger(v) @ g
        delta = g - v @ (a + dagger(a)) / 2
        g2 = float(np.sum(np.abs(delta) ** 2))
        if g2 <= 1e-30:
            break
        tau, accepted = step, False
        for _ in range(40):
            vn = _retract(v - tau * delta)
            fn, dn, tn = _objective(vn, basis)
            if fn <= f - 1e-4 * tau * g2:
                accepted = True
                break
            tau *= cfg.armijo_beta
        if not accepted:
            break
        stall = stall + 1 if f - fn <= STALL_REL * max(f, 1e-300) else 0
        v, f, d, t = vn, fn, dn, tn
        if stall >= STALL_PATIENCE:
            break
        step = min(cfg.step_init * 10, tau / cfg.armijo_beta)
    return f, v


def search_isometry(basis: np.ndarray, n_terms: int, cfg: SearchConfig = SearchConfig(),
                    channel: Optional[KrausChannel] = None,
                    tol: Tolerance = DEFAULT_TOL) -> SearchResult:
    """Search for an N x r isometry zeroing all conjugated diagonals.

    ``status="found"`` requires the best objective to reach
    ``cfg.objective_tol``; when the minimal ``channel`` is supplied, the
    induced decomposition must additionally pass verification (unitarity
    within 1e-6, Choi residual within 1e-8), and is returned.  The
    restart log holds each executed restart's final objective; execution
    stops at the first successful restart index.
    """
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim != 3 or basis.shape[1] != basis.shape[2]:
        raise ValidationError("basis must be an (m, r, r) array")
    r = basis.shape[1]
    if n_terms < r:
        raise ValidationError(f"candidate size N={n_terms} is below the rank r={r}")
    deadline = None if cfg.time_budget is None else time.monotonic() + cfg.time_budget
    log = []
    best_f, best_v = np.inf, None
    exhausted = False
    found_index = None

    def handle(index, outcome):
        nonlocal best_f, best_v, found_index
        f, v = outcome
        log.append(f)
        if f < best_f:
            best_f, best_v = f, v
        if f <= cfg.objective_tol and found_index is None:
            found_index = index

    if cfg.max_workers == 1:
        for i in range(cfg.restarts):
            if deadline is not None and time.monotonic() > deadline:
                exhausted = True
                break
            handle(i, _run_restart(basis, n_terms, r, cfg, i))
            if found_index is not None:
                break
    else:
        with ThreadPoolExecutor(max_workers=cfg.max_workers) as pool:
            i = 0
            while i < cfg.restarts and found_index is None and not exhausted:
                if deadline is not None and time.monotonic() > deadline:
                    exhausted = True
                    break
                chunk = list(range(i, min(i + cfg.max_workers, cfg.restarts)))
                outcomes = list(pool.map(
                    lambda k: _run_restart(basis, n_terms, r, cfg, k), chunk))
                for k, out in zip(chunk, outcomes):
                    handle(k, out)
                    if found_index is not None:
                        break
                i = chunk[-1] + 1
        if found_index is not None:
            # keep the log prefix up to the first success, as sequentially
            log[:] = log[:found_index + 1]

    status = "found" if best_f <= cfg.objective_tol else (
        "budget_exhausted" if exhausted else "not_found")
    decomposition = None
    if status == "found" and channel is not None:
        try:
            decomposition = decomposition_from_isometry(channel, best_v, tol)
        except NumericalError:
            decomposition = None
        if decomposition is not None:
            check = verify_decomposition(minimize_kraus(channel, tol), decomposition, tol)
            if check.choi_residual > DECOMP_RESIDUAL:
                decomposition = None
        if decomposition is None:
            status = "not_found"
    return SearchResult(status=status, n_terms=n_terms,
                        objective=float(best_f),
                        isometry=best_v if status == "found" else None,
                        decomposition=decomposition,
                        restart_log=tuple(log))


def decomposition_from_isometry(phi_minimal: KrausChannel, v: np.ndarray,
                                tol: Tolerance = DEFAULT_TOL) -> MixedUnitaryDecomposition:
    """Mixed-unitary decomposition induced by a found isometry.

    The remixed Kraus operators C_j = sum_k V(j, k) A_k must each be a
    scalar multiple of a unitary; terms with negligible weight are
    dropped.  A retained operator whose unitarity defect exceeds 1e-6
    raises :class:`NumericalError` with the offending index.
    """
    phi_minimal = minimize_kraus(phi_minimal, tol)
    v = np.asarray(v, dtype=complex)
    r, n = len(phi_minimal.kraus), phi_minimal.dim_in
    if v.ndim != 2 or v.shape[1] != r:
        raise ValidationError(f"isometry must have {r} columns, got {v.shape}")
    if np.linalg.norm(dagger(v) @ v - np.eye(r)) > tol.eps_eq * max(1.0, np.sqrt(r)):
        raise ValidationError("matrix is not an isometry within tolerance")
    stacked = phi_minimal.stacked()
    probs, us = [], []
    for j in range(v.shape[0]):
        c = np.tensordot(v[j], stacked, axes=(0, 0))
        p = float(np.linalg.norm(c) ** 2 / n)
        if p <= tol.eps_eq:
            continue
        u = c / np.sqrt(p)
        defect = float(np.linalg.norm(dagger(u) @ u - np.eye(n)))
        if defect > UNITARITY_SLACK:
            raise NumericalError(
                f"remixed operator {j} is not unitary: defect {defect:.3e}")
        probs.append(p)
        us.append(u)
    # isometry mixing preserves total weight; renormalize roundoff only
    total = sum(probs)
    probs = [p / total for p in probs]
    return MixedUnitaryDecomposition(probs, us, Tolerance(
        eps_rank=tol.eps_rank, eps_eq=max(tol.eps_eq, UNITARITY_SLACK),
        eps_obj=tol.eps_obj))


def murank_search(phi: KrausChannel, cfg: SearchConfig = SearchConfig(),
                  tol: Tolerance = DEFAULT_TOL) -> MurankReport:
    """Scan candidate sizes N for the smallest successful search.

    Starts at the Choi rank (or at the theorem-certified exact value when
    available) and walks up to the rank bound.  Failures at smaller N are
    recorded as diagnostics; they are soft evidence only and never certify
    a lower bound.
    """
    bounds = rank_bounds(phi, tol)
    phi_min = minimize_kraus(phi, tol)
    basis = traceless_image_basis(complementary(phi_min, tol), tol)
    start = bounds.exact if bounds.exact is not None else bounds.lower
    results = []
    for n_candidate in range(start, bounds.upper + 1):
        res = search_isometry(basis, n_candidate, cfg, channel=phi_min, tol=tol)
        results.append(res)
        if res.status == "found":
            return MurankReport(n_found=n_candidate, decomposition=res.decomposition,
                                bounds=bounds, results=tuple(results))
    return MurankReport(n_found=None, decomposition=None, bounds=bounds,
                        results=tuple(results))
