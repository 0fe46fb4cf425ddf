import numpy as np
import pytest

from muchan import (ValidationError, choi_of, dagger, frob_inner, kron,
                    numerical_rank, operator_system, verify_decomposition)
from muchan.gallery import (corr_B3, corr_C4, gap_channel, hermitian_basis,
                            mub_correlation, mub_family, one_factorization,
                            toroidal_CtensorI2, weyl_channel, weyl_generators,
                            wh_antisym_decomposition, wh_channels,
                            wh_sym3_decomposition, wh_sym_even_decomposition,
                            wh_sym_odd_decomposition)

ZETA3 = np.exp(2j * np.pi / 3)


def _eij(n, i, j):
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1
    return m


# ------------------------------------------------------------------ Weyl

def test_weyl3_kraus_transcription():
    w1 = np.array([[0, 0, ZETA3 ** 2], [1, 0, 0], [0, ZETA3, 0]])
    w2 = np.array([[0, ZETA3, 0], [0, 0, ZETA3 ** 2], [1, 0, 0]])
    phi = weyl_channel(3)
    got = [a * np.sqrt(3) for a in phi.kraus]
    assert np.linalg.norm(got[0] - np.eye(3)) <= 1e-12
    assert np.linalg.norm(got[1] - w1) <= 1e-12
    assert np.linalg.norm(got[2] - w2) <= 1e-12


def test_weyl_operator_system_dimensions():
    assert operator_system(weyl_channel(3)).s == 7
    assert operator_system(weyl_channel(5)).s == 21


def test_weyl_rejects_bad_p():
    for bad in (1, 2, 4, 6, 9):
        with pytest.raises(ValidationError):
            weyl_channel(bad)


def test_weyl_displacement_orthogonality():
    # <U^a V^b, U^c V^d> = p delta: an orthogonal basis of M_p
    for p in (3, 5, 7):
        u, v = weyl_generators(p)
        words = {}
        for a in range(p):
            for b in range(p):
                words[(a, b)] = np.linalg.matrix_power(u, a) @ np.linalg.matrix_power(v, b)
        keys = list(words)
        for i, k1 in enumerate(keys):
            for k2 in keys[i:]:
                ip = frob_inner(words[k1], words[k2])
                if k1 == k2:
                    assert abs(ip - p) <= 1e-9
                else:
                    assert abs(ip) <= 1e-9


def test_weyl_operator_system_separation():
    # words (U^b V^{b^2})^*(U^a V^{a^2}) are orthogonal unless (a,b)=(c,d)
    # or (a,c)=(b,d), checked exhaustively
    for p in (3, 5):
        u, v = weyl_generators(p)
        w = [np.linalg.matrix_power(u, a) @ np.linalg.matrix_power(v, (a * a) % p)
             for a in range(p)]
        prods = {(a, b): dagger(w[b]) @ w[a] for a in range(p) for b in range(p)}
        for (a, b), m1 in prods.items():
            for (c, d), m2 in prods.items():
                ip = abs(frob_inner(m1, m2))
                if (a, b) == (c, d) or (a, c) == (b, d):
                    assert ip >= p - 1e-9
                else:
                    assert ip <= 1e-9


def test_gap_channel_choi_rank():
    assert choi_of(gap_channel(3, 1)).rank() == 4
    assert choi_of(gap_channel(5, 1)).rank() == 6


# ---------------------------------------------------------- correlations

def test_corr_b3_is_rank2_correlation():
    b = corr_B3()
    assert numerical_rank(b) == 2
    assert np.max(np.abs(np.diag(b) - 1)) == 0
    # off-diagonal entries avoid the unit circle
    assert all(abs(abs(b[i, j]) - 1) > 0.1 for i in range(3) for j in range(3) if i != j)


def test_corr_b3_derived_from_paper_vectors():
    u = np.array([1, (1 + 1j) / np.sqrt(2), (1 - 1j) / np.sqrt(2)])
    v = np.array([1, (1 - 1j) / np.sqrt(2), (1 + 1j) / np.sqrt(2)])
    rebuilt = (np.outer(u, u.conj()) + np.outer(v, v.conj())) / 2
    assert np.linalg.norm(rebuilt - corr_B3()) <= 1e-12


def test_corr_c4_ranks():
    c = corr_C4()
    assert numerical_rank(c) == 3
    assert numerical_rank(kron(c, np.eye(2))) == 6
    assert np.linalg.norm(c[:3, :3] - corr_B3()) == 0


def test_ctensor2_reconstruction():
    t = toroidal_CtensorI2()
    assert t.n_terms == 6
    target = kron(corr_C4(), np.eye(2))
    assert np.linalg.norm(t.matrix() - target) <= 1e-10
    for v in t.vectors:
        assert np.max(np.abs(np.abs(v) - 1)) <= 1e-12


# ------------------------------------------------------------------- MUB

@pytest.mark.parametrize("d", [2, 3, 5])
def test_mub_overlaps(d):
    fam = mub_family(d)
    assert len(fam.bases) == d + 1
    for i in range(d + 1):
        b = fam.bases[i]
        assert np.linalg.norm(dagger(b) @ b - np.eye(d)) <= 1e-10
        for j in range(i + 1, d + 1):
            ov = np.abs(dagger(b) @ fam.bases[j])
            assert np.max(np.abs(ov - 1 / np.sqrt(d))) <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 5])
def test_mub_correlation_properties(d):
    mc = mub_correlation(d)
    c = mc.matrix
    assert c.shape == (d * d, d * d)
    assert np.max(np.abs(np.diag(c) - 1)) <= 1e-12
    assert numerical_rank(c) == d
    assert numerical_rank(np.conj(c) * c) == d * d - d + 1
    assert np.linalg.norm(mc.decomposition.matrix() - c) <= 1e-10


def test_mub_rejects_composite():
    with pytest.raises(ValidationError):
        mub_family(4)
    with pytest.raises(ValidationError):
        mub_correlation(6)


def test_mub3_gap_certificate():
    from muchan import certified_gap_rank, schur_channel
    cert = certified_gap_rank(schur_channel(mub_correlation(3).matrix), 1)
    assert (cert.choi_rank, cert.mu_rank) == (4, 6)


# ------------------------------------------------- Hermitian basis, matchings

def test_hermitian_basis_m2_entry():
    h = hermitian_basis(2)
    expected = (_eij(2, 0, 1) + _eij(2, 1, 0)) / np.sqrt(2)
    assert np.linalg.norm(h[(0, 1)] - expected) <= 1e-15


def test_hermitian_basis_orthonormal_n5():
    h = hermitian_basis(5)
    mats = [h[(j, k)] for j in range(5) for k in range(5)]
    # direct inner-product table
    for i, a in enumerate(mats):
        assert np.linalg.norm(a - dagger(a)) <= 1e-15
        for j, b in enumerate(mats):
            assert abs(frob_inner(a, b) - (i == j)) <= 1e-12


def test_one_factorization_k4():
    fac = one_factorization(4)
    assert len(fac.matchings) == 3
    edges = {e for m in fac.matchings for e in m}
    assert edges == {(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)}


def test_one_factorization_rejects_odd():
    with pytest.raises(ValidationError):
        one_factorization(5)


def test_one_factorization_valid_up_to_10():
    for n in (2, 4, 6, 8, 10):
        one_factorization(n).validate()


# ---------------------------------------------------------- Werner-Holevo

def _swap(n):
    s = np.zeros((n * n, n * n))
    for j in range(n):
        for k in range(n):
            s[j * n + k, k * n + j] = 1
    return s


def test_wh_action_formulas():
    rng = np.random.default_rng(1)
    for n in (2, 3, 4):
        pair = wh_channels(n)
        x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        assert np.linalg.norm(
            pair.phi0(x) - (np.trace(x) * np.eye(n) + x.T) / (n + 1)) <= 1e-12
        assert np.linalg.norm(
            pair.phi1(x) - (np.trace(x) * np.eye(n) - x.T) / (n - 1)) <= 1e-12


def test_wh_choi_are_projectors():
    # oracle: symmetric/anti-symmetric projectors from the swap matrix
    for n in (2, 3, 4):
        pair = wh_channels(n)
        s = _swap(n)
        p0 = (np.eye(n * n) + s) / 2
        p1 = (np.eye(n * n) - s) / 2
        assert np.linalg.norm(choi_of(pair.phi0).matrix - 2 / (n + 1) * p0) <= 1e-10
        assert np.linalg.norm(choi_of(pair.phi1).matrix - 2 / (n - 1) * p1) <= 1e-10


def test_wh_choi_ranks():
    assert choi_of(wh_channels(2).phi1).rank() == 1
    assert choi_of(wh_channels(3).phi0).rank() == 6
    assert choi_of(wh_channels(4).phi0).rank() == 10
    assert choi_of(wh_channels(4).phi1).rank() == 6


def test_wh2_antisym_is_single_unitary():
    d = wh_antisym_decomposition(2)
    assert d.n_terms == 1
    # conjugation by the skew unitary built from the single off-diagonal
    # Hermitian basis element
    h21 = hermitian_basis(2)[(1, 0)]
    assert abs(abs(frob_inner(d.unitaries[0], np.sqrt(2) * h21)) - 2) <= 1e-12


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_wh_antisym_even(n):
    d = wh_antisym_decomposition(n)
    assert d.n_terms == n * (n - 1) // 2
    for u in d.unitaries:
        assert np.linalg.norm(u + u.T) <= 1e-10  # skew-symmetric
    res = verify_decomposition(wh_channels(n).phi1, d)
    assert res.ok and res.choi_residual <= 1e-10


def test_wh_antisym_rejects_odd():
    with pytest.raises(ValidationError):
        wh_antisym_decomposition(3)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_wh_sym_even(n):
    d = wh_sym_even_decomposition(n)
    assert d.n_terms == n * (n + 1) // 2
    for u in d.unitaries:
        assert np.linalg.norm(u - u.T) <= 1e-10  # symmetric
    us = d.unitaries
    for i in range(len(us)):
        for j in range(i + 1, len(us)):
            assert abs(frob_inner(us[i], us[j])) <= 1e-9
    res = verify_decomposition(wh_channels(n).phi0, d)
    assert res.ok and res.choi_residual <= 1e-10


@pytest.mark.parametrize("n", [3, 5, 7])
def test_wh_sym_odd(n):
    d = wh_sym_odd_decomposition(n)
    assert d.n_terms == n * (n + 3) // 2
    res = verify_decomposition(wh_channels(n).phi0, d)
    assert res.ok and res.choi_residual <= 1e-10


def test_wh_sym_odd_weights_rational_identity():
    # weight bookkeeping: n(n+1)/2 terms at 2/(n+1)^2 plus n at 1/(n(n+1))
    from fractions import Fraction
    for n in (3, 5, 7):
        total = (Fraction(n * (n + 1), 2) * Fraction(2, (n + 1) ** 2)
                 + n * Fraction(1, n * (n + 1)))
        assert total == 1


def test_wh_sym3_explicit():
    d = wh_sym3_decomposition()
    assert d.n_terms == 6
    u1 = d.unitaries[0]
    assert np.linalg.norm(u1 - np.diag([1, ZETA3, ZETA3 ** 2])) <= 1e-12
    alpha = 3 / 8 + 1j * np.sqrt(15) / 8
    # row normalization forced by the entries: 1/4 + 2|alpha|^2 = 1
    assert 0.25 + 2 * abs(alpha) ** 2 == pytest.approx(1.0, abs=1e-15)
    u3, u4 = d.unitaries[2], d.unitaries[3]
    assert abs(frob_inner(u3, u4)) <= 1e-12
    for u in d.unitaries:
        assert np.linalg.norm(u - u.T) <= 1e-12
    res = verify_decomposition(wh_channels(3).phi0, d)
    assert res.ok and res.choi_residual <= 1e-10


def test_wh_rejects_n1():
    with pytest.raises(ValidationError):
        wh_channels(1)


# ----------------------------------------------- bound consistency (gallery)

def test_known_decompositions_respect_bounds():
    from muchan import rank_bounds
    cases = []
    for p in (3, 5):
        phi = weyl_channel(p)
        cases.append((phi, p))
    for n in (2, 4):
        cases.append((wh_channels(n).phi0, n * (n + 1) // 2))
        cases.append((wh_channels(n).phi1, n * (n - 1) // 2))
    cases.append((wh_channels(3).phi0, 6))
    for phi, n_known in cases:
        b = rank_bounds(phi)
        assert b.lower <= n_known <= b.upper
