"""Tests for the smash product, its matrix-algebra form, and PdgModules.

Oracle strategy: the faithful representation of the smash product on the
truncated polynomial ring (built independently from the truncpoly module's
multiplication and lowering-operator matrices) certifies the normal-ordered
product; random conjugations of block column modules certify the
decomposition; a greedy basis-extraction oracle certifies the freeness
criterion.
"""

import numpy as np
import pytest

from pdgsl2 import fpcore as fp
from pdgsl2 import truncpoly as tp
from pdgsl2.smash import (
    PdgModule,
    SmashElement,
    column_module,
    column_projector_element,
    column_projector_matrix,
    decompose_pdg_module,
    free_over_trunc,
    is_acyclic_pdg,
    phi_generator_matrices,
    phi_linearization,
    phi_matrix,
    phi_preimage,
    slash_homology_dims,
    smash_basis_product,
    synthesize_dot_action,
    validate_pdg_module,
)

PRIMES = [2, 3, 5, 7]


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------


def oracle_operator_matrix(p: int, i: int, j: int) -> np.ndarray:
    """Matrix of f -> x^i * d_minus^j(f) on k[x]/(x^p), built from truncpoly."""
    X = tp.multiplication_matrix(tp.TruncAlgebra(p, 1).gen(0))
    D = tp.witt_matrix("d_minus", p, 1)
    return (np.linalg.matrix_power(X, i) @ np.linalg.matrix_power(D, j)) % p


def random_invertible_degree0(qdeg, p, rng) -> np.ndarray:
    """Random invertible matrix that is block diagonal over the q-degrees."""
    n = len(qdeg)
    S = np.zeros((n, n), dtype=np.int64)
    for q in sorted(set(qdeg)):
        ix = [i for i, qq in enumerate(qdeg) if qq == q]
        k = len(ix)
        while True:
            blk = rng.integers(0, p, size=(k, k))
            if fp.rank(blk, p) == k:
                break
        S[np.ix_(ix, ix)] = blk
    return S


def block_column_actions(p: int, shifts) -> PdgModule:
    """Direct sum of shifted column modules, in block form."""
    X, D = phi_generator_matrices(p)
    n = p * len(shifts)
    x = np.zeros((n, n), dtype=np.int64)
    d = np.zeros((n, n), dtype=np.int64)
    qdeg = []
    for b, s in enumerate(shifts):
        sl = slice(b * p, (b + 1) * p)
        x[sl, sl] = X
        d[sl, sl] = D
        qdeg.extend(s + 2 * i for i in range(p))
    return PdgModule(p=p, qdeg=qdeg, x_action=x, d_action=d)


def oracle_free_by_extraction(x_actions, p) -> bool:
    """Exhibit an explicit monomial basis over the truncated ring, greedily."""
    mats = [np.mod(np.asarray(x, dtype=np.int64), p) for x in x_actions]
    n = mats[0].shape[0]
    m = len(mats)
    if n % (p**m):
        return False
    prod = np.eye(n, dtype=np.int64)
    for x in mats:
        prod = (prod @ x) % p
    top = np.linalg.matrix_power(prod, p - 1) % p
    gens = []
    acc = np.zeros((n, 0), dtype=np.int64)
    for i in range(n):
        v = np.zeros(n, dtype=np.int64)
        v[i] = 1
        trial = np.hstack([acc, (top @ v).reshape(-1, 1)])
        if fp.rank(trial, p) > acc.shape[1]:
            gens.append(v)
            acc = trial
    if len(gens) != n // (p**m):
        return False
    cols = []
    for g in gens:
        images = [g]
        for x in mats:
            new = []
            for w in images:
                cur = w
                for _ in range(p):
                    new.append(cur)
                    cur = (x @ cur) % p
            images = new
        cols.extend(images)
    basis = np.stack(cols, axis=1)
    return basis.shape[1] == n and fp.rank(basis, p) == n


# ---------------------------------------------------------------------------
# Product structure
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", PRIMES)
def test_phi_generators_match_polynomial_operators(p):
    X, D = phi_generator_matrices(p)
    assert np.array_equal(X, oracle_operator_matrix(p, 1, 0))
    assert np.array_equal(D, oracle_operator_matrix(p, 0, 1))


@pytest.mark.parametrize("p", PRIMES)
def test_basis_product_matches_operator_composition(p):
    for a in range(p):
        for b in range(p):
            for c in range(p):
                for d in range(p):
                    lhs = (
                        oracle_operator_matrix(p, a, b)
                        @ oracle_operator_matrix(p, c, d)
                    ) % p
                    rhs = np.zeros((p, p), dtype=np.int64)
                    for (i, j), v in smash_basis_product(a, b, c, d, p).items():
                        rhs = (rhs + v * oracle_operator_matrix(p, i, j)) % p
                    assert np.array_equal(lhs, rhs)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_element_product_is_multiplicative_under_phi(p):
    rng = np.random.default_rng(7)
    for _ in range(40):
        e1 = SmashElement(p, rng.integers(0, p, size=(p, p)))
        e2 = SmashElement(p, rng.integers(0, p, size=(p, p)))
        assert np.array_equal(
            phi_matrix(e1 * e2), (phi_matrix(e1) @ phi_matrix(e2)) % p
        )


@pytest.mark.parametrize("p", [2, 3, 5])
def test_product_associative_and_unital(p):
    rng = np.random.default_rng(11)
    one = SmashElement.one(p)
    for _ in range(15):
        a = SmashElement(p, rng.integers(0, p, size=(p, p)))
        b = SmashElement(p, rng.integers(0, p, size=(p, p)))
        c = SmashElement(p, rng.integers(0, p, size=(p, p)))
        assert (a * b) * c == a * (b * c)
        assert a * one == a and one * a == a


def test_commutator_relation_d_x():
    for p in PRIMES:
        x, d = SmashElement.x(p), SmashElement.d(p)
        assert d * x - x * d == (-1) * SmashElement.one(p)


# ---------------------------------------------------------------------------
# Matrix algebra isomorphism
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", PRIMES)
def test_phi_is_bijective(p):
    assert fp.rank(phi_linearization(p), p) == p * p


@pytest.mark.parametrize("p", PRIMES)
def test_phi_grading_matches_matrix_unit_grading(p):
    # in the descending basis, deg(E_ij) = 2(j - i) (1-based indices cancel)
    for i in range(p):
        for j in range(p):
            elem = SmashElement.monomial(p, i, j)
            mat = phi_matrix(elem, descending=True)
            for (r, c), v in np.ndenumerate(mat):
                if v:
                    assert 2 * (c - r) == 2 * (i - j)


def test_phi_table_char2():
    # Frozen 2x2 table: the four basis images in the descending basis.
    assert np.array_equal(
        phi_matrix(SmashElement.d(2), descending=True), np.array([[0, 0], [1, 0]])
    )
    assert np.array_equal(
        phi_matrix(SmashElement.x(2), descending=True), np.array([[0, 1], [0, 0]])
    )
    assert np.array_equal(
        phi_matrix(SmashElement.one(2), descending=True), np.eye(2, dtype=np.int64)
    )
    assert np.array_equal(
        phi_matrix(SmashElement.monomial(2, 1, 1), descending=True),
        np.array([[1, 0], [0, 0]]),
    )


def test_phi_superdiagonal_char3():
    # Frozen: ascending-basis d has superdiagonal -1, -2.
    _, D = phi_generator_matrices(3)
    assert np.array_equal(D, np.array([[0, 2, 0], [0, 0, 1], [0, 0, 0]]))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_phi_preimage_round_trip(p):
    rng = np.random.default_rng(3)
    for _ in range(10):
        m = rng.integers(0, p, size=(p, p))
        elem = phi_preimage(m, p)
        assert elem is not None
        assert np.array_equal(phi_matrix(elem), m % p)


@pytest.mark.parametrize("p", PRIMES)
def test_column_projector_element(p):
    e = column_projector_element(p)
    # diagonal support in the x^j d^j basis elements
    for (i, j), c in np.ndenumerate(e.coeffs):
        if c:
            assert i == j
    assert e.coeffs[0, 0] == 1
    assert e * e == e
    img = phi_matrix(e)
    expected = np.zeros((p, p), dtype=np.int64)
    expected[0, 0] = 1
    assert np.array_equal(img, expected)


def test_column_projector_frozen_small_primes():
    assert np.array_equal(np.diag(column_projector_element(2).coeffs), [1, 1])
    assert np.array_equal(np.diag(column_projector_element(3).coeffs), [1, 1, 2])


# ---------------------------------------------------------------------------
# PdgModules and decomposition
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", PRIMES)
def test_column_module_is_valid(p):
    assert validate_pdg_module(column_module(p)).ok


def test_validation_catches_violations():
    m = column_module(3)
    bad = PdgModule(3, list(m.qdeg), m.x_action.copy(), m.d_action.copy())
    bad.x_action[0, 0] = 1  # breaks grading and nilpotence
    rep = validate_pdg_module(bad)
    assert not rep.ok and rep.failures


@pytest.mark.parametrize("p", PRIMES)
def test_projector_image_is_kernel_of_d(p):
    rng = np.random.default_rng(23 + p)
    shifts = [int(rng.integers(-4, 5)) * 2 for _ in range(3)]
    m = block_column_actions(p, shifts)
    S = random_invertible_degree0(m.qdeg, p, rng)
    Sinv = fp.inverse(S, p)
    conj = PdgModule(
        p, list(m.qdeg), (S @ m.x_action @ Sinv) % p, (S @ m.d_action @ Sinv) % p
    )
    P = column_projector_matrix(conj)
    ker = fp.kernel_basis(conj.d_action, p)
    joint = np.hstack([fp.column_space_basis(P, p), ker])
    assert fp.rank(P, p) == ker.shape[1]
    assert fp.rank(joint, p) == ker.shape[1]


@pytest.mark.parametrize("p", PRIMES)
def test_decompose_column_module(p):
    dec = decompose_pdg_module(column_module(p))
    assert dec.shifts == [0]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_decompose_two_variable_truncated_ring(p):
    # k[x1,x2]/(x1^p, x2^p) with x = x1 and d the total lowering operator
    alg = tp.TruncAlgebra(p, 2)
    qdeg = [2 * sum(e) for e in alg.basis_exponents()]
    m = PdgModule(
        p=p,
        qdeg=qdeg,
        x_action=tp.multiplication_matrix(alg.gen(0)),
        d_action=tp.witt_matrix("d_minus", p, 2),
    )
    dec = decompose_pdg_module(m)
    assert dec.shifts == [2 * j for j in range(p)]


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_decompose_recovers_shifts_after_conjugation(p):
    rng = np.random.default_rng(100 + p)
    for _ in range(5):
        shifts = sorted(int(rng.integers(-3, 4)) * 2 for _ in range(int(rng.integers(1, 4))))
        m = block_column_actions(p, shifts)
        S = random_invertible_degree0(m.qdeg, p, rng)
        Sinv = fp.inverse(S, p)
        conj = PdgModule(
            p, list(m.qdeg), (S @ m.x_action @ Sinv) % p, (S @ m.d_action @ Sinv) % p
        )
        dec = decompose_pdg_module(conj)
        assert dec.shifts == shifts
        # the returned basis truly conjugates to block column form
        T = dec.basis
        Tinv = fp.inverse(T, p)
        blk = block_column_actions(p, dec.shifts)
        assert np.array_equal((Tinv @ conj.x_action @ T) % p, blk.x_action)
        assert np.array_equal((Tinv @ conj.d_action @ T) % p, blk.d_action)


def test_decompose_rejects_invalid_module():
    m = column_module(3)
    bad = PdgModule(3, list(m.qdeg), m.x_action.copy(), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        decompose_pdg_module(bad)


# ---------------------------------------------------------------------------
# Slash homology and freeness
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", PRIMES)
def test_slash_homology_vanishes_for_valid_modules(p):
    rng = np.random.default_rng(17 + p)
    shifts = [0, 2, -2][: int(rng.integers(1, 4))]
    m = block_column_actions(p, shifts)
    S = random_invertible_degree0(m.qdeg, p, rng)
    Sinv = fp.inverse(S, p)
    conj = PdgModule(
        p, list(m.qdeg), (S @ m.x_action @ Sinv) % p, (S @ m.d_action @ Sinv) % p
    )
    assert slash_homology_dims(conj) == [0] * (p - 1)
    assert is_acyclic_pdg(conj)


def test_slash_homology_detects_non_free_d():
    # d = 0 on a 1-dimensional space is not free over k[d]/(d^p)
    m = PdgModule(3, [0], np.zeros((1, 1)), np.zeros((1, 1)))
    assert slash_homology_dims(m) == [1, 1]
    assert not is_acyclic_pdg(m)


def test_slash_homology_jordan_block_sizes():
    # one Jordan block of size 2 inside p = 3: ker d = 1 dim, im d^1 = 1 dim
    d = np.array([[0, 1], [0, 0]])
    m = PdgModule(3, [0, 2], np.zeros((2, 2)), d)
    # k=1: ker d (1) - im d^2 (0) = 1 ; k=2: ker d^2 (2) - im d (1) = 1
    assert slash_homology_dims(m) == [1, 1]


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("m_vars", [1, 2])
def test_freeness_criterion_matches_extraction_oracle(p, m_vars):
    rng = np.random.default_rng(31 + p + m_vars)
    alg = tp.TruncAlgebra(p, m_vars)
    free_x = [tp.multiplication_matrix(alg.gen(i)) for i in range(m_vars)]
    n = alg.dim
    for trial in range(6):
        copies = int(rng.integers(1, 3))
        big = [np.kron(np.eye(copies, dtype=np.int64), x) for x in free_x]
        while True:
            S = rng.integers(0, p, size=(copies * n, copies * n))
            if fp.rank(S, p) == copies * n:
                break
        Sinv = fp.inverse(S, p)
        conj = [(S @ x @ Sinv) % p for x in big]
        rep = free_over_trunc(conj, p)
        assert rep.ok and rep.free is True
        assert oracle_free_by_extraction(conj, p)


@pytest.mark.parametrize("p", [2, 3])
def test_freeness_criterion_rejects_padded_module(p):
    # free rank one plus a p-dimensional trivial summand: dimension matches
    # but the top multiplication power has too small a rank
    alg = tp.TruncAlgebra(p, 1)
    x = tp.multiplication_matrix(alg.gen(0))
    padded = np.zeros((2 * p, 2 * p), dtype=np.int64)
    padded[:p, :p] = x
    rep = free_over_trunc([padded], p)
    assert rep.ok and rep.free is False
    assert not oracle_free_by_extraction([padded], p)


def test_freeness_reports_broken_preconditions():
    rep = free_over_trunc([np.array([[1]])], 3)  # x^p = 1 != 0
    assert not rep.ok and rep.free is None
    a = np.array([[0, 1], [0, 0]])
    b = np.array([[0, 0], [1, 0]])
    rep2 = free_over_trunc([a, b], 2)
    assert not rep2.ok and any("commute" in f for f in rep2.failures)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_synthesize_dot_action_produces_valid_module(p):
    rng = np.random.default_rng(41 + p)
    shifts = sorted(int(rng.integers(-2, 3)) * 2 for _ in range(2))
    m = block_column_actions(p, shifts)
    S = random_invertible_degree0(m.qdeg, p, rng)
    Sinv = fp.inverse(S, p)
    d_conj = (S @ m.d_action @ Sinv) % p
    x_new = synthesize_dot_action(d_conj, list(m.qdeg), p)
    rebuilt = PdgModule(p, list(m.qdeg), x_new, d_conj)
    assert validate_pdg_module(rebuilt).ok


def test_synthesize_dot_action_rejects_non_free_d():
    with pytest.raises(ValueError):
        synthesize_dot_action(np.zeros((3, 3)), [0, 0, 0], 3)
