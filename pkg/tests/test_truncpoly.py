"""Tests for the truncated polynomial Frobenius algebra and its operators.

Derived expected values were computed by hand (Leibniz rule / direct
expansion) and frozen; displayed structure constants follow the standard
one-variable formulas d_minus = -d/dx, d_zero = -2x d/dx, d_plus = x^2 d/dx.
"""

from __future__ import annotations

import random

import numpy as np
import pytest

from pdgsl2 import fpcore as fp
from pdgsl2.truncpoly import (
    TruncAlgebra,
    TruncPoly,
    apply_witt,
    check_frobenius_compat,
    comultiplication_of_one,
    comultiply,
    counit,
    multiplication_matrix,
    witt_matrix,
)


def random_element(rng, alg, max_terms=4):
    terms = {}
    for _ in range(rng.randrange(0, max_terms + 1)):
        e = tuple(rng.randrange(alg.p) for _ in range(alg.n))
        terms[e] = rng.randrange(alg.p)
    return TruncPoly(alg, terms)


# ---------------------------------------------------------------------------
# algebra arithmetic
# ---------------------------------------------------------------------------


def test_truncation_kills_top_power():
    for p in (2, 3, 5):
        alg = TruncAlgebra(p, 1)
        x = alg.gen()
        top = alg.monomial((p - 1,))
        assert (top * x).is_zero()


def test_square_example_p3():
    # (1 + x)^2 = 1 + 2x + x^2 over F_3, expanded by hand
    alg = TruncAlgebra(3, 1)
    f = alg.one() + alg.gen()
    sq = f * f
    assert sq == TruncPoly(alg, {(0,): 1, (1,): 2, (2,): 1})


def test_coefficients_reduced_and_zero_terms_dropped():
    alg = TruncAlgebra(5, 2)
    f = TruncPoly(alg, {(1, 0): 7, (0, 1): 5, (4, 4): 0})
    assert f.terms == {(1, 0): 2}


def test_scalar_and_negation():
    alg = TruncAlgebra(7, 1)
    x = alg.gen()
    assert 3 * x == TruncPoly(alg, {(1,): 3})
    assert -x == 6 * x


def test_qdeg_and_homogeneity():
    alg = TruncAlgebra(5, 2)
    m = alg.monomial((2, 1))
    assert m.qdeg() == 6
    mixed = m + alg.one()
    assert not mixed.is_homogeneous()
    assert mixed.qdeg() is None


def test_mismatched_algebras_raise():
    a1 = TruncAlgebra(3, 1)
    a2 = TruncAlgebra(5, 1)
    with pytest.raises(ValueError):
        a1.one() + a2.one()


# ---------------------------------------------------------------------------
# comultiplication / counit
# ---------------------------------------------------------------------------


def test_comultiplication_of_one_formula():
    # D(1) = sum_{i=0}^{p-1} x1^i x2^{p-1-i}
    for p in (2, 3, 5, 7):
        d1 = comultiplication_of_one(p)
        assert d1.terms == {(i, p - 1 - i): 1 for i in range(p)}


def test_comultiply_x_p3():
    # D(x) = x1 * D(1) = x1*x2^2 + x1^2*x2 over F_3 (the x1^3 term truncates)
    alg = TruncAlgebra(3, 1)
    dx = comultiply(alg.gen())
    assert dx.terms == {(1, 2): 1, (2, 1): 1}


def test_comultiply_top_power():
    # D(x^{p-1}) = x1^{p-1} x2^{p-1} only (all other terms truncate)
    for p in (2, 3, 5):
        alg = TruncAlgebra(p, 1)
        d = comultiply(alg.monomial((p - 1,)))
        assert d.terms == {(p - 1, p - 1): 1}


def test_counit_picks_top_coefficient():
    for p in (2, 3, 5):
        alg = TruncAlgebra(p, 1)
        for i in range(p):
            assert counit(alg.monomial((i,))) == (1 if i == p - 1 else 0)


def test_counit_comultiply_recover_identity():
    # (counit (x) id) D(a) = a: Frobenius unit axiom, checked on basis elements
    for p in (2, 3, 5):
        alg = TruncAlgebra(p, 1)
        for i in range(p):
            d = comultiply(alg.monomial((i,)))
            # apply counit in x1: keep terms with e1 = p-1, rename x2 -> x
            collapsed = TruncPoly(
                alg, {(e2,): c for (e1, e2), c in d.terms.items() if e1 == p - 1}
            )
            assert collapsed == alg.monomial((i,))


# ---------------------------------------------------------------------------
# differential operators
# ---------------------------------------------------------------------------


def test_witt_actions_one_variable():
    p = 5
    alg = TruncAlgebra(p, 1)
    x2 = alg.monomial((2,))
    assert apply_witt("d_minus", x2) == TruncPoly(alg, {(1,): -2})
    assert apply_witt("d_zero", x2) == TruncPoly(alg, {(2,): -4})
    assert apply_witt("d_plus", x2) == TruncPoly(alg, {(3,): 2})
    # raising the top power truncates to zero
    assert apply_witt("d_plus", alg.monomial((p - 1,))).is_zero()


def test_witt_degree_shifts():
    rng = random.Random(3)
    for p in (3, 5):
        for n in (1, 2):
            alg = TruncAlgebra(p, n)
            for _ in range(20):
                e = tuple(rng.randrange(p) for _ in range(n))
                m = alg.monomial(e)
                lo = apply_witt("d_minus", m)
                hi = apply_witt("d_plus", m)
                w = apply_witt("d_zero", m)
                if not lo.is_zero():
                    assert lo.qdeg() == m.qdeg() - 2
                if not hi.is_zero():
                    assert hi.qdeg() == m.qdeg() + 2
                if not w.is_zero():
                    assert w.qdeg() == m.qdeg()


def test_leibniz_rule_battery():
    for p in (2, 3, 5, 7, 11):
        rng = random.Random(100 + p)
        alg = TruncAlgebra(p, 2)
        for _ in range(500):
            f = random_element(rng, alg)
            g = random_element(rng, alg)
            for op in ("d_minus", "d_zero", "d_plus"):
                lhs = apply_witt(op, f * g)
                rhs = apply_witt(op, f) * g + f * apply_witt(op, g)
                assert lhs == rhs


def test_sl2_bracket_relations_matrices():
    for p in (2, 3, 5, 7):
        for n in (1, 2):
            E = witt_matrix("d_minus", p, n)
            H = witt_matrix("d_zero", p, n)
            F = witt_matrix("d_plus", p, n)
            comm = lambda a, b: (a @ b - b @ a) % p
            assert np.array_equal(comm(H, E), (2 * E) % p)
            assert np.array_equal(comm(H, F), (-2 * F) % p)
            assert np.array_equal(comm(E, F), H % p)


def test_restrictedness_matrices():
    for p in (2, 3, 5):
        for n in (1, 2):
            E = witt_matrix("d_minus", p, n)
            H = witt_matrix("d_zero", p, n)
            F = witt_matrix("d_plus", p, n)
            Ep = np.linalg.matrix_power(E, p) % p
            Fp = np.linalg.matrix_power(F, p) % p
            Hp = np.linalg.matrix_power(H, p) % p
            assert not Ep.any()
            assert not Fp.any()
            assert np.array_equal(Hp, H % p)


def test_twisted_triple_still_sl2_and_restricted():
    # twists modify d_plus by +t_i x_i and d_zero by -t_i; the triple stays
    # an sl(2) with the same lowering operator and remains restricted
    for p in (3, 5):
        for twist in ([1, 0], [2, 3], [0, 0]):
            E = witt_matrix("d_minus", p, 2)
            H = witt_matrix("d_zero", p, 2, twist=twist)
            F = witt_matrix("d_plus", p, 2, twist=twist)
            comm = lambda a, b: (a @ b - b @ a) % p
            assert np.array_equal(comm(H, E), (2 * E) % p)
            assert np.array_equal(comm(H, F), (-2 * F) % p)
            assert np.array_equal(comm(E, F), H % p)
            assert not (np.linalg.matrix_power(F, p) % p).any()
            assert np.array_equal(np.linalg.matrix_power(H, p) % p, H)


def test_difference_variable_killed_by_lowering():
    # y = x1 - x2 and all its powers lie in the kernel of the diagonal d_minus
    for p in (3, 5):
        alg = TruncAlgebra(p, 2)
        y = alg.gen(0) - alg.gen(1)
        power = alg.one()
        for _ in range(p - 1):
            power = power * y
            assert apply_witt("d_minus", power).is_zero()
        assert (power * y).is_zero()  # y^p = 0


def test_multiplication_matrix_matches_product():
    rng = random.Random(8)
    for p in (3, 5):
        alg = TruncAlgebra(p, 2)
        for _ in range(10):
            f = random_element(rng, alg)
            g = random_element(rng, alg)
            m = multiplication_matrix(f)
            assert np.array_equal((m @ g.to_vector()) % p, (f * g).to_vector())


# ---------------------------------------------------------------------------
# Frobenius compatibility
# ---------------------------------------------------------------------------


def test_frobenius_compat_all_primes():
    for p in (2, 3, 5, 7, 11):
        report = check_frobenius_compat(p)
        assert report.ok, report.failures
        assert report.checked == p


def test_frobenius_compat_telescoping_middle_prime():
    # spot-check the telescoping cancellation at p=7 on a middle power
    p = 7
    alg = TruncAlgebra(p, 1)
    a = alg.monomial((3,))
    assert comultiply(apply_witt("d_minus", a)) == apply_witt("d_minus", comultiply(a))


# ---------------------------------------------------------------------------
# text form
# ---------------------------------------------------------------------------


def test_render_examples():
    alg = TruncAlgebra(5, 2)
    f = TruncPoly(alg, {(2, 1): 2, (0, 0): 1})
    assert f.render() == "2*x1^2*x2 + 1"
    assert alg.zero().render() == "0"
    alg1 = TruncAlgebra(5, 1)
    assert (alg1.gen() * alg1.gen()).render() == "x^2"


def test_parse_examples():
    alg = TruncAlgebra(5, 2)
    f = TruncPoly.parse(alg, "2*x1^2*x2 + 1")
    assert f.terms == {(2, 1): 2, (0, 0): 1}
    alg1 = TruncAlgebra(5, 1)
    assert TruncPoly.parse(alg1, "x^2") == alg1.monomial((2,))
    assert TruncPoly.parse(alg1, "0").is_zero()


def test_parse_rejects_bad_input():
    alg = TruncAlgebra(5, 2)
    for bad in ("", "x3", "x1^^2", "x1^7", "+ +", "y"):
        with pytest.raises(ValueError):
            TruncPoly.parse(alg, bad)


def test_render_parse_roundtrip_battery():
    rng = random.Random(77)
    for p in (2, 3, 5, 7):
        for n in (1, 2, 3):
            alg = TruncAlgebra(p, n)
            for _ in range(50):
                f = random_element(rng, alg)
                assert TruncPoly.parse(alg, f.render()) == f


def test_render_deterministic_order():
    alg = TruncAlgebra(3, 2)
    f = TruncPoly(alg, {(0, 1): 1, (1, 0): 1, (2, 2): 1})
    # reverse-lexicographic exponent order
    assert f.render() == "x1^2*x2^2 + x1 + x2"
