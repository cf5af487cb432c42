import random

import pytest
from hypothesis import given, settings, strategies as st

from cmktheory import k1
from cmktheory.k1 import (
    Decomposition,
    Elementary,
    ar_lift,
    commutator_identity_check,
    delta,
    elementary_factorization,
    k1_compute,
    mu,
    omega,
    tilde,
    whitehead_factorization,
    word_product,
    xi_closed_form,
    xi_generator,
)
from cmktheory.rings import Cusp, DualNumbers, EndoMatrix, Field, NotInvertible, Support, TruncatedSeries

F5 = Field(5)
DUAL = DualNumbers(F5)
CUSP = Cusp(F5, 8)


def ser(system, coeffs, support=Support.FULL):
    return TruncatedSeries.of(system.field, coeffs, system.precision, support)


def test_decomposition_q_and_v():
    x = Decomposition((2, 0, 3), (1, 1, 2))
    assert x.q == 2 and x.v == (0, 2, 1)
    assert Decomposition((0, 1), (1, 1)).q == 1
    with pytest.raises(ValueError):
        Decomposition((1, 1), (1, 0))


def test_psi_is_a_bijection():
    for n, m in [((2, 0, 3), (1, 1, 2)), ((0, 4), (1, 1)), ((1, 1), (1, 1))]:
        x = Decomposition(n, m)
        psi = x.psi()
        assert sorted(psi) == list(range(x.q * sum(m)))


def test_tilde_single_summand():
    h = ser(CUSP, [2, 1, 3])
    alpha = EndoMatrix.of(CUSP, (1,), [[h]])
    q, res = tilde(Decomposition((0, 1), (1, 1)), alpha)
    assert q == 1
    assert res == EndoMatrix.diag(CUSP, (0, 1), [1, h])


def test_tilde_whole_generator_is_identity_map():
    a = k1.random_automorphism(random.Random(3), CUSP)
    q, res = tilde(Decomposition((1, 1), (1, 1)), a)
    assert q == 1 and res == a


def test_tilde_dual_free_summand():
    alpha = EndoMatrix.of(DUAL, (0,), [[3]])
    assert tilde(Decomposition((1, 0), (1, 1)), alpha)[1] == EndoMatrix.diag(DUAL, (0, 1), [3, 1])


def test_tilde_rejects_non_invertible():
    alpha = EndoMatrix.of(CUSP, (1,), [[ser(CUSP, [0, 1])]])
    with pytest.raises(NotInvertible):
        tilde(Decomposition((0, 1), (1, 1)), alpha)


def test_tilde_q_two():
    rng = random.Random(0)
    x = Decomposition((2, 0), (1, 1))
    a = k1.random_automorphism(rng, CUSP, (0, 0))
    b = k1.random_automorphism(rng, CUSP, (0, 0))
    q, ta = tilde(x, a)
    assert q == 2 and ta.size == 4
    assert tilde(x, a @ b)[1] == ta @ tilde(x, b)[1]
    blocks = k1.blocks(ta, 2)
    assert blocks[0][0][0, 0] == a[0, 0] and blocks[1][0][0, 0] == a[1, 0]
    assert blocks[0][0][1, 1] == CUSP.one(1)
    with pytest.raises(NotImplementedError):
        k1.det_E(ta, 2)


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from([DUAL, CUSP]))
def test_tilde_multiplicative(rng, system):
    x = Decomposition((1, 1), (1, 1))
    a, b = k1.random_automorphism(rng, system), k1.random_automorphism(rng, system)
    assert tilde(x, a @ b)[1] == tilde(x, a)[1] @ tilde(x, b)[1]


def test_dual_lift():
    beta, gamma = ar_lift(DUAL, ser(DUAL, [3], Support.SEMIGROUP))
    assert beta == EndoMatrix.of(DUAL, (0,), [[3]])
    assert gamma == EndoMatrix.of(DUAL, (1,), [[3]])


def test_cusp_lift():
    beta, gamma = ar_lift(CUSP, ser(CUSP, [1]))
    assert beta.is_identity() and gamma.is_identity()
    h = ser(CUSP, [2, 3, 1, 4, 0, 1])
    beta, gamma = ar_lift(CUSP, h)
    f, g = k1.split_unit(h)
    T = TruncatedSeries.monomial(F5, 1, 8)
    assert f + g * T == h
    assert beta == EndoMatrix.of(CUSP, (0, 1), [[f, g], [g * T * T, f]])
    assert gamma == EndoMatrix.of(CUSP, (1,), [[f - g * T]])


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_cusp_lift_commutes(rng):
    h = k1.random_series(rng, CUSP, Support.FULL, True)
    beta, gamma = ar_lift(CUSP, h)
    assert k1.check_lift(CUSP, k1.automorphism_of_m(CUSP, h), beta, gamma)
    assert (beta @ k1.beta_inverse_closed_form(CUSP, h)).is_identity()


def test_dual_xi():
    for a in F5.units():
        h = ser(DUAL, [a], Support.SEMIGROUP)
        xi = xi_generator(DUAL, h)
        assert xi == EndoMatrix.diag(DUAL, (0, 1), [pow(a, -1, 5), a * a % 5])
        # det = a^-1 * a^2 = a, so omega is (a^-1, a)
        assert delta(xi) == (pow(a, -1, 5), ser(DUAL, [a], Support.SEMIGROUP))
        assert omega(xi) == (pow(a, -1, 5), a)


def test_xi_of_identity():
    for system in (DUAL, CUSP):
        assert xi_generator(system, system.one(1).retag(Support.FULL)).is_identity()


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_cusp_xi_closed_form(rng):
    h = k1.random_series(rng, CUSP, Support.FULL, True)
    assert xi_generator(CUSP, h) == xi_closed_form(CUSP, h)


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_cusp_omega_of_xi_residue(rng):
    # xi_11 = f / (f^2 - g^2 T^2) has constant term f(0)^-1 = h(0)^-1
    h = k1.random_series(rng, CUSP, Support.FULL, True)
    res, val = omega(xi_generator(CUSP, h))
    assert res == F5.inv(h.c0)
    assert val == ser(CUSP, [1])


def test_cusp_omega_of_xi_set():
    # as a set, omega(Xi) is still k* + {1}
    rng = random.Random(0)
    images = {omega(xi_generator(CUSP, k1.random_series(rng, CUSP, Support.FULL, True))) for _ in range(80)}
    assert {r for r, _ in images} == set(F5.units())
    assert {v for _, v in images} == {ser(CUSP, [1])}


def test_lift_independence_dual():
    for a in F5.units():
        h = ser(DUAL, [a], Support.SEMIGROUP)
        _, gamma = ar_lift(DUAL, h)
        for c in range(5):
            beta2 = EndoMatrix.of(DUAL, (0,), [[ser(DUAL, [a, c])]])
            assert omega(xi_generator(DUAL, h, lift=(beta2, gamma))) == omega(xi_generator(DUAL, h))


def test_bad_lift_rejected():
    h = ser(DUAL, [2], Support.SEMIGROUP)
    _, gamma = ar_lift(DUAL, h)
    with pytest.raises(k1.InternalConsistencyError):
        xi_generator(DUAL, h, lift=(EndoMatrix.of(DUAL, (0,), [[3]]), gamma))


def test_delta_examples():
    for system in (DUAL, CUSP):
        assert delta(EndoMatrix.identity(system, (0, 1))) == (1, system.one(1))
    phi = ser(CUSP, [2, 1, 0, 3])
    assert delta(EndoMatrix.diag(CUSP, (0, 1), [3, phi * F5.inv(3)])) == (3, phi)


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from([DUAL, CUSP]))
def test_delta_is_multiplicative(rng, system):
    a, b = k1.random_automorphism(rng, system), k1.random_automorphism(rng, system)
    (ra, da), (rb, db) = delta(a), delta(b)
    assert delta(a @ b) == (system.field(ra * rb), system.normalize(1, 1, da * db))


def test_delta_rejects_non_invertible():
    with pytest.raises(NotInvertible):
        delta(EndoMatrix.diag(CUSP, (0, 1), [0, 1]))


def test_k1_dual_f5():
    report = k1_compute(DUAL)
    assert report.ok and report.group == "k*"
    assert ("2+3X", "4") in report.lambda_table
    assert report.mu_image == ["1", "4"]
    assert len(report.lambda_table) == 20


def test_k1_dual_f7_squares():
    report = k1_compute(DualNumbers(Field(7)))
    assert report.ok
    assert report.mu_image == ["1", "2", "4"] and report.mu_image_index == 2
    assert len(report.lambda_table) == 42


def test_k1_cusp_inclusion():
    f = ser(CUSP, [1, 0, 1], Support.SEMIGROUP)
    assert mu(CUSP, f) == ser(CUSP, [1, 0, 1])
    report = k1_compute(CUSP, n_samples=30, seed=4)
    assert report.ok and report.seed == 4
    assert all(u == v for u, v in report.lambda_table)


def test_k1_over_rationals():
    assert k1_compute(DualNumbers(Field(None)), n_samples=10).ok
    assert k1_compute(Cusp(Field(None), 5), n_samples=10).ok


def test_unsupported_family():
    with pytest.raises(k1.UnsupportedFamily):
        k1.family_system("node", F5)


def test_whitehead_examples():
    mods = (0, 1)
    for system, r in ((DUAL, ser(DUAL, [1])), (DUAL, ser(DUAL, [1, 1])), (CUSP, ser(CUSP, [1, 0, 1]))):
        fs = whitehead_factorization(system, r)
        prod = fs[0] @ fs[1] @ fs[2] @ fs[3]
        assert prod == EndoMatrix.diag(system, mods, [r, r.inverse()])
        for e in fs:
            slot = k1.elementary_slot(e)
            assert slot is None or commutator_identity_check(system, mods, *slot)
    with pytest.raises(ValueError):
        whitehead_factorization(DUAL, ser(DUAL, [2, 1]))
    with pytest.raises(ValueError):
        whitehead_factorization(CUSP, ser(CUSP, [1, 1]))


def test_elementary_examples():
    assert elementary_factorization(EndoMatrix.identity(CUSP, (0, 1))) == []
    phi, m = ser(CUSP, [2, 0, 1], Support.SEMIGROUP), ser(CUSP, [0, 0, 3], Support.IDEAL)
    word = [Elementary("d", 0, 0, phi), Elementary("e", 1, 0, m)]
    a = word_product(word, CUSP, (0, 1))
    assert elementary_factorization(a) == word
    assert [str(w) for w in word] == ["d1(2+T^2)", "e21(3T^2)"]


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_elementary_factorization_cusp_n6(rng):
    system = Cusp(F5, 6)
    a = k1.random_automorphism(rng, system)
    word = elementary_factorization(a)
    assert word_product(word, system, (0, 1)) == a
    for w in word:
        if w.kind == "e":
            assert commutator_identity_check(system, (0, 1), w.i, w.j, w.entry)


def test_commutator_identity_examples():
    mods = (0, 1)
    assert commutator_identity_check(DUAL, mods, 0, 1, 0)
    assert commutator_identity_check(DUAL, mods, 0, 1, 1)  # inclusion m -> R
    rng = random.Random(11)
    for _ in range(20):
        mu_ = k1.random_series(rng, CUSP, Support.FULL, False)
        assert commutator_identity_check(CUSP, mods, 0, 1, mu_)


def test_prop_mu_is_square_of_residue():
    for p in (5, 7):
        system = DualNumbers(Field(p))
        units = k1.enumerate_units(system, Support.FULL)
        assert len(units) == p * (p - 1)
        for r in units:
            assert mu(system, r) == r.c0**2 % p


def test_sampling_modes():
    assert k1.sample_units(DUAL, Support.FULL, 5, random.Random(0))[1] == "exhaustive"
    assert k1.sample_units(CUSP, Support.FULL, 5, random.Random(0))[1] == "random"
    assert k1.enumerate_units(Cusp(Field(3), 4), Support.SEMIGROUP) is not None
