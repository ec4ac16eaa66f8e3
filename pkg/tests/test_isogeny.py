"""Tests for the toy CSIDH group action over F_p."""

import math
import random

import pytest
from hypothesis import given, settings as hsettings, strategies as st

from src.services.isogeny import (
    CsidhParams, CurveError, FieldError, KernelOrderError, MontgomeryCurve, PrimeField, ProjPoint, PublicKey,
    SecretKey, csidh_exponent_bound, group_action, is_supersingular, keygen, ladder, orbit, point_count,
    reconstruct_isogeny_chain, sample_kernel_point, shared_secret, validate_curve, velu_isogeny,
)


def test_prime_field_operations():
    F = PrimeField(419)
    assert F.mul(F.inv(17), 17) == 1
    assert F.div(10, 5) == 2
    assert F.neg(5) == 414
    root = F.sqrt(4)
    assert root in (2, 417)
    assert F.sqrt(F.mul(7, 7)) in (7, 412)
    with pytest.raises(FieldError):
        F.inv(0)
    with pytest.raises(FieldError):
        PrimeField(420)


def test_non_squares_have_no_root():
    F = PrimeField(419)
    non_squares = [a for a in range(1, 419) if not F.is_square(a)]
    assert len(non_squares) == 209
    assert all(F.sqrt(a) is None for a in non_squares)


def test_params_validation():
    params = CsidhParams.from_ells((7, 3, 5))
    assert params.p == 419 and params.ells == (3, 5, 7)
    assert params.discriminant == -1676
    with pytest.raises(CurveError):
        CsidhParams(419, (3, 5, 11))
    with pytest.raises(CurveError):
        CsidhParams.from_ells((3, 3))
    assert CsidhParams.from_ells((3, 5)).p == 59


def test_params_text_format(params419):
    assert params419.to_text() == "p=419\nells=3,5,7\n"
    assert CsidhParams.parse(params419.to_text()) == params419
    with pytest.raises(CurveError):
        CsidhParams.parse("p=420\nells=3,5,7\n")
    with pytest.raises(CurveError):
        CsidhParams.parse("p=419\n")


def test_base_curve_is_supersingular(params419):
    E0 = params419.base_curve
    assert point_count(E0) == 420
    assert is_supersingular(E0, random.Random(1))
    assert E0.j_invariant() == 1728
    assert E0.j_invariant_weierstrass() == 1728


def test_ordinary_curve_rejected(params419):
    p = params419.p
    for A in range(1, p):
        if (A * A - 4) % p == 0:
            continue
        curve = MontgomeryCurve(A, p)
        if point_count(curve) != p + 1:
            break
    assert not is_supersingular(curve, random.Random(2))
    with pytest.raises(CurveError):
        validate_curve(curve, random.Random(2))
    with pytest.raises(CurveError):
        shared_secret(params419, SecretKey((1, 0, 0)), PublicKey(curve.A), random.Random(2))


def test_singular_curve_rejected():
    with pytest.raises(CurveError):
        MontgomeryCurve(2, 419)


@hsettings(max_examples=40, deadline=None)
@given(st.integers(1, 418), st.integers(0, 500), st.integers(0, 500))
def test_ladder_is_multiplicative(x, a, b):
    curve = MontgomeryCurve(0, 419)
    P = ProjPoint(x, 1)
    lhs = ladder(a * b, P, curve)
    rhs = ladder(a, ladder(b, P, curve), curve)
    assert lhs.is_identity == rhs.is_identity
    if not lhs.is_identity:
        assert lhs.X * rhs.Z % 419 == rhs.X * lhs.Z % 419


def test_p_plus_one_kills_every_point(params419):
    E0 = params419.base_curve
    for x in range(1, 419):
        assert ladder(420, ProjPoint(x, 1), E0).is_identity


@pytest.mark.parametrize("ell", [3, 5, 7])
@pytest.mark.parametrize("sign", [1, -1])
def test_kernel_points_have_prime_order(params419, ell, sign):
    E0 = params419.base_curve
    K = sample_kernel_point(E0, ell, sign, random.Random(ell))
    assert not K.is_identity
    assert ladder(ell, K, E0).is_identity
    codomain, push = velu_isogeny(E0, K, ell)
    assert is_supersingular(codomain, random.Random(3))
    assert push(K).Z % 419 == 0


def test_velu_rejects_bad_kernels(params419):
    E0 = params419.base_curve
    K = sample_kernel_point(E0, 3, 1, random.Random(4))
    with pytest.raises(KernelOrderError):
        velu_isogeny(E0, K, 5)
    with pytest.raises(KernelOrderError):
        velu_isogeny(E0, K, 4)


def test_action_independent_of_kernel_choice(params419):
    E0 = params419.base_curve
    results = {group_action(E0, params419.ells, (2, -1, 1), random.Random(seed)) for seed in range(5)}
    assert len(results) == 1


def test_inverse_action_is_twist(params419, rng):
    E0 = params419.base_curve
    e = (1, -1, 1)
    forward = group_action(E0, params419.ells, e, rng)
    backward = group_action(E0, params419.ells, tuple(-x for x in e), rng)
    assert backward == forward.twist()
    assert forward.j_invariant() == forward.twist().j_invariant()


def test_action_commutes(params419, rng):
    E0 = params419.base_curve
    a, b = (1, 0, -1), (0, 1, 1)
    ab = group_action(group_action(E0, params419.ells, a, rng), params419.ells, b, rng)
    ba = group_action(group_action(E0, params419.ells, b, rng), params419.ells, a, rng)
    assert ab == ba


def test_orbit_length_divides_class_number(params419, rng):
    walk = orbit(params419.base_curve, 3, 1, rng)
    assert len(walk) > 1
    assert 27 % len(walk) == 0
    assert len(set(walk)) == len(walk)


def test_exponent_bound():
    assert csidh_exponent_bound(3, 27) == 1
    assert csidh_exponent_bound(3, 28) == 2
    assert csidh_exponent_bound(5, 1) == 1


def test_key_exchange_agrees(params419):
    rng = random.Random(5)
    m = csidh_exponent_bound(len(params419.ells), 27)
    for _ in range(100):
        sk_a, pk_a = keygen(params419, m, rng)
        sk_b, pk_b = keygen(params419, m, rng)
        assert all(abs(e) <= m for e in sk_a.exponents)
        assert shared_secret(params419, sk_a, pk_b, rng) == shared_secret(params419, sk_b, pk_a, rng)


def test_key_exchange_larger_prime(params78539):
    rng = random.Random(6)
    sk_a, pk_a = keygen(params78539, 2, rng)
    sk_b, pk_b = keygen(params78539, 2, rng)
    assert shared_secret(params78539, sk_a, pk_b, rng) == shared_secret(params78539, sk_b, pk_a, rng)


def test_key_text_forms():
    sk = SecretKey((1, -2, 0))
    assert sk.to_text() == "1,-2,0"
    assert (-sk).exponents == (-1, 2, 0)
    assert PublicKey(91).to_text() == "91"


def test_chain_reconstruction(params419, rng):
    E0 = params419.base_curve
    pairs = [(3, 2), (5, -1), (7, 0)]
    chain = reconstruct_isogeny_chain(E0, pairs, rng)
    assert len(chain) == 3
    assert chain.degree == 3 * 3 * 5
    assert chain.start_A == 0
    assert chain.codomain_A == group_action(E0, (3, 5, 7), (2, -1, 0), rng).A
    assert [step.sign for step in chain.steps] == [1, 1, -1]
    for step in chain.steps:
        assert is_supersingular(MontgomeryCurve(step.codomain_A, 419), rng)
    assert math.prod(s.ell for s in chain.steps) == chain.degree


def test_action_rejects_length_mismatch(params419, rng):
    with pytest.raises(CurveError):
        group_action(params419.base_curve, (3, 5), (1,), rng)
