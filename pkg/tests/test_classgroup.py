"""Tests for binary quadratic forms and class group computations."""

import math
import random

import pytest
from hypothesis import given, settings as hsettings, strategies as st

from src.services.classgroup import (
    DiscriminantError, QuadForm, RamifiedError, class_number_bsgs, compose, dlog, group_structure,
    identity, inverse, is_identity, power, prime_form, random_class, reduce, reduced_forms,
    validate_discriminant,
)

SMALL_DISCRIMINANTS = [-23, -47, -56, -71, -84, -104, -419, -1676, -3299]


def test_reduce_example_form():
    f = reduce(QuadForm(6, 5, 2))
    assert f == QuadForm(2, -1, 3)
    assert f.discriminant == -23
    assert f.is_reduced()


def test_reduce_worked_example():
    assert reduce(QuadForm(3, 1, 2)) == QuadForm(2, -1, 3)


def test_reduce_rejects_wrong_discriminant():
    with pytest.raises(DiscriminantError):
        reduce(QuadForm(6, 5, 2), -47)


@pytest.mark.parametrize("delta", [5, 0, -22, -1])
def test_invalid_discriminants(delta):
    with pytest.raises(DiscriminantError):
        validate_discriminant(delta)


def test_parse_round_trip_text():
    f = QuadForm.parse("2,-1,3@-23")
    assert f == QuadForm(2, -1, 3)
    assert str(f) == "2,-1,3@-23"
    with pytest.raises(DiscriminantError):
        QuadForm.parse("2,1,3@-47")


@pytest.mark.parametrize("delta,h", [(-23, 3), (-47, 5), (-71, 7), (-56, 4), (-84, 4), (-163, 1)])
def test_small_class_numbers(delta, h):
    assert len(reduced_forms(delta)) == h
    assert class_number_bsgs(delta, random.Random(0)) == h


@pytest.mark.parametrize("delta,h", [(-64, 2), (-108, 3), (-112, 2), (-172, 3), (-268, 3), (-288, 4), (-352, 4)])
def test_non_fundamental_class_numbers(delta, h):
    assert len(reduced_forms(delta)) == h
    assert class_number_bsgs(delta, random.Random(1)) == h
    assert group_structure(delta, random.Random(2)).order == h


@pytest.mark.parametrize("delta", [-3, -4, -163])
def test_trivial_class_groups(delta):
    assert class_number_bsgs(delta, random.Random(0)) == 1
    assert group_structure(delta, random.Random(0)).divisors == ()


def test_compose_with_shared_leading_coefficients():
    S = group_structure(-3299, random.Random(9))
    forms = reduced_forms(-3299)
    pairs = [(f, g) for f in forms for g in forms if math.gcd(f.a, g.a) > 1]
    assert pairs
    for f, g in pairs:
        expected = S.element([x + y for x, y in zip(dlog(S, f), dlog(S, g))])
        assert compose(f, g) == expected


def test_csidh_class_numbers():
    assert class_number_bsgs(-1676, random.Random(0)) == 27
    assert class_number_bsgs(-314156, random.Random(0)) == 459


def test_identity_and_inverse():
    delta = -1676
    e = identity(delta)
    assert is_identity(e)
    for f in reduced_forms(delta):
        assert compose(f, e) == f
        assert is_identity(compose(f, inverse(f)))


@hsettings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL_DISCRIMINANTS), st.data())
def test_composition_is_associative_and_commutative(delta, data):
    forms = reduced_forms(delta)
    f, g, h = (data.draw(st.sampled_from(forms)) for _ in range(3))
    assert compose(f, g) == compose(g, f)
    assert compose(compose(f, g), h) == compose(f, compose(g, h))
    assert compose(f, g).is_reduced()


@hsettings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL_DISCRIMINANTS), st.data(), st.integers(-50, 50), st.integers(-50, 50))
def test_power_is_a_homomorphism(delta, data, x, y):
    f = data.draw(st.sampled_from(reduced_forms(delta)))
    assert power(f, x + y) == compose(power(f, x), power(f, y))
    assert power(f, -x) == inverse(power(f, x))


def test_class_number_kills_every_form():
    for delta in SMALL_DISCRIMINANTS:
        forms = reduced_forms(delta)
        for f in forms:
            assert is_identity(power(f, len(forms)))


def test_prime_forms():
    f = prime_form(-23, 3, reduced=False)
    assert f.a == 3 and f.discriminant == -23 and f.b > 0
    assert prime_form(-23, 2) is not None
    assert prime_form(-23, 5) is None
    with pytest.raises(RamifiedError):
        prime_form(-23, 23)
    for ell in (3, 5, 7):
        form = prime_form(-1676, ell, reduced=False)
        assert form.a == ell
        assert reduce(form) == prime_form(-1676, ell)


@pytest.mark.parametrize("delta,divisors", [(-84, (2, 2)), (-23, (3,)), (-1676, (27,)), (-3299, (3, 9))])
def test_group_structure(delta, divisors):
    S = group_structure(delta, random.Random(3))
    assert S.divisors == divisors
    assert math.prod(S.divisors) == S.order
    for g, d in zip(S.generators, S.divisors):
        assert is_identity(power(g, d))


def test_dlog_recovers_coordinates():
    S = group_structure(-3299, random.Random(4))
    rng = random.Random(5)
    for _ in range(30):
        y = tuple(rng.randrange(d) for d in S.divisors)
        assert dlog(S, S.element(y)) == y
    for _ in range(10):
        f = random_class(S, rng)
        assert S.element(dlog(S, f)) == f


def test_group_structure_every_class_reached():
    S = group_structure(-1676, random.Random(6))
    seen = {S.element((i,)) for i in range(S.divisors[0])}
    assert seen == set(reduced_forms(-1676))


def _discriminants_below(bound):
    for n in range(3, bound):
        if (-n) % 4 in (0, 1):
            yield -n


def test_bsgs_agrees_with_enumeration_small():
    rng = random.Random(7)
    for delta in _discriminants_below(500):
        h = len(reduced_forms(delta))
        assert class_number_bsgs(delta, rng) == h, delta


@pytest.mark.slow
def test_bsgs_and_structure_agree_with_enumeration():
    rng = random.Random(8)
    for delta in _discriminants_below(100_000):
        h = len(reduced_forms(delta))
        assert class_number_bsgs(delta, rng) == h, delta
        assert math.prod(group_structure(delta, rng).divisors) == h, delta
