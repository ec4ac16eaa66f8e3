"""Tests for the precomputation, short decompositions and the action oracle."""

import itertools
import math
import random

import pytest

from src.services.classgroup import (
    element_order, group_structure, identity, power, prime_form, reduced_forms,
)
from src.services.experiment_service import random_csidh_discriminant
from src.services.isogeny import group_action, orbit, point_count
from src.services.lattice import hnf
from src.services.oracle import (
    TrialRecord, decompose, evaluate_action, heuristic_experiment, precompute, verify_orientation,
)

TOY_DISCRIMINANTS = [-23, -1676, -3299, -4027, -314156]


def test_forms_precomp_invariants(precomp_forms):
    P = precomp_forms
    assert P.divisors == (3, 9)
    assert P.order == 27
    assert hnf(P.B_reduced).H == P.B_raw
    for v, g in zip(P.vectors, P.generators):
        assert P.recompose(v) == g
    for row in P.B_reduced.tolist():
        assert P.recompose(row) == identity(P.delta)


def test_decompose_lands_in_requested_class(precomp_forms):
    P = precomp_forms
    rng = random.Random(31)
    for _ in range(25):
        y = tuple(rng.randrange(d) for d in P.divisors)
        dec = decompose(P, y)
        assert P.coordinates(dec.exponents) == y
        assert P.recompose(dec.exponents) == P.class_of(y)
        assert dec.primes == tuple(P.primes.norms)
        assert dec.pairs() == list(zip(dec.primes, dec.exponents))


def test_reduced_basis_gives_shorter_decompositions(precomp_forms):
    P = precomp_forms
    rng = random.Random(32)
    reduced, raw = [], []
    for _ in range(40):
        y = tuple(rng.randrange(d) for d in P.divisors)
        reduced.append(decompose(P, y).max_abs)
        raw.append(decompose(P, y, basis="raw", check=False).max_abs)
    assert sum(reduced) <= sum(raw)


def test_dlog_through_structure(precomp_forms):
    P = precomp_forms
    rng = random.Random(33)
    for _ in range(10):
        y = tuple(rng.randrange(d) for d in P.divisors)
        assert P.dlog(P.class_of(y)) == y


def test_consecutive_mode_uses_first_split_primes():
    P = precompute(-1676, mode="consecutive", rng=random.Random(34))
    assert P.primes.norms == [3, 5, 7, 13]
    assert P.divisors == (27,)
    assert P.mode == "consecutive"


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        precompute(-1676, mode="sorted")


def test_curve_precomp_orientation(precomp419, params419, rng):
    assert sorted(precomp419.primes.norms) == [3, 5, 7]
    assert precomp419.order == 27
    assert verify_orientation(precomp419, params419, rng)


def test_evaluate_action_matches_group_action(precomp419, params419, rng):
    E1 = params419.base_curve
    E2 = group_action(E1, params419.ells, (1, -1, 0), rng)
    y = (5,)
    dec = decompose(precomp419, y)
    expected = group_action(E1, dec.primes, dec.exponents, rng)
    assert evaluate_action(precomp419, 0, y, E1, E2, rng) == expected
    assert evaluate_action(precomp419, 1, (0,), E1, E2, rng) == E2


def test_curve_oracle_is_injective_on_the_class_group(precomp419, params419, rng):
    P, E0 = precomp419, params419.base_curve
    coords = [P.dlog(f) for f in reduced_forms(P.delta)]
    assert len(set(coords)) == P.order == 27
    curves = [evaluate_action(P, 0, y, E0, E0, rng) for y in coords]
    assert len({E.A for E in curves}) == 27
    assert all(point_count(E) == params419.p + 1 for E in curves)


def test_orbit_walk_matches_form_discrete_logs(precomp419, params419, rng):
    P, E0 = precomp419, params419.base_curve
    f = prime_form(P.delta, 3)
    walk = orbit(E0, 3, 1, rng)
    assert len(walk) == element_order(f, P.order)
    for k, E in enumerate(walk):
        assert evaluate_action(P, 0, P.dlog(power(f, k)), E0, E0, rng) == E


def test_evaluated_shifts_add(precomp419, params419, rng):
    P, E0 = precomp419, params419.base_curve
    for _ in range(8):
        y1 = tuple(rng.randrange(d) for d in P.divisors)
        y2 = tuple(rng.randrange(d) for d in P.divisors)
        E1 = evaluate_action(P, 0, y1, E0, E0, rng)
        total = tuple((a + b) % d for a, b, d in zip(y1, y2, P.divisors))
        assert evaluate_action(P, 0, y2, E1, E1, rng) == evaluate_action(P, 0, total, E0, E0, rng)


def test_form_oracle_reaches_every_class_once(precomp_forms):
    P = precomp_forms
    classes = [P.recompose(decompose(P, y).exponents)
               for y in itertools.product(*(range(d) for d in P.divisors))]
    assert len(set(classes)) == P.order
    assert set(classes) == set(reduced_forms(P.delta))


def test_heuristic_experiment_rows():
    records = []
    rows = heuristic_experiment([-1676, -3299], trials=20, rng=random.Random(35), records=records)
    assert [r.delta for r in rows] == [-1676, -3299]
    for row in rows:
        assert row.error is None
        assert row.trials == 20
        assert row.max_coefficient <= row.exponent_bound
        assert row.raw_max_coefficient is not None
        assert math.prod(row.divisors) == row.class_number
    assert len(records) == 40
    assert all(isinstance(r, TrialRecord) and r.max_abs == max(abs(e) for e in r.exponents) for r in records)


def test_heuristic_experiment_records_invalid_discriminant():
    rows = heuristic_experiment([7, -1676, -22], trials=5, rng=random.Random(36))
    assert [r.delta for r in rows] == [7, -1676, -22]
    bad, good, worse = rows
    assert bad.error.startswith("DiscriminantError")
    assert bad.max_coefficient is None and bad.trials == 0
    assert worse.error.startswith("DiscriminantError")
    assert good.error is None
    assert good.trials == 5 and good.max_coefficient <= good.exponent_bound


def test_heuristic_experiment_trivial_class_group():
    rows = heuristic_experiment([-163], trials=4, rng=random.Random(39))
    row = rows[0]
    assert row.error is None
    assert row.class_number == 1 and row.divisors == ()
    assert row.max_coefficient == 0


@pytest.mark.parametrize("delta", TOY_DISCRIMINANTS)
def test_precompute_self_consistency(delta):
    rng = random.Random(37)
    S = group_structure(delta, rng)
    P = precompute(delta, structure=S, rng=rng)
    assert P.divisors == S.divisors
    assert hnf(P.B_reduced).H == P.B_raw
    for i, v in enumerate(P.vectors):
        assert P.coordinates(v) == tuple(int(i == j) for j in range(P.rank))


@pytest.mark.slow
def test_twenty_digit_rows_stay_below_bound():
    rng = random.Random(38)
    deltas = [random_csidh_discriminant(20, rng) for _ in range(3)]
    rows = heuristic_experiment(deltas, trials=1000, rng=rng)
    for row in rows:
        assert row.error is None
        assert row.generator_count == 13
        assert row.exponent_bound in (36, 37)
        assert row.max_coefficient <= row.exponent_bound
