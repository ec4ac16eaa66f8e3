"""Tests for exact normal forms, reduction and nearest-plane decoding."""

import math
import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings as hsettings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from src.services.lattice import (
    BabaiDecoder, IntMatrix, LatticeError, RankError, babai_nearest_plane, bkz_reduce, gram_schmidt, hnf,
    hnf_modular, lll, norm_squared, shortest_vector_enum, snf,
)


def square_matrices(max_dim=6, bound=10_000):
    return st.integers(1, max_dim).flatmap(
        lambda n: st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n),
                           min_size=n, max_size=n))


def nonsingular(rows):
    M = IntMatrix(rows)
    return M if M.determinant() != 0 else None


def test_hnf_small_example():
    M = IntMatrix([[2, 0], [1, 3]])
    result = hnf(M)
    assert result.H.is_lower_triangular()
    assert result.U @ M == result.H
    assert abs(result.U.determinant()) == 1
    assert math.prod(result.H.diagonal()) == 6


def test_hnf_rejects_singular():
    with pytest.raises(RankError):
        hnf(IntMatrix([[1, 2], [2, 4]]))


@hsettings(max_examples=60, deadline=None)
@given(square_matrices())
def test_hnf_invariants(rows):
    M = nonsingular(rows)
    assume(M is not None)
    result = hnf(M)
    H = result.H
    assert result.U @ M == H
    assert abs(result.U.determinant()) == 1
    assert H.is_lower_triangular()
    for i in range(H.nrows):
        assert H.row(i)[i] > 0
        for j in range(i):
            assert 0 <= H.row(i)[j] < H.row(i)[i]
    assert math.prod(H.diagonal()) == abs(M.determinant())


@hsettings(max_examples=40, deadline=None)
@given(square_matrices(max_dim=5, bound=200))
def test_hnf_modular_matches_hnf(rows):
    M = nonsingular(rows)
    assume(M is not None)
    D = abs(M.determinant())
    assert hnf_modular(M, D) == hnf(M).H


@hsettings(max_examples=60, deadline=None)
@given(square_matrices())
def test_snf_invariants(rows):
    M = nonsingular(rows)
    assume(M is not None)
    result = snf(M)
    d = result.divisors
    assert result.U @ M @ result.V == result.D
    assert abs(result.U.determinant()) == 1 and abs(result.V.determinant()) == 1
    assert all(x > 0 for x in d)
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))
    assert math.prod(d) == abs(M.determinant())


def test_snf_matches_sympy():
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randint(2, 5)
        rows = [[rng.randint(-50, 50) for _ in range(n)] for _ in range(n)]
        M = IntMatrix(rows)
        if M.determinant() == 0:
            continue
        expected = smith_normal_form(Matrix(rows), domain=ZZ)
        assert sorted(abs(int(expected[i, i])) for i in range(n)) == snf(M).divisors


def test_snf_rectangular_relation_matrix():
    rows = [[2, 0], [0, 3], [4, 6]]
    result = snf(IntMatrix(rows))
    assert result.divisors == [1, 6]


def test_gram_schmidt_orthogonal():
    basis = [[3, 1, 0], [1, 4, 1], [0, 1, 5]]
    norms, mu = gram_schmidt(basis)
    assert all(isinstance(x, Fraction) for x in norms)
    assert math.prod(norms) == IntMatrix(basis).determinant() ** 2


@hsettings(max_examples=40, deadline=None)
@given(square_matrices(max_dim=6, bound=1000))
def test_lll_first_vector_within_bound(rows):
    M = nonsingular(rows)
    assume(M is not None)
    reduced = lll(M)
    assert hnf(reduced).H == hnf(M).H
    _, shortest = shortest_vector_enum(M)
    n = M.nrows
    assert norm_squared(reduced.row(0)) <= 2 ** (n - 1) * shortest


def test_lll_transform_is_unimodular():
    B = IntMatrix([[1, 1, 1], [-1, 0, 2], [3, 5, 6]])
    reduced, U = lll(B, transform=True)
    assert U @ B == reduced
    assert abs(U.determinant()) == 1
    assert norm_squared(reduced.row(0)) <= norm_squared(B.row(0))


def test_lll_rejects_dependent_rows():
    with pytest.raises(RankError):
        lll(IntMatrix([[1, 2], [2, 4]]))


def test_shortest_vector_known_lattice():
    B = IntMatrix([[1, 0, 0], [0, 1, 0], [10, 10, 1]])
    v, norm = shortest_vector_enum(B)
    assert norm == 1
    assert norm_squared(v) == 1


def test_bkz_preserves_lattice_and_shortens():
    rng = random.Random(12)
    n = 6
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    rows[-1] = [rng.randint(0, 10 ** 6) for _ in range(n - 1)] + [10 ** 6 + 3]
    B = IntMatrix(rows)
    reduced = bkz_reduce(B, 4)
    assert hnf(reduced).H == hnf(B).H
    _, shortest = shortest_vector_enum(B)
    assert norm_squared(reduced.row(0)) <= norm_squared(lll(B).row(0))
    assert norm_squared(reduced.row(0)) >= shortest


@hsettings(max_examples=60, deadline=None)
@given(square_matrices(max_dim=5, bound=500), st.data())
def test_babai_residual_in_half_open_box(rows, data):
    M = nonsingular(rows)
    assume(M is not None)
    n = M.nrows
    target = data.draw(st.lists(st.integers(-10 ** 5, 10 ** 5), min_size=n, max_size=n))
    v = babai_nearest_plane(M, target)
    coeffs = BabaiDecoder(M).coefficients(target)
    assert M.apply(coeffs) == v
    residual = [t - x for t, x in zip(target, v)]
    norms, mu = gram_schmidt(M.tolist())
    # Gram-Schmidt coordinates of the residual
    ortho = []
    for i, row in enumerate(M.tolist()):
        w = [Fraction(x) for x in row]
        for j in range(i):
            w = [a - mu[i][j] * b for a, b in zip(w, ortho[j])]
        ortho.append(w)
    for b_star, norm in zip(ortho, norms):
        c = sum((Fraction(r) * b for r, b in zip(residual, b_star)), Fraction(0)) / norm
        assert Fraction(-1, 2) < c <= Fraction(1, 2)


def test_babai_exact_on_lattice_points():
    B = IntMatrix([[5, 1], [2, 7]])
    point = B.apply([3, -2])
    assert babai_nearest_plane(B, point) == point


def test_babai_tie_rounds_down():
    B = IntMatrix([[2]])
    assert babai_nearest_plane(B, [1]) == [0]
    assert babai_nearest_plane(B, [-1]) == [-2]


@pytest.mark.slow
def test_lattice_suite_on_random_matrices():
    rng = random.Random(13)
    checked = 0
    while checked < 200:
        n = rng.randint(1, 8)
        M = IntMatrix([[rng.randint(-10 ** 4, 10 ** 4) for _ in range(n)] for _ in range(n)])
        if M.determinant() == 0:
            continue
        checked += 1
        H = hnf(M)
        assert H.U @ M == H.H and H.H.is_lower_triangular()
        S = snf(M)
        assert S.U @ M @ S.V == S.D
        assert math.prod(S.divisors) == abs(M.determinant())
        _, shortest = shortest_vector_enum(M)
        assert norm_squared(lll(M).row(0)) <= 2 ** (n - 1) * shortest


def test_matrix_text_format():
    M = IntMatrix.parse("2 3\n1 -2 3\n\n4 5 -6\n")
    assert M.tolist() == [[1, -2, 3], [4, 5, -6]]
    assert M.dumps() == "2 3\n1 -2 3\n4 5 -6\n"
    with pytest.raises(LatticeError, match="Row 1 has 2 entries"):
        IntMatrix.parse("1 3\n1 2\n")
    with pytest.raises(LatticeError, match="announces 2 rows"):
        IntMatrix.parse("2 1\n7\n")
