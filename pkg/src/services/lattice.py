"""Integer lattice algorithms.

Hermite and Smith normal forms are exact on Python integers. LLL, BKZ and
enumeration run on fplll through fpylll; nearest-plane decoding uses the
exact Gram-Schmidt basis from SymPy. Bases are stored as rows.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from fpylll import BKZ, GSO, LLL, Enumeration, EnumerationError, IntegerMatrix
from sympy import GramSchmidt, Matrix

from src.config import settings

logger = logging.getLogger(__name__)

Vector = List[int]


class LatticeError(Exception):
    """Base exception for lattice computations."""
    pass


class RankError(LatticeError):
    """The input does not have the rank the operation needs."""
    pass


class LatticeResourceError(LatticeError):
    """Dimension or effort limit exceeded."""
    pass


class IntMatrix:
    """Dense integer matrix, row major."""

    def __init__(self, rows: Iterable[Iterable[int]]):
        self._rows: List[List[int]] = [[int(x) for x in row] for row in rows]
        widths = {len(r) for r in self._rows}
        if len(widths) > 1:
            raise LatticeError(f"Ragged matrix with row lengths {sorted(widths)}")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, entries: Sequence[int]) -> "IntMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def parse(cls, text: str) -> "IntMatrix":
        """Read the text format: a "rows cols" header, then one line of integers per row."""
        lines = [line.split() for line in text.splitlines() if line.strip()]
        if not lines:
            raise LatticeError("Empty matrix text, expected a 'rows cols' header")
        header = lines[0]
        try:
            nrows, ncols = (int(x) for x in header) if len(header) == 2 else (None, None)
        except ValueError:
            nrows = ncols = None
        if nrows is None or nrows < 0 or ncols < 0:
            raise LatticeError(f"Bad matrix header {' '.join(header)!r}, expected 'rows cols'")
        body = lines[1:]
        if len(body) != nrows:
            raise LatticeError(f"Header announces {nrows} rows, found {len(body)}")
        rows = []
        for i, line in enumerate(body, start=1):
            if len(line) != ncols:
                raise LatticeError(f"Row {i} has {len(line)} entries, header announces {ncols}")
            try:
                rows.append([int(x) for x in line])
            except ValueError:
                raise LatticeError(f"Row {i} holds a non-integer entry: {' '.join(line)}")
        return cls(rows)

    def dumps(self) -> str:
        lines = [f"{self.nrows} {self.ncols}"] + [" ".join(map(str, r)) for r in self._rows]
        return "\n".join(lines) + "\n"

    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return len(self._rows[0]) if self._rows else 0

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    def row(self, i: int) -> List[int]:
        return list(self._rows[i])

    def column(self, j: int) -> List[int]:
        return [r[j] for r in self._rows]

    def tolist(self) -> List[List[int]]:
        return [list(r) for r in self._rows]

    def diagonal(self) -> List[int]:
        return [self._rows[i][i] for i in range(min(self.shape))]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(zip(*self._rows)) if self._rows else IntMatrix([])

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise LatticeError(f"Shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other._rows))
        return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._rows])

    def apply(self, v: Sequence[int]) -> List[int]:
        """Row vector times matrix: v @ self."""
        return [sum(a * r[j] for a, r in zip(v, self._rows)) for j in range(self.ncols)]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IntMatrix) and self._rows == other._rows

    def __repr__(self) -> str:
        return f"IntMatrix({self._rows})"

    def determinant(self) -> int:
        if self.nrows != self.ncols:
            raise RankError(f"Determinant of non-square {self.shape} matrix")
        return int(Matrix(self._rows).det())

    def inverse(self) -> "IntMatrix":
        """Inverse of a unimodular matrix."""
        if self.nrows != self.ncols or abs(self.determinant()) != 1:
            raise RankError("Only unimodular matrices have integer inverses")
        return IntMatrix(Matrix(self._rows).inv().tolist())

    def is_lower_triangular(self) -> bool:
        return all(self._rows[i][j] == 0 for i in range(self.nrows)
                   for j in range(i + 1, self.ncols))


@dataclass
class HNFResult:
    """U @ M = H, or [0; H] for tall inputs, with U unimodular."""

    H: IntMatrix
    U: IntMatrix


@dataclass
class SNFResult:
    """U @ B @ V = D with D diagonal and d1 | d2 | ... ."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def divisors(self) -> List[int]:
        return self.D.diagonal()


def _sub_row(rows: List[List[int]], target: int, source: int, q: int) -> None:
    if q:
        src = rows[source]
        rows[target] = [a - q * b for a, b in zip(rows[target], src)]


def _eliminate(rows: List[List[int]], active: List[int], col: int) -> Optional[int]:
    """Euclid on column col among the active rows; returns the surviving row."""
    while True:
        nonzero = [r for r in active if rows[r][col] != 0]
        if not nonzero:
            return None
        pivot = min(nonzero, key=lambda r: abs(rows[r][col]))
        if len(nonzero) == 1:
            return pivot
        for r in nonzero:
            if r != pivot:
                _sub_row(rows, r, pivot, rows[r][col] // rows[pivot][col])


def _reduce_off_diagonal(rows: List[List[int]], pivots: List[int]) -> None:
    # pivots[j] is the row holding the pivot of column j
    for i in range(len(pivots)):
        ri = pivots[i]
        for j in range(i - 1, -1, -1):
            rj = pivots[j]
            _sub_row(rows, ri, rj, rows[ri][j] // rows[rj][j])


def hnf(M: IntMatrix) -> HNFResult:
    """Lower-triangular row Hermite normal form with transformation.

    H has positive pivots and 0 <= h_ij < h_jj below the diagonal. A tall
    input of full column rank gives U @ M = [0; H].
    """
    m, n = M.shape
    if m < n:
        raise RankError(f"{m}x{n} matrix cannot have full column rank")
    rows = [M.row(i) + [int(i == j) for j in range(m)] for i in range(m)]
    bottom = m - 1
    for j in range(n - 1, -1, -1):
        active = list(range(bottom + 1))
        pivot = _eliminate(rows, active, j)
        if pivot is None:
            raise RankError(f"Matrix is singular (column {j} has no pivot)")
        rows[pivot], rows[bottom] = rows[bottom], rows[pivot]
        if rows[bottom][j] < 0:
            rows[bottom] = [-x for x in rows[bottom]]
        bottom -= 1
    offset = m - n
    _reduce_off_diagonal(rows, [offset + j for j in range(n)])
    H = IntMatrix(r[:n] for r in rows[offset:])
    U = IntMatrix(r[n:] for r in rows)
    return HNFResult(H=H, U=U)


def hnf_modular(M: IntMatrix, D: int) -> IntMatrix:
    """Hermite normal form of rowspace(M) + D*Z^n, entries kept below D.

    When D is a multiple of the lattice determinant this is the HNF of the
    row lattice of M itself.
    """
    if D <= 0:
        raise LatticeError(f"Modulus must be positive, got {D}")
    n = M.ncols
    rows = [[x % D for x in M.row(i)] for i in range(M.nrows)]
    rows = [r for r in rows if any(r)]
    pivots: List[List[int]] = [[] for _ in range(n)]
    for j in range(n - 1, -1, -1):
        rows.append([D if i == j else 0 for i in range(n)])
        p = _eliminate(rows, list(range(len(rows))), j)
        pivot_row = rows.pop(p)
        if pivot_row[j] < 0:
            pivot_row = [-x for x in pivot_row]
        pivots[j] = [x % D for x in pivot_row[:j]] + pivot_row[j:]
        rows = [[x % D for x in r] for r in rows]
        rows = [r for r in rows if any(r)]
    _reduce_off_diagonal(pivots, list(range(n)))
    return IntMatrix(pivots)


def _snf_square(A: List[List[int]]) -> Tuple[List[List[int]], List[List[int]], List[List[int]]]:
    n = len(A)
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (A, V):
            for r in M:
                r[i], r[j] = r[j], r[i]

    def add_col(target, source, q):
        for M in (A, V):
            for r in M:
                r[target] -= q * r[source]

    for t in range(n):
        while True:
            entries = [(abs(A[i][j]), i, j) for i in range(t, n) for j in range(t, n) if A[i][j]]
            if not entries:
                raise RankError("Smith normal form input is singular")
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            done = True
            for i in range(t + 1, n):
                q = A[i][t] // p
                _sub_row(A, i, t, q)
                _sub_row(U, i, t, q)
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // p
                add_col(j, t, q)
                if A[t][j]:
                    done = False
            if not done:
                continue
            bad = next((i for i in range(t + 1, n)
                        if any(A[i][j] % p for j in range(t + 1, n))), None)
            if bad is None:
                break
            _sub_row(A, t, bad, -1)
            _sub_row(U, t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return U, A, V


def snf(B: IntMatrix) -> SNFResult:
    """Smith normal form U @ B @ V = D, divisors ascending under divisibility.

    A tall full-rank input is first brought to Hermite form; the returned U
    then has as many rows as B has columns.
    """
    m, n = B.shape
    if m == n:
        U, D, V = _snf_square(B.tolist())
        return SNFResult(U=IntMatrix(U), D=IntMatrix(D), V=IntMatrix(V))
    h = hnf(B)
    inner = snf(h.H)
    U_bottom = IntMatrix(h.U.row(i) for i in range(m - n, m))
    return SNFResult(U=inner.U @ U_bottom, D=inner.D, V=inner.V)


def _to_integer_matrix(B: IntMatrix) -> IntegerMatrix:
    return IntegerMatrix.from_matrix(B.tolist())


def _from_integer_matrix(A: IntegerMatrix) -> IntMatrix:
    rows = [[0] * A.ncols for _ in range(A.nrows)]
    A.to_matrix(rows)
    return IntMatrix(rows)


def _check_independent(B: IntMatrix) -> None:
    if any(not any(row) for row in B.tolist()):
        raise RankError("Basis vectors are linearly dependent")


def _orthogonalize(basis: Sequence[Sequence[int]]) -> Tuple[List[List[Fraction]], List[Fraction]]:
    try:
        vectors = GramSchmidt([Matrix(row) for row in basis])
    except ValueError as e:
        raise RankError(f"Basis vectors are linearly dependent: {e}")
    ortho = [[Fraction(int(x.p), int(x.q)) for x in v] for v in vectors]
    norms = [sum((x * x for x in v), Fraction(0)) for v in ortho]
    return ortho, norms


def gram_schmidt(basis: Sequence[Sequence[int]]) -> Tuple[List[Fraction], List[List[Fraction]]]:
    """Exact squared Gram-Schmidt norms and the mu coefficients."""
    n = len(basis)
    if n == 0:
        return [], []
    ortho, norms = _orthogonalize(basis)
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        mu[i][i] = Fraction(1)
        for j in range(i):
            mu[i][j] = sum((a * b for a, b in zip(basis[i], ortho[j])), Fraction(0)) / norms[j]
    return norms, mu


def lll(B: IntMatrix, delta: Optional[float] = None,
        transform: bool = False) -> Union[IntMatrix, Tuple[IntMatrix, IntMatrix]]:
    """LLL-reduce the rows of B with fplll.

    With transform=True returns (reduced, U) where U @ B == reduced and U is
    unimodular.
    """
    delta = delta if delta is not None else settings.lll_delta
    if B.nrows == 0:
        return (B, IntMatrix([])) if transform else B
    A = _to_integer_matrix(B)
    U = IntegerMatrix.identity(B.nrows)
    LLL.reduction(A, U, delta=delta)
    reduced = _from_integer_matrix(A)
    _check_independent(reduced)
    if transform:
        return reduced, _from_integer_matrix(U)
    return reduced


def shortest_vector_enum(B: IntMatrix) -> Tuple[List[int], int]:
    """Shortest nonzero vector of the row lattice and its squared norm."""
    n = B.nrows
    if n > settings.enum_max_dim:
        raise LatticeResourceError(f"Enumeration limited to dimension {settings.enum_max_dim}, got {n}")
    basis = lll(B)
    best = basis.row(0)
    if n == 1:
        return best, norm_squared(best)
    A = _to_integer_matrix(basis)
    M = GSO.Mat(A)
    M.update_gso()
    try:
        solutions = Enumeration(M, nr_solutions=4).enumerate(0, n, M.get_r(0, 0), 0)
    except EnumerationError:
        solutions = []
    for _, coeffs in solutions:
        v = basis.apply([int(round(c)) for c in coeffs])
        if any(v) and norm_squared(v) < norm_squared(best):
            best = v
    return best, norm_squared(best)


def bkz_reduce(B: IntMatrix, block_size: int, max_tours: Optional[int] = None) -> IntMatrix:
    """Progressive BKZ up to block_size, fplll enumeration inside each block."""
    max_tours = max_tours or settings.bkz_max_tours
    n = B.nrows
    block_size = max(2, min(block_size, n))
    if block_size > settings.enum_max_dim:
        raise LatticeResourceError(f"Block size {block_size} exceeds the enumeration limit "
                                   f"{settings.enum_max_dim}")
    if n <= 1:
        return lll(B)
    A = _to_integer_matrix(B)
    LLL.reduction(A, delta=settings.lll_delta)
    for beta in range(2, block_size + 1):
        param = BKZ.Param(block_size=beta, max_loops=max_tours,
                          flags=BKZ.MAX_LOOPS | BKZ.AUTO_ABORT)
        BKZ.reduction(A, param)
        logger.debug(f"BKZ-{beta}: |b1|^2={sum(A[0, j] ** 2 for j in range(A.ncols))}")
    reduced = _from_integer_matrix(A)
    _check_independent(reduced)
    return reduced


def _round_half_down(x: Fraction) -> int:
    return math.ceil(x - Fraction(1, 2))


class BabaiDecoder:
    """Nearest-plane decoding against a fixed basis.

    The residual t - v has Gram-Schmidt coordinates in (-1/2, 1/2]: ties are
    rounded toward minus infinity. Projections are exact rationals.
    """

    def __init__(self, basis: IntMatrix):
        self.basis = basis
        self._rows = basis.tolist()
        self._ortho, self._norms = _orthogonalize(self._rows)

    def coefficients(self, target: Sequence) -> List[int]:
        residual = [Fraction(x) for x in target]
        coeffs = [0] * len(self._rows)
        for i in range(len(self._rows) - 1, -1, -1):
            proj = sum((a * b for a, b in zip(residual, self._ortho[i])), Fraction(0)) / self._norms[i]
            c = _round_half_down(proj)
            coeffs[i] = c
            if c:
                residual = [a - c * b for a, b in zip(residual, self._rows[i])]
        return coeffs

    def closest(self, target: Sequence) -> List[int]:
        return self.basis.apply(self.coefficients(target))


def babai_nearest_plane(B: IntMatrix, t: Sequence) -> List[int]:
    """Lattice vector close to t; ||t - v||^2 <= sum of squared GS norms / 4."""
    return BabaiDecoder(B).closest(t)

def norm_squared(v: Sequence[int]) -> int:
    return sum(x * x for x in v)


def max_norm(v: Sequence) -> int:
    return max((abs(x) for x in v), default=0)
