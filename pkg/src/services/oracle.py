"""Short decompositions of ideal classes and the class group action oracle.

A precomputation reduces the relation lattice of s generating primes with
BKZ and reads generators of Cl(delta) off its Smith normal form. Any class,
given by its coordinates with respect to those generators, is then written
as a product of the primes with small exponents by nearest-plane decoding,
and the group action is evaluated one prime-degree isogeny at a time.
"""

from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from src.services.classgroup import (
    ClassGroupError, ClassGroupStructure, QuadForm, compose, group_structure, identity, power,
)
from src.services.genset import (
    HeuristicFailure, PrimeList, RelationLattice, adaptive_prime_pool, build_relation_lattice,
    heuristic_parameters, select_generators, split_prime_pool,
)
from src.services.isogeny import CsidhParams, MontgomeryCurve, group_action
from src.services.lattice import BabaiDecoder, IntMatrix, LatticeError, bkz_reduce, hnf, snf

logger = logging.getLogger(__name__)

PRIME_MODES = ("consecutive", "reordered")


@dataclass(frozen=True)
class ShortDecomposition:
    """Exponents e with prod p_i^{e_i} in a given class."""

    primes: Tuple[int, ...]
    exponents: Tuple[int, ...]

    @property
    def max_abs(self) -> int:
        return max((abs(e) for e in self.exponents), default=0)

    @property
    def length(self) -> int:
        return sum(abs(e) for e in self.exponents)

    def pairs(self) -> List[Tuple[int, int]]:
        return list(zip(self.primes, self.exponents))


@dataclass
class OraclePrecomp:
    """Generating primes, reduced relation basis and SNF generators."""

    delta: int
    primes: PrimeList
    B_raw: IntMatrix
    B_reduced: IntMatrix
    divisors: Tuple[int, ...]
    generators: Tuple[QuadForm, ...]
    vectors: Tuple[Tuple[int, ...], ...]
    functionals: Tuple[Tuple[int, ...], ...]
    block_size: int
    mode: str
    structure: Optional[ClassGroupStructure] = field(default=None, repr=False)
    structure_preimages: Optional[IntMatrix] = field(default=None, repr=False)
    _decoders: Dict[str, BabaiDecoder] = field(default_factory=dict, repr=False)

    @property
    def rank(self) -> int:
        return len(self.divisors)

    @property
    def order(self) -> int:
        return math.prod(self.divisors)

    def decoder(self, basis: str = "reduced") -> BabaiDecoder:
        if basis not in self._decoders:
            B = self.B_reduced if basis == "reduced" else self.B_raw
            self._decoders[basis] = BabaiDecoder(B)
        return self._decoders[basis]

    def recompose(self, exponents: Sequence[int]) -> QuadForm:
        """Class of prod p_i^{e_i}."""
        result = identity(self.delta)
        for form, e in zip(self.primes.forms, exponents):
            if e:
                result = compose(result, power(form, e))
        return result

    def coordinates(self, exponents: Sequence[int]) -> Tuple[int, ...]:
        """Coordinates of prod p_i^{e_i} in Z/d_1 x ... x Z/d_l."""
        return tuple(sum(x * v for x, v in zip(exponents, col)) % d
                     for col, d in zip(self.functionals, self.divisors))

    def class_of(self, y: Sequence[int]) -> QuadForm:
        """prod g_i^{y_i}."""
        result = identity(self.delta)
        for g, e, d in zip(self.generators, y, self.divisors):
            result = compose(result, power(g, e % d))
        return result

    def dlog(self, f: QuadForm) -> Tuple[int, ...]:
        """Coordinates of an arbitrary class, through the group structure."""
        if self.structure is None or self.structure_preimages is None:
            raise ClassGroupError("Precomputation carries no group structure for discrete logs")
        y = self.structure.dlog(f)
        x = [0] * len(self.primes)
        for yj, row in zip(y, self.structure_preimages.tolist()):
            x = [a + yj * b for a, b in zip(x, row)]
        return self.coordinates(x)


def _reduced_basis(lattice: RelationLattice, block_size: int) -> IntMatrix:
    B_raw = lattice.basis
    beta = min(block_size, B_raw.nrows)
    if beta < 2:
        return B_raw
    B_reduced = bkz_reduce(B_raw, beta)
    if hnf(B_reduced).H != B_raw:
        raise LatticeError("Reduced relation basis spans a different lattice")
    return B_reduced


def precompute(delta: int, mode: str = "reordered", allowed: Optional[Iterable[int]] = None,
               block_size: Optional[int] = None, structure: Optional[ClassGroupStructure] = None,
               rng: Optional[random.Random] = None) -> OraclePrecomp:
    """Generating primes, BKZ-reduced relation basis, SNF generators.

    Args:
        delta: discriminant of the order
        mode: "reordered" runs the generator selection, "consecutive" takes
            the first s split primes as they come
        allowed: restrict the prime pool (the CSIDH primes in curve mode)
        block_size: BKZ block size, default ceil(ln^{1/3} |delta|)
        structure: class group structure, computed when omitted
        rng: randomness for the class group computation

    Returns:
        OraclePrecomp with every invariant checked
    """
    if mode not in PRIME_MODES:
        raise ValueError(f"Unknown prime mode {mode!r}, expected one of {PRIME_MODES}")
    params = heuristic_parameters(delta)
    S = structure or group_structure(delta, rng)
    s = params.generator_count
    if allowed is not None:
        pool = split_prime_pool(delta, allowed=allowed)
    elif mode == "consecutive":
        pool = split_prime_pool(delta, count=s)
    else:
        pool = adaptive_prime_pool(delta, s)
    if not pool.primes:
        raise HeuristicFailure(f"No split primes available for {delta}")
    s = min(s, len(pool))
    if mode == "reordered":
        primes = select_generators(S, pool, s)
    else:
        primes = pool.prefix(s)
    lattice = build_relation_lattice(S, primes)
    if not lattice.generates:
        raise HeuristicFailure(f"Primes {primes.norms} generate a subgroup of index "
                               f"{lattice.cokernel_index} in Cl({delta})")
    beta = block_size or params.block_size
    B_reduced = _reduced_basis(lattice, beta)

    result = snf(B_reduced)
    diag = result.divisors
    nontrivial = [i for i, d in enumerate(diag) if d != 1]
    V_inv = result.V.inverse()
    vectors = tuple(tuple(V_inv.row(i)) for i in nontrivial)
    functionals = tuple(tuple(result.V.column(i)) for i in nontrivial)
    divisors = tuple(diag[i] for i in nontrivial)

    precomp = OraclePrecomp(
        delta=delta, primes=primes, B_raw=lattice.basis, B_reduced=B_reduced,
        divisors=divisors, generators=(), vectors=vectors, functionals=functionals,
        block_size=beta, mode=mode, structure=S, structure_preimages=lattice.preimages,
    )
    precomp.generators = tuple(precomp.recompose(v) for v in vectors)
    _verify_precomp(precomp)
    logger.info(f"Oracle precomputation for {delta}: primes {primes.norms}, "
                f"divisors {list(divisors)}, BKZ-{beta}, mode {mode}")
    return precomp


def _verify_precomp(P: OraclePrecomp) -> None:
    if P.order != P.structure.order:
        raise ClassGroupError(f"SNF divisors {list(P.divisors)} multiply to {P.order}, "
                              f"expected h={P.structure.order}")
    for i, (v, g, d) in enumerate(zip(P.vectors, P.generators, P.divisors)):
        unit = tuple(int(i == j) for j in range(P.rank))
        if P.coordinates(v) != unit:
            raise ClassGroupError(f"Decomposition vector {i} has coordinates {P.coordinates(v)}")
        if power(g, d) != identity(P.delta):
            raise ClassGroupError(f"Generator {g} is not killed by {d}")
    for row in P.B_reduced.tolist():
        if P.recompose(row) != identity(P.delta):
            raise ClassGroupError(f"Relation {row} does not recompose to the principal class")


def decompose(P: OraclePrecomp, y: Sequence[int], basis: str = "reduced",
              check: bool = True) -> ShortDecomposition:
    """Short exponent vector for the class with coordinates y."""
    y = [yi % d for yi, d in zip(y, P.divisors)]
    target = [0] * len(P.primes)
    for yi, v in zip(y, P.vectors):
        if yi:
            target = [t + yi * x for t, x in zip(target, v)]
    closest = P.decoder(basis).closest(target)
    exponents = tuple(t - u for t, u in zip(target, closest))
    if check:
        if P.coordinates(exponents) != tuple(y):
            raise ClassGroupError(f"Decomposition of {y} lands in class {P.coordinates(exponents)}")
        if P.recompose(exponents) != P.class_of(y):
            raise ClassGroupError(f"Decomposition of {y} does not recompose to its class")
    return ShortDecomposition(tuple(P.primes.norms), exponents)


def evaluate_action(P: OraclePrecomp, x: int, y: Sequence[int], E1: MontgomeryCurve,
                    E2: MontgomeryCurve, rng: random.Random) -> MontgomeryCurve:
    """[a_y] * E1 for x = 0, [a_y] * E2 for x = 1."""
    decomposition = decompose(P, y, check=False)
    start = E1 if x == 0 else E2
    return group_action(start, decomposition.primes, decomposition.exponents, rng)


def verify_orientation(P: OraclePrecomp, params: CsidhParams, rng: random.Random) -> bool:
    """Every relation must act trivially on the base curve.

    Checks that (l, pi - 1) acts as the prime form with positive middle
    coefficient consistently across all primes.
    """
    base = params.base_curve
    for row in P.B_reduced.tolist():
        if group_action(base, P.primes.norms, row, rng) != base:
            logger.error(f"Relation {row} over {P.primes.norms} moves the base curve")
            return False
    return True


@dataclass
class TrialRecord:
    delta: int
    trial: int
    y: Tuple[int, ...]
    exponents: Tuple[int, ...]
    max_abs: int
    raw_max_abs: Optional[int] = None


@dataclass
class HeuristicRow:
    """Maximal exponent over random classes for one discriminant."""

    delta: int
    log10_delta: float
    generator_count: int
    max_coefficient: Optional[int]
    exponent_bound: int
    mode: str
    trials: int = 0
    mean_max: Optional[float] = None
    raw_max_coefficient: Optional[int] = None
    raw_mean_max: Optional[float] = None
    class_number: Optional[int] = None
    divisors: Tuple[int, ...] = ()
    primes: Tuple[int, ...] = ()
    seconds: float = 0.0
    error: Optional[str] = None


def heuristic_experiment(deltas: Sequence[int], trials: int, mode: str = "consecutive",
                         rng: Optional[random.Random] = None, compare_raw: bool = True,
                         records: Optional[List[TrialRecord]] = None) -> List[HeuristicRow]:
    """Largest exponent in short decompositions of random classes, per discriminant.

    Failures for one discriminant are recorded in its row and the run goes on.
    Per-trial data is appended to `records` when given.
    """
    rng = rng or random.Random()
    rows = []
    for delta in deltas:
        row = HeuristicRow(
            delta=delta, log10_delta=round(math.log10(abs(delta)), 2) if delta else 0.0,
            generator_count=0, max_coefficient=None, exponent_bound=0, mode=mode,
        )
        started = time.perf_counter()
        try:
            params = heuristic_parameters(delta)
            row.generator_count = params.generator_count
            row.exponent_bound = round(params.exponent_bound)
            P = precompute(delta, mode=mode, rng=rng)
            row.class_number, row.divisors, row.primes = P.order, P.divisors, tuple(P.primes.norms)
            maxima, raw_maxima = [], []
            for t in range(trials):
                y = tuple(rng.randrange(d) for d in P.divisors)
                dec = decompose(P, y)
                maxima.append(dec.max_abs)
                raw = decompose(P, y, basis="raw", check=False).max_abs if compare_raw else None
                if raw is not None:
                    raw_maxima.append(raw)
                if records is not None:
                    records.append(TrialRecord(delta, t, y, dec.exponents, dec.max_abs, raw))
            row.trials = trials
            row.max_coefficient = max(maxima, default=0)
            row.mean_max = sum(maxima) / len(maxima) if maxima else 0.0
            if raw_maxima:
                row.raw_max_coefficient = max(raw_maxima)
                row.raw_mean_max = sum(raw_maxima) / len(raw_maxima)
        except (ClassGroupError, HeuristicFailure, LatticeError) as e:
            logger.error(f"Heuristic experiment failed for {delta}: {str(e)}")
            row.error = f"{type(e).__name__}: {str(e)}"
        row.seconds = round(time.perf_counter() - started, 3)
        logger.info(f"delta={delta}: max |e| = {row.max_coefficient} "
                    f"(bound {row.exponent_bound}, {row.trials} trials)")
        rows.append(row)
    return rows
