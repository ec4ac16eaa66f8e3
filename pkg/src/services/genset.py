"""Split-prime generating sets for class groups.

Builds the lattice of relations among the classes of small split primes
and reorders the primes, by repeated Hermite normal form pivot inspection,
until the first s of them generate the class group.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

from sympy import nextprime

from src.config import settings
from src.services.classgroup import ClassGroupStructure, QuadForm, prime_form, validate_discriminant
from src.services.lattice import IntMatrix, hnf, hnf_modular

logger = logging.getLogger(__name__)

_substitution_logged = False


class HeuristicFailure(Exception):
    """The selected primes do not generate the class group."""
    pass


@dataclass(frozen=True)
class SplitPrime:
    p: int
    form: QuadForm


@dataclass
class PrimeList:
    """Ordered split primes with their prime forms."""

    primes: List[SplitPrime]
    norm_bound: int

    def __len__(self) -> int:
        return len(self.primes)

    @property
    def norms(self) -> List[int]:
        return [sp.p for sp in self.primes]

    @property
    def forms(self) -> List[QuadForm]:
        return [sp.form for sp in self.primes]

    def prefix(self, s: int) -> "PrimeList":
        return PrimeList(self.primes[:s], self.norm_bound)

    def reordered(self, order: Sequence[int]) -> "PrimeList":
        return PrimeList([self.primes[i] for i in order], self.norm_bound)

    @classmethod
    def from_primes(cls, delta: int, primes: Iterable[int]) -> "PrimeList":
        """Explicit prime list; every prime must split."""
        entries = []
        for p in primes:
            form = prime_form(delta, p)
            if form is None:
                raise HeuristicFailure(f"{p} does not split for discriminant {delta}")
            entries.append(SplitPrime(p, form))
        return cls(entries, max((sp.p for sp in entries), default=1))


@dataclass(frozen=True)
class HeuristicParameters:
    """Sizes attached to a discriminant: s, BKZ block size and exponent bound."""

    delta: int

    @property
    def log_abs(self) -> float:
        return math.log(-self.delta)

    @property
    def generator_count(self) -> int:
        return max(1, math.ceil(self.log_abs ** (2 / 3)))

    @property
    def block_size(self) -> int:
        return max(2, math.ceil(self.log_abs ** (1 / 3)))

    @property
    def exponent_bound(self) -> float:
        return math.exp(self.log_abs ** (1 / 3))

    @staticmethod
    def relaxed_block_size(k: int) -> int:
        return max(2, math.ceil(math.sqrt(k)))


def heuristic_parameters(delta: int) -> HeuristicParameters:
    return HeuristicParameters(validate_discriminant(delta))


def split_prime_pool(delta: int, count: Optional[int] = None, norm_bound: Optional[int] = None,
                     allowed: Optional[Iterable[int]] = None) -> PrimeList:
    """Split primes of delta in increasing norm.

    Stops after `count` primes, or at `norm_bound`, whichever is given. With
    `allowed`, only those primes are considered.
    """
    delta = validate_discriminant(delta)
    if count is None and norm_bound is None and allowed is None:
        raise ValueError("split_prime_pool needs a count, a norm bound or an allowed set")
    candidates = sorted(set(allowed)) if allowed is not None else None
    entries: List[SplitPrime] = []
    p = 1
    index = 0
    while True:
        if candidates is not None:
            if index >= len(candidates):
                break
            p = candidates[index]
            index += 1
        else:
            p = nextprime(p)
        if norm_bound is not None and p > norm_bound:
            break
        if delta % p == 0:
            continue
        form = prime_form(delta, p)
        if form is not None:
            entries.append(SplitPrime(p, form))
            if count is not None and len(entries) >= count:
                break
    bound = norm_bound if norm_bound is not None else (entries[-1].p if entries else 1)
    return PrimeList(entries, bound)


def adaptive_prime_pool(delta: int, s: Optional[int] = None) -> PrimeList:
    """At least genset_pool_factor * s split primes (norm bound chosen to fit)."""
    s = s or heuristic_parameters(delta).generator_count
    return split_prime_pool(delta, count=settings.genset_pool_factor * s)


def grh_prime_pool(delta: int) -> PrimeList:
    """All split primes of norm below 12 ln^2 |delta|."""
    bound = math.ceil(12 * math.log(-delta) ** 2)
    return split_prime_pool(delta, norm_bound=bound)


@dataclass
class RelationLattice:
    """Exponent vectors e with prod p_i^{e_i} principal, as a lower-triangular HNF basis."""

    primes: PrimeList
    basis: IntMatrix
    class_number: int
    cokernel_index: int = field(default=1)
    preimages: Optional[IntMatrix] = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return self.basis.nrows

    @property
    def determinant(self) -> int:
        return math.prod(self.basis.diagonal())

    @property
    def generates(self) -> bool:
        return self.determinant == self.class_number


def _log_substitution() -> None:
    global _substitution_logged
    if not _substitution_logged:
        logger.warning("Relation lattices come from classical discrete logs in Cl(delta), "
                       "standing in for the quantum S-unit computation")
        _substitution_logged = True


def build_relation_lattice(S: ClassGroupStructure, P: PrimeList) -> RelationLattice:
    """Kernel of x -> sum x_i dlog(p_i) mod (d_1, ..., d_l).

    The kernel is read off the HNF of the stacked system [I | A; 0 | diag(d)],
    where A holds the discrete logs of the prime forms.
    """
    _log_substitution()
    k, l = len(P), S.rank
    if k == 0:
        raise HeuristicFailure("Cannot build a relation lattice on an empty prime list")
    if l == 0:
        return RelationLattice(P, IntMatrix.identity(k), S.order)
    logs = [S.dlog(form) for form in P.forms]
    rows = [[int(i == j) for j in range(k)] + list(y) for i, y in enumerate(logs)]
    rows += [[0] * k + [d if i == j else 0 for j in range(l)] for i, d in enumerate(S.divisors)]
    H = hnf(IntMatrix(rows)).H
    kernel = IntMatrix(H.row(i)[:k] for i in range(k))
    corner = math.prod(H.diagonal()[k:])
    preimages = IntMatrix(H.row(k + j)[:k] for j in range(l)) if corner == 1 else None
    lattice = RelationLattice(P, kernel, S.order, cokernel_index=corner, preimages=preimages)
    if lattice.determinant * corner != S.order:
        raise HeuristicFailure(f"Relation lattice determinant {lattice.determinant} and cokernel "
                               f"{corner} are inconsistent with h={S.order}")
    logger.debug(f"Relation lattice on {k} primes: det={lattice.determinant}, index={corner}")
    return lattice


def _permuted_hnf(basis: IntMatrix, order: Sequence[int], modulus: int) -> IntMatrix:
    permuted = IntMatrix([row[i] for i in order] for row in basis.tolist())
    return hnf_modular(permuted, modulus)


def select_generators(S: ClassGroupStructure, P: PrimeList, s: int) -> PrimeList:
    """Reorder P so that its first s primes generate Cl(delta).

    For j = k down to s+1, while the j-th HNF pivot differs from 1 the j-th
    prime is moved to the front and the HNF recomputed.
    """
    k = len(P)
    s = max(1, min(s, k))
    lattice = build_relation_lattice(S, P)
    if not lattice.generates:
        raise HeuristicFailure(f"The {k} pool primes generate a subgroup of index "
                               f"{lattice.cokernel_index} in Cl({S.delta})")
    modulus = lattice.determinant
    order = list(range(k))
    H = lattice.basis
    total = 0
    for j in range(k - 1, s - 1, -1):
        count = 0
        while H.row(j)[j] != 1:
            count += 1
            total += 1
            if count > j + 1 or total > settings.genset_max_promotions:
                raise HeuristicFailure(f"Pivot {j + 1} still {H.row(j)[j]} after {count} promotions; "
                                       f"no {j} of the first {j + 1} primes generate their span")
            order = [order[j]] + order[:j] + order[j + 1:]
            H = _permuted_hnf(lattice.basis, order, modulus)
            logger.info(f"Promoted prime {P.primes[order[0]].p} to the front (pivot {j + 1})")
    selected = P.reordered(order)
    if any(H.row(i)[i] != 1 for i in range(s, k)):
        raise HeuristicFailure("Pivots beyond s are not all 1 after reordering")
    head = build_relation_lattice(S, selected.prefix(s))
    if not head.generates:
        raise HeuristicFailure(f"First {s} primes span a subgroup of index {head.cokernel_index}")
    logger.info(f"Generating primes for {S.delta}: {selected.prefix(s).norms} "
                f"({total} promotions)")
    return selected.prefix(s)
