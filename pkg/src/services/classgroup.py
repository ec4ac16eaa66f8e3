"""Ideal class groups of imaginary quadratic orders.

Classes are represented by reduced primitive binary quadratic forms
(a, b, c) of discriminant b^2 - 4ac = delta < 0. The module provides the
group law, prime forms, a baby-step giant-step class number computation
centred on the analytic class number formula, the elementary divisor
structure of Cl(delta) and discrete logarithms with respect to it.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import factorint, isprime, jacobi_symbol, primerange, sqrt_mod
from sympy.ntheory.modular import crt

from src.config import settings
from src.services.lattice import IntMatrix, snf

logger = logging.getLogger(__name__)


class ClassGroupError(Exception):
    """Base exception for class group computations."""
    pass


class DiscriminantError(ClassGroupError):
    """Invalid discriminant, or a form that does not belong to it."""
    pass


class RamifiedError(ClassGroupError):
    """The prime divides the discriminant."""
    pass


class ClassGroupResourceError(ClassGroupError):
    """A search exceeded its budget. Carries what was learned so far."""

    def __init__(self, message: str, lower: Optional[int] = None,
                 upper: Optional[int] = None, exponent: Optional[int] = None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.exponent = exponent


class StructureError(ClassGroupError):
    """Internal inconsistency between the structure and the group law."""
    pass


def validate_discriminant(delta: int) -> int:
    """Return delta if it is a valid imaginary quadratic discriminant."""
    delta = int(delta)
    if delta >= 0 or delta % 4 not in (0, 1):
        raise DiscriminantError(f"{delta} is not a negative discriminant (0 or 1 mod 4)")
    return delta


@dataclass(frozen=True)
class QuadForm:
    """Binary quadratic form a*x^2 + b*x*y + c*y^2."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def is_primitive(self) -> bool:
        return math.gcd(math.gcd(self.a, self.b), self.c) == 1

    def key(self) -> Tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def __str__(self) -> str:
        return f"{self.a},{self.b},{self.c}@{self.discriminant}"

    @classmethod
    def parse(cls, text: str) -> "QuadForm":
        """Parse the "a,b,c@delta" interchange format."""
        try:
            body, _, disc = text.strip().partition("@")
            a, b, c = (int(part) for part in body.split(","))
        except ValueError as e:
            raise DiscriminantError(f"Malformed form text {text!r}: {e}")
        form = cls(a, b, c)
        if disc and form.discriminant != int(disc):
            raise DiscriminantError(f"Form {body} does not have discriminant {disc}")
        return form


def _check_form(f: QuadForm, delta: Optional[int] = None) -> None:
    if delta is not None and f.discriminant != delta:
        raise DiscriminantError(f"Form ({f.a},{f.b},{f.c}) has discriminant "
                                f"{f.discriminant}, expected {delta}")
    if f.discriminant >= 0 or f.a <= 0:
        raise DiscriminantError(f"Form ({f.a},{f.b},{f.c}) is not positive definite")
    if not f.is_primitive():
        raise DiscriminantError(f"Form ({f.a},{f.b},{f.c}) is not primitive")


def _normalize(a: int, b: int, c: int) -> Tuple[int, int, int]:
    r = (a - b) // (2 * a)
    return a, b + 2 * r * a, a * r * r + b * r + c


def _reduce_raw(a: int, b: int, c: int) -> QuadForm:
    a, b, c = _normalize(a, b, c)
    while a > c or (a == c and b < 0):
        a, b, c = _normalize(c, -b, a)
    return QuadForm(a, b, c)


def reduce(f: QuadForm, delta: Optional[int] = None) -> QuadForm:
    """Return the unique reduced form properly equivalent to f."""
    _check_form(f, delta)
    return _reduce_raw(f.a, f.b, f.c)


def _solve_linmod(a: int, b: int, m: int) -> Tuple[int, int]:
    # a*x = b (mod m)  ->  x = u + v*n
    g = math.gcd(a, m)
    if b % g:
        raise StructureError(f"Linear congruence {a}x = {b} mod {m} has no solution")
    n = m // g
    if n == 1:
        return 0, 1
    return (b // g) * pow(a // g, -1, n) % n, n


def _compose_raw(f: QuadForm, g: QuadForm) -> QuadForm:
    a1, b1, c1 = f.a, f.b, f.c
    a2, b2 = g.a, g.b
    s = (b1 + b2) // 2
    h = -(b1 - b2) // 2
    w = math.gcd(math.gcd(a1, a2), s)
    sw, tw, uw = a1 // w, a2 // w, s // w
    mu, nu = _solve_linmod(tw * uw, h * uw + sw * c1, sw * tw)
    lam, _ = _solve_linmod(tw * nu, h - tw * mu, sw)
    k = mu + nu * lam
    l = (k * tw - h) // sw
    m = (tw * uw * k - h * uw - c1 * sw) // (sw * tw)
    return _reduce_raw(sw * tw, w * uw - (k * tw + l * sw), k * l - w * m)


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Gauss composition of two forms of the same discriminant, reduced."""
    if f.discriminant != g.discriminant:
        raise DiscriminantError(f"Cannot compose forms of discriminants "
                                f"{f.discriminant} and {g.discriminant}")
    return _compose_raw(f, g)


def identity(delta: int) -> QuadForm:
    """Principal form of discriminant delta."""
    delta = validate_discriminant(delta)
    k = delta % 2
    return QuadForm(1, k, (k - delta) // 4)


def inverse(f: QuadForm) -> QuadForm:
    return _reduce_raw(f.a, -f.b, f.c)


def power(f: QuadForm, e: int) -> QuadForm:
    """f^e by square-and-multiply; negative exponents use the inverse."""
    if e < 0:
        f, e = inverse(f), -e
    result = identity(f.discriminant)
    base = f
    while e:
        if e & 1:
            result = _compose_raw(result, base)
        e >>= 1
        if e:
            base = _compose_raw(base, base)
    return result


def is_identity(f: QuadForm) -> bool:
    return f.a == 1


def kronecker(delta: int, q: int) -> int:
    """Kronecker symbol (delta / q) for a prime q."""
    if q == 2:
        if delta % 2 == 0:
            return 0
        return 1 if delta % 8 in (1, 7) else -1
    return int(jacobi_symbol(delta % q, q))


def prime_form(delta: int, p: int, reduced: bool = True) -> Optional[QuadForm]:
    """Form of norm p attached to a split prime p, or None if p is inert.

    The middle coefficient is the smallest positive b with b^2 = delta (mod 4p).
    """
    delta = validate_discriminant(delta)
    if not isprime(p):
        raise DiscriminantError(f"{p} is not prime")
    if delta % p == 0:
        raise RamifiedError(f"{p} divides the discriminant {delta}")
    if p == 2:
        if delta % 8 != 1:
            return None
        b = 1
    else:
        if kronecker(delta, p) != 1:
            return None
        candidates = []
        for x in sqrt_mod(delta % p, p, all_roots=True):
            candidates.append(x if x % 2 == delta % 2 else x + p)
        b = min(candidates)
    form = QuadForm(p, b, (b * b - delta) // (4 * p))
    return _reduce_raw(form.a, form.b, form.c) if reduced else form


def _ramified_form(delta: int, p: int) -> Optional[QuadForm]:
    """Invertible form of norm p for a prime p | delta, if there is one."""
    if p == 2:
        b = 0 if delta % 8 == 0 else 2
    else:
        b = 0 if delta % 2 == 0 else p
    if (b * b - delta) % (4 * p):
        return None
    form = QuadForm(p, b, (b * b - delta) // (4 * p))
    if not form.is_primitive():
        return None
    return _reduce_raw(form.a, form.b, form.c)


def reduced_forms(delta: int, max_a: Optional[int] = None) -> List[QuadForm]:
    """All reduced primitive forms of discriminant delta, optionally with a <= max_a."""
    delta = validate_discriminant(delta)
    forms = []
    a = 1
    while 3 * a * a <= -delta and (max_a is None or a <= max_a):
        for b in range(-a + 1, a + 1):
            if (b * b - delta) % (4 * a):
                continue
            c = (b * b - delta) // (4 * a)
            f = QuadForm(a, b, c)
            if f.is_reduced() and f.is_primitive():
                forms.append(f)
        a += 1
    return forms


def units(delta: int) -> int:
    return {-3: 6, -4: 4}.get(delta, 2)


@lru_cache(maxsize=8)
def _primes_below(bound: int) -> Tuple[int, ...]:
    return tuple(primerange(2, bound))


@lru_cache(maxsize=1024)
def _euler_product(delta: int, bound: int) -> float:
    product = 1.0
    for q in _primes_below(bound):
        product *= q / (q - kronecker(delta, q))
    return product


def analytic_class_number(delta: int, bound: Optional[int] = None) -> float:
    """Class number estimate from a truncated Euler product for L(1, chi_delta).

    The Kronecker symbol of delta itself is used, so the estimate holds for
    non-fundamental discriminants as well.
    """
    bound = bound or settings.euler_product_bound
    return units(delta) * math.sqrt(-delta) * _euler_product(delta, bound) / (2 * math.pi)


def class_number_upper_bound(delta: int) -> float:
    return math.sqrt(-delta) * math.log(-delta)


class FormSampler:
    """Random classes built from small invertible forms.

    The pool holds every non-principal reduced form with a <= sampler_form_bound,
    composite and ramified norms included, and the prime forms of norm up to
    12 ln^2 |delta|. When |delta| is small enough the first part is all of
    Cl(delta).
    """

    def __init__(self, delta: int, rng: random.Random, pool: Optional[List[QuadForm]] = None):
        self.delta = delta
        self.rng = rng
        self.pool = pool if pool is not None else self._form_pool(delta)

    @staticmethod
    def covers_group(delta: int) -> bool:
        """Whether the default pool contains every reduced form of delta."""
        return math.isqrt(-delta // 3) <= settings.sampler_form_bound

    @staticmethod
    def _form_pool(delta: int) -> List[QuadForm]:
        small = min(math.isqrt(-delta // 3), settings.sampler_form_bound)
        pool = {f.key(): f for f in reduced_forms(delta, small) if not is_identity(f)}
        for p in primerange(small + 1, math.ceil(12 * math.log(-delta) ** 2) + 1):
            f = _ramified_form(delta, p) if delta % p == 0 else prime_form(delta, p)
            if f is not None and not is_identity(f):
                pool.setdefault(f.key(), f)
        return list(pool.values())

    def sample(self, exponent_bound: int) -> QuadForm:
        result = identity(self.delta)
        if not self.pool:
            return result
        picks = self.pool if len(self.pool) <= 16 else self.rng.sample(self.pool, 16)
        for f in picks:
            result = compose(result, power(f, self.rng.randrange(exponent_bound + 1)))
        return result


def _smallest_multiple_in_window(f: QuadForm, lo: int, hi: int) -> Optional[int]:
    """Smallest n in [lo, hi] with f^n = 1, by baby-step giant-step."""
    width = hi - lo + 1
    m = math.isqrt(width) + 1
    if 2 * m > settings.bsgs_max_steps:
        raise ClassGroupResourceError(f"BSGS window of width {width} exceeds the step budget",
                                      lower=lo, upper=hi)
    baby: Dict[Tuple[int, int, int], int] = {}
    cur = identity(f.discriminant)
    for j in range(m):
        baby.setdefault(cur.key(), j)
        cur = _compose_raw(cur, f)
    step = power(f, -m)
    giant = power(f, -lo)
    for i in range((width + m - 1) // m + 1):
        j = baby.get(giant.key())
        if j is not None:
            n = lo + i * m + j
            return n if n <= hi else None
        giant = _compose_raw(giant, step)
    return None


def element_order(f: QuadForm, multiple: int) -> int:
    """Exact order of f given any multiple of it."""
    order = multiple
    for q in factorint(multiple):
        while order % q == 0 and is_identity(power(f, order // q)):
            order //= q
    return order


def _subgroup_closure(delta: int, generators: Sequence[QuadForm], limit: int) -> int:
    """Order of the subgroup generated by the given classes, by explicit enumeration."""
    unit = identity(delta)
    members = {unit.key(): unit}
    for x in generators:
        if x.key() in members:
            continue
        y, e = x, 1
        while y.key() not in members:
            y, e = _compose_raw(y, x), e + 1
        base = list(members.values())
        cur = x
        for _ in range(1, e):
            for g in base:
                z = _compose_raw(g, cur)
                members[z.key()] = z
            cur = _compose_raw(cur, x)
        if len(members) > limit:
            raise ClassGroupResourceError(f"Subgroup enumeration exceeded {limit} classes",
                                          lower=len(members))
    return len(members)


def _class_number_in_window(delta: int, rng: random.Random, window: float,
                            sampler: Optional[FormSampler] = None) -> int:
    sampler = sampler or FormSampler(delta, rng)
    if not sampler.pool:
        if FormSampler.covers_group(delta):
            logger.info(f"Class number of {delta}: 1 (every reduced form is principal)")
            return 1
        raise ClassGroupResourceError(f"No non-principal form of small norm found for {delta}")
    estimate = analytic_class_number(delta)
    ceiling = math.ceil(class_number_upper_bound(delta))
    lo = max(1, math.floor(estimate * (1 - window)))
    hi = max(lo, min(ceiling, math.ceil(estimate * (1 + window))))
    exponent = 1
    candidates: List[int] = []
    for attempt in range(12):
        f = sampler.sample(hi)
        n = _smallest_multiple_in_window(f, lo, hi)
        if n is None:
            raise ClassGroupResourceError(f"No element order multiple in [{lo}, {hi}]",
                                          lower=lo, upper=hi, exponent=exponent)
        exponent = math.lcm(exponent, element_order(f, n))
        candidates = [k for k in range(-(-lo // exponent) * exponent, hi + 1, exponent)]
        if len(candidates) == 1 and attempt >= 2:
            logger.info(f"Class number of {delta}: {candidates[0]} (exponent {exponent}, "
                        f"window [{lo}, {hi}])")
            return candidates[0]
    if hi <= settings.structure_table_limit:
        h = _subgroup_closure(delta, sampler.pool, settings.structure_table_limit)
        logger.info(f"Class number of {delta}: {h} (exponent {exponent} ambiguous in window, "
                    f"resolved by enumeration)")
        return h
    raise ClassGroupResourceError(f"Class number of {delta} not determined: {len(candidates)} "
                                  f"multiples of {exponent} in [{lo}, {hi}]",
                                  lower=lo, upper=hi, exponent=exponent)


def class_number_bsgs(delta: int, rng: Optional[random.Random] = None) -> int:
    """Class number h(delta) by baby-step giant-step around the analytic estimate.

    The window result is only returned once the elementary divisor structure
    has been built and checked against it.
    """
    delta = validate_discriminant(delta)
    if delta in (-3, -4):
        logger.warning(f"Discriminant {delta} has extra units")
    return group_structure(delta, rng).order


class _SylowPart:
    """q-Sylow subgroup with invariants q^a1 | ... | q^ar and coordinates."""

    q: int
    invariants: List[int]
    generators: List[QuadForm]

    def coordinates(self, x: QuadForm) -> List[int]:
        raise NotImplementedError


class _TabulatedSylow(_SylowPart):
    """Small Sylow subgroup: every element is tabulated with its coordinates."""

    def __init__(self, delta: int, q: int, size: int, cofactor: int, sampler: FormSampler,
                 order_hint: int):
        self.q = q
        unit = identity(delta)
        table: Dict[Tuple[int, int, int], Tuple[int, ...]] = {unit.key(): ()}
        gens: List[QuadForm] = []
        relations: List[List[int]] = []
        misses = 0
        while len(table) < size:
            x = power(sampler.sample(order_hint), cofactor)
            if x.key() in table:
                misses += 1
                if misses > 64:
                    raise StructureError(f"{q}-Sylow stuck at {len(table)} of {size} elements")
                continue
            misses = 0
            y, e = x, 1
            while y.key() not in table:
                y, e = power(y, q), e * q
                if e > size:
                    raise StructureError(f"Element order exceeds the {q}-Sylow order {size}")
            hit = table[y.key()]
            relations = [row + [0] for row in relations]
            relations.append([-c for c in hit] + [0] * (len(gens) - len(hit)) + [e])
            new_table = {}
            cur = unit
            for j in range(e):
                for key, coords in table.items():
                    z = _compose_raw(QuadForm(*key), cur)
                    new_table[z.key()] = coords + (0,) * (len(gens) - len(coords)) + (j,)
                cur = _compose_raw(cur, x)
            table = new_table
            gens.append(x)
            if len(table) > size:
                raise StructureError(f"{q}-Sylow exceeds its order {size}")
        self._table = table
        if not gens:
            self.invariants, self.generators, self._functionals = [], [], []
            return
        result = snf(IntMatrix(relations))
        diag = result.D.diagonal()
        keep = [i for i, d in enumerate(diag) if d != 1]
        v_inv = result.V.inverse()
        self.invariants = [diag[i] for i in keep]
        self.generators = []
        for i in keep:
            g = unit
            for gen, e in zip(gens, v_inv.row(i)):
                g = compose(g, power(gen, e))
            self.generators.append(g)
        self._functionals = [result.V.column(i) for i in keep]
        self._rank = len(gens)

    def coordinates(self, x: QuadForm) -> List[int]:
        coords = self._table.get(x.key())
        if coords is None:
            raise StructureError(f"{x} is not in the {self.q}-Sylow subgroup")
        coords = coords + (0,) * (self._rank - len(coords))
        return [sum(c * v for c, v in zip(coords, col)) % d
                for col, d in zip(self._functionals, self.invariants)]


class _CyclicSylow(_SylowPart):
    """Large cyclic Sylow subgroup with Pohlig-Hellman/BSGS discrete logs."""

    def __init__(self, delta: int, q: int, k: int, cofactor: int, sampler: FormSampler,
                 order_hint: int):
        self.q = q
        self.k = k
        for _ in range(32):
            g = power(sampler.sample(order_hint), cofactor)
            if not is_identity(power(g, q ** (k - 1))):
                break
        else:
            raise ClassGroupResourceError(f"{q}-Sylow of order {q}^{k} is not cyclic or "
                                          f"too large to tabulate")
        self.invariants = [q ** k]
        self.generators = [g]
        self._gamma = power(g, q ** (k - 1))
        self._m = math.isqrt(q) + 1
        self._baby: Dict[Tuple[int, int, int], int] = {}
        cur = identity(delta)
        for j in range(self._m):
            self._baby.setdefault(cur.key(), j)
            cur = _compose_raw(cur, self._gamma)
        self._giant_step = power(self._gamma, -self._m)

    def _dlog_order_q(self, x: QuadForm) -> int:
        cur = x
        for i in range(self._m + 1):
            j = self._baby.get(cur.key())
            if j is not None:
                return (i * self._m + j) % self.q
            cur = _compose_raw(cur, self._giant_step)
        raise StructureError(f"Discrete log of {x} not found in subgroup of order {self.q}")

    def coordinates(self, x: QuadForm) -> List[int]:
        q, k = self.q, self.k
        g = self.generators[0]
        known = 0
        for i in range(k):
            residual = compose(x, power(g, -known))
            digit = self._dlog_order_q(power(residual, q ** (k - 1 - i)))
            known += digit * q ** i
        if power(g, known) != x:
            raise StructureError(f"Discrete log check failed in the {q}-Sylow subgroup")
        return [known]


@dataclass(frozen=True)
class ClassGroupStructure:
    """Cl(delta) = Z/d1 x ... x Z/dl with d1 | d2 | ... | dl."""

    delta: int
    order: int
    divisors: Tuple[int, ...]
    generators: Tuple[QuadForm, ...]
    _sylows: Tuple[Tuple[int, int, _SylowPart], ...] = field(repr=False, compare=False, default=())

    @property
    def rank(self) -> int:
        return len(self.divisors)

    def element(self, y: Sequence[int]) -> QuadForm:
        """Exponent-to-class map: prod g_i^{y_i}."""
        result = identity(self.delta)
        for g, e, d in zip(self.generators, y, self.divisors):
            result = _compose_raw(result, power(g, e % d))
        return result

    def dlog(self, f: QuadForm) -> Tuple[int, ...]:
        if f.discriminant != self.delta:
            raise DiscriminantError(f"Form {f} is not of discriminant {self.delta}")
        if not self.divisors:
            return ()
        residues: List[List[int]] = [[] for _ in self.divisors]
        moduli: List[List[int]] = [[] for _ in self.divisors]
        for q, cofactor, part in self._sylows:
            coords = part.coordinates(power(f, cofactor))
            offset = self.rank - len(part.invariants)
            for i, (c, modulus) in enumerate(zip(coords, part.invariants)):
                residues[offset + i].append(c * pow(cofactor, -1, modulus) % modulus)
                moduli[offset + i].append(modulus)
        y = []
        for res, mods, d in zip(residues, moduli, self.divisors):
            y.append(int(crt(mods, res)[0]) % d if mods else 0)
        return tuple(y)

    def random_class(self, rng: random.Random) -> QuadForm:
        return self.element([rng.randrange(d) for d in self.divisors])


def _build_structure(delta: int, h: int, sampler: FormSampler) -> ClassGroupStructure:
    sylows: List[Tuple[int, int, _SylowPart]] = []
    for q, k in sorted(factorint(h).items()):
        size = q ** k
        cofactor = h // size
        if size <= settings.structure_table_limit:
            part: _SylowPart = _TabulatedSylow(delta, q, size, cofactor, sampler, h)
        else:
            part = _CyclicSylow(delta, q, k, cofactor, sampler, h)
        sylows.append((q, cofactor, part))
    rank = max((len(part.invariants) for _, _, part in sylows), default=0)
    divisors = [1] * rank
    generators = [identity(delta)] * rank
    for _, _, part in sylows:
        offset = rank - len(part.invariants)
        for i, (d, g) in enumerate(zip(part.invariants, part.generators)):
            divisors[offset + i] *= d
            generators[offset + i] = compose(generators[offset + i], g)
    return ClassGroupStructure(delta, h, tuple(divisors), tuple(generators), tuple(sylows))


def _verify_structure(S: ClassGroupStructure) -> None:
    if math.prod(S.divisors) != S.order:
        raise StructureError(f"Divisors {S.divisors} do not multiply to {S.order}")
    for i, (g, d) in enumerate(zip(S.generators, S.divisors)):
        if i + 1 < S.rank and S.divisors[i + 1] % d:
            raise StructureError(f"Divisor chain {S.divisors} is not d1 | d2 | ...")
        if not is_identity(power(g, d)):
            raise StructureError(f"Generator {g} does not have order dividing {d}")
        for q in factorint(d):
            if is_identity(power(g, d // q)):
                raise StructureError(f"Generator {g} has order smaller than {d}")


def _check_pool_exponent(sampler: FormSampler, h: int) -> None:
    for f in sampler.pool[:64]:
        if not is_identity(power(f, h)):
            raise StructureError(f"Form {f} does not have order dividing {h}")


def group_structure(delta: int, rng: Optional[random.Random] = None) -> ClassGroupStructure:
    """Elementary divisors, generators and discrete logs for Cl(delta)."""
    delta = validate_discriminant(delta)
    rng = rng or random.Random(settings.seed)
    sampler = FormSampler(delta, rng)
    window = settings.class_window
    enumerate_pool = False
    for _ in range(4):
        try:
            if enumerate_pool:
                h = _subgroup_closure(delta, sampler.pool, settings.structure_table_limit)
            else:
                h = _class_number_in_window(delta, rng, window, sampler)
        except ClassGroupResourceError as e:
            if e.upper is not None and e.upper >= class_number_upper_bound(delta):
                raise
            logger.warning(f"Class number search failed ({e}); widening the window")
            window *= 2
            continue
        try:
            _check_pool_exponent(sampler, h)
            S = _build_structure(delta, h, sampler)
            _verify_structure(S)
        except StructureError as e:
            logger.warning(f"Structure for h={h} inconsistent ({e}); retrying")
            window *= 2
            enumerate_pool = analytic_class_number(delta) <= settings.structure_table_limit
            continue
        if h > class_number_upper_bound(delta):
            logger.warning(f"h={h} exceeds sqrt|delta| ln|delta| for delta={delta}")
        logger.info(f"Cl({delta}) = " + (" x ".join(f"Z/{d}" for d in S.divisors) or "1"))
        return S
    raise ClassGroupResourceError(f"Group structure of {delta} could not be determined")


def dlog(S: ClassGroupStructure, f: QuadForm) -> Tuple[int, ...]:
    """Unique exponent vector y with prod g_i^{y_i} = [f]."""
    return S.dlog(f)


def random_class(S: ClassGroupStructure, rng: random.Random) -> QuadForm:
    """Uniformly random class, prod g_i^{r_i} with r_i uniform mod d_i."""
    return S.random_class(rng)
