"""Hidden shift solvers for class group actions.

Finding [a] with [a] * E1 = E2 is a hidden shift problem on a finite
abelian group A: f(1, y) = f(0, y + s). The quantum solvers are simulated
classically. A PhaseSource plays the part of the oracle query followed by
a Fourier measurement and hands out phase qubits; the solvers only combine
and measure those qubits and never see the shift. A classical
meet-in-the-middle solver serves as the baseline.
"""

from __future__ import annotations

import itertools
import logging
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint
from sympy.ntheory.modular import crt

from src.config import settings
from src.services.isogeny import (
    CsidhParams, IsogenyChain, MontgomeryCurve, group_action, reconstruct_isogeny_chain,
)
from src.services.oracle import (
    OraclePrecomp, ShortDecomposition, decompose, evaluate_action, precompute, verify_orientation,
)
from src.services.classgroup import QuadForm, compose

logger = logging.getLogger(__name__)

Element = Tuple[int, ...]


class NoShiftFound(Exception):
    """No verified shift within the retry budget."""
    pass


class HiddenShiftInstance:
    """f(b, y) for b in {0, 1} and y in Z/d_1 x ... x Z/d_l."""

    def __init__(self, divisors: Sequence[int], oracle: Callable[[int, Element], Hashable],
                 mode: str = "collision", trapdoor: Optional[Sequence[int]] = None, name: str = "",
                 budget: Optional[int] = None):
        if mode not in ("trapdoor", "collision"):
            raise ValueError(f"Unknown instance mode {mode!r}")
        if mode == "trapdoor" and trapdoor is None:
            raise ValueError("Trapdoor instances need the planted shift")
        self.divisors = tuple(int(d) for d in divisors)
        self._oracle = oracle
        self.mode = mode
        self._trapdoor = self.normalize(trapdoor) if trapdoor is not None else None
        self.name = name
        self.queries = 0
        self.budget = budget if budget is not None else settings.query_budget

    @property
    def order(self) -> int:
        return math.prod(self.divisors)

    def normalize(self, y: Sequence[int]) -> Element:
        return tuple(int(a) % d for a, d in zip(y, self.divisors))

    def add(self, y: Sequence[int], z: Sequence[int]) -> Element:
        return tuple((a + b) % d for a, b, d in zip(y, z, self.divisors))

    def sub(self, y: Sequence[int], z: Sequence[int]) -> Element:
        return tuple((a - b) % d for a, b, d in zip(y, z, self.divisors))

    @property
    def zero(self) -> Element:
        return tuple(0 for _ in self.divisors)

    def random_element(self, rng: random.Random) -> Element:
        return tuple(rng.randrange(d) for d in self.divisors)

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(d) for d in self.divisors))

    def query(self, b: int, y: Sequence[int]) -> Hashable:
        self.queries += 1
        if self.budget and self.queries > self.budget:
            raise NoShiftFound(f"Oracle query budget of {self.budget} exhausted")
        return self._oracle(b, self.normalize(y))


def make_instance(precomp: OraclePrecomp, E1: MontgomeryCurve, E2: MontgomeryCurve,
                  rng: random.Random, mode: str = "collision",
                  trapdoor: Optional[Sequence[int]] = None) -> HiddenShiftInstance:
    """Curve-mode instance: labels are the Montgomery coefficients of [a_y] * E_b."""

    def oracle(b: int, y: Element) -> int:
        return evaluate_action(precomp, b, y, E1, E2, rng).A

    return HiddenShiftInstance(precomp.divisors, oracle, mode=mode, trapdoor=trapdoor,
                               name=f"curves A={E1.A} -> A={E2.A}")


def make_form_instance(precomp: OraclePrecomp, f1: QuadForm, f2: QuadForm, mode: str = "collision",
                       trapdoor: Optional[Sequence[int]] = None) -> HiddenShiftInstance:
    """Form-mode instance: labels are reduced forms of [a_y] [f_b]."""
    targets = (f1, f2)

    def oracle(b: int, y: Element) -> Tuple[int, int, int]:
        return compose(precomp.class_of(y), targets[b]).key()

    return HiddenShiftInstance(precomp.divisors, oracle, mode=mode, trapdoor=trapdoor,
                               name=f"forms {f1} -> {f2}")


def planted_instance(divisors: Sequence[int], shift: Sequence[int],
                     rng: random.Random) -> HiddenShiftInstance:
    """Trapdoor instance with random injective labels and a planted shift."""
    divisors = tuple(divisors)
    n = math.prod(divisors)
    while True:
        u = rng.randrange(1, max(n, 2))
        if math.gcd(u, n) == 1:
            break
    w = rng.randrange(n)
    inst: Optional[HiddenShiftInstance] = None

    def index(y: Element) -> int:
        value = 0
        for a, d in zip(y, divisors):
            value = value * d + a
        return value

    def oracle(b: int, y: Element) -> int:
        if b:
            y = inst.add(y, shift)
        return (u * index(y) + w) % n

    inst = HiddenShiftInstance(divisors, oracle, mode="trapdoor", trapdoor=shift,
                               name=f"planted {list(divisors)}")
    return inst


def verify_shift(inst: HiddenShiftInstance, s: Sequence[int], rng: random.Random,
                 points: Optional[int] = None) -> bool:
    """Check f(1, y) = f(0, y + s) at random points."""
    points = points or settings.verify_points
    for _ in range(points):
        y = inst.random_element(rng)
        if inst.query(1, y) != inst.query(0, inst.add(y, s)):
            return False
    return True


class CyclicDecomposition:
    """A split by CRT into cyclic factors of prime-power order q^e."""

    def __init__(self, divisors: Sequence[int]):
        self.divisors = tuple(divisors)
        self.factors: List[Tuple[int, int, int]] = []
        for i, d in enumerate(self.divisors):
            for q, e in sorted(factorint(d).items()):
                self.factors.append((i, q, e))
        self.moduli = [q ** e for _, q, e in self.factors]
        self.denominator = math.lcm(*self.moduli) if self.moduli else 1

    def to_factors(self, y: Sequence[int]) -> List[int]:
        return [y[i] % m for (i, _, _), m in zip(self.factors, self.moduli)]

    def from_factors(self, components: Sequence[int]) -> Element:
        out = []
        for i, d in enumerate(self.divisors):
            parts = [(c, m) for (j, _, _), c, m in zip(self.factors, components, self.moduli) if j == i]
            if not parts:
                out.append(0)
                continue
            value, _ = crt([m for _, m in parts], [c for c, _ in parts])
            out.append(int(value) % d)
        return tuple(out)


@dataclass
class PhaseQubit:
    """(|0> + e^{2 pi i phase}|1>)/sqrt(2) carrying a dual-group label."""

    label: Tuple[int, ...]
    _phase: int = field(repr=False, default=0)


class PhaseSource:
    """Simulated quantum sampling of phase qubits for one instance.

    Trapdoor instances hand their planted shift to the source. Collision
    instances let the source tabulate f(0, .) and locate the partner of
    f(1, 0), at the price of |A| classical oracle evaluations.
    """

    def __init__(self, inst: HiddenShiftInstance, rng: random.Random):
        self.rng = rng
        self.decomp = CyclicDecomposition(inst.divisors)
        self.budget = inst.budget
        self.samples = 0
        before = inst.queries
        if inst.mode == "trapdoor":
            shift = inst._trapdoor
        else:
            table: Dict[Hashable, Element] = {}
            for y in inst.elements():
                table[inst.query(0, y)] = y
            partner = table.get(inst.query(1, inst.zero))
            if partner is None:
                raise NoShiftFound("f(1, 0) is not a value of f(0, .): the targets are in different orbits")
            shift = partner
        self.setup_queries = inst.queries - before
        self._sigma = self.decomp.to_factors(shift)

    def _phase_of(self, label: Sequence[int]) -> int:
        den = self.decomp.denominator
        return sum(k * s * (den // m) for k, s, m in zip(label, self._sigma, self.decomp.moduli)) % den

    def fresh(self) -> PhaseQubit:
        self.samples += 1
        if self.budget and self.samples > self.budget:
            raise NoShiftFound(f"Quantum query budget of {self.budget} samples exhausted")
        label = tuple(self.rng.randrange(m) for m in self.decomp.moduli)
        return PhaseQubit(label, self._phase_of(label))

    def _check(self, qubit: PhaseQubit) -> None:
        if settings.debug_phase_checks and qubit._phase != self._phase_of(qubit.label):
            raise AssertionError(f"Phase of label {qubit.label} drifted")

    def combine(self, a: PhaseQubit, b: PhaseQubit) -> PhaseQubit:
        """CNOT and measure: label a + b or a - b with probability 1/2 each."""
        den = self.decomp.denominator
        if self.rng.random() < 0.5:
            label = tuple((x + y) % m for x, y, m in zip(a.label, b.label, self.decomp.moduli))
            out = PhaseQubit(label, (a._phase + b._phase) % den)
        else:
            label = tuple((x - y) % m for x, y, m in zip(a.label, b.label, self.decomp.moduli))
            out = PhaseQubit(label, (a._phase - b._phase) % den)
        self._check(out)
        return out

    def combine_subsets(self, qubits: Sequence[PhaseQubit], first: int, second: int) -> PhaseQubit:
        """Qubit spanned by two subsets with equal measured partial sum."""
        den = self.decomp.denominator
        label = [0] * len(self.decomp.moduli)
        phase = 0
        for j, qb in enumerate(qubits):
            coef = ((second >> j) & 1) - ((first >> j) & 1)
            if coef:
                label = [(x + coef * y) % m for x, y, m in zip(label, qb.label, self.decomp.moduli)]
                phase += coef * qb._phase
        out = PhaseQubit(tuple(label), phase % den)
        self._check(out)
        return out

    def measure(self, qubit: PhaseQubit, basis: int) -> int:
        """Outcome 0 for |+> (basis 0) or |+i> (basis 1)."""
        theta = 2 * math.pi * qubit._phase / self.decomp.denominator
        p0 = math.cos(theta / 2) ** 2 if basis == 0 else (1 + math.sin(theta)) / 2
        return 0 if self.rng.random() < p0 else 1


@dataclass(frozen=True)
class _Chunk:
    factor: int
    q: int
    lo: int
    hi: int

    @property
    def modulus(self) -> int:
        return self.q ** (self.hi - self.lo)

    def value(self, label: Sequence[int]) -> int:
        return (label[self.factor] // self.q ** self.lo) % self.modulus


def _chunk_bits(order: int) -> int:
    return max(1, math.ceil(math.sqrt(math.log2(max(order, 2)))))


def _sieve_plan(decomp: CyclicDecomposition, target: int, digit: int, bits: int) -> List[_Chunk]:
    """Digits to cancel: every other factor, then the low digits of the target."""
    plan = []
    for f, (_, q, e) in enumerate(decomp.factors):
        top = e if f != target else e - 1 - digit
        step = max(1, int(bits // math.log2(q)))
        for lo in range(0, top, step):
            plan.append(_Chunk(f, q, lo, min(lo + step, top)))
    plan.sort(key=lambda c: (c.factor == target, c.factor, c.lo))
    return plan


def _samples_per_digit(q: int) -> int:
    return 12 + 6 * math.ceil(math.log2(q))


def _informative(qubit: PhaseQubit, decomp: CyclicDecomposition, target: int, digit: int) -> Optional[int]:
    """t with label = t * q^(e-1-digit) on the target factor, if t is a unit."""
    _, q, e = decomp.factors[target]
    if any(k for f, k in enumerate(qubit.label) if f != target):
        return None
    k = qubit.label[target]
    scale = q ** (e - 1 - digit)
    if k % scale:
        return None
    t = k // scale
    return t if t % q else None


def _decode_digit(observations: Sequence[Tuple[int, int, int]], q: int, digit: int, low: int) -> int:
    """Maximum-likelihood digit from (t, basis, outcome) triples."""
    d = np.arange(q, dtype=np.int64)
    modulus = q ** (digit + 1)
    loglik = np.zeros(q)
    for t, basis, outcome in observations:
        phi = ((t * (low + d * q ** digit)) % modulus) / modulus
        theta = 2 * np.pi * phi
        p0 = np.cos(theta / 2) ** 2 if basis == 0 else (1 + np.sin(theta)) / 2
        p = p0 if outcome == 0 else 1 - p0
        loglik += np.log(np.maximum(p, 1e-12))
    return int(np.argmax(loglik))


@dataclass
class SolverResult:
    solver: str
    shift: Element
    queries: int
    setup_queries: int = 0
    verification_queries: int = 0
    attempts: int = 1
    peak_pool: int = 0
    pool_trace: List[int] = field(default_factory=list)
    verified: bool = False


class _Stats:
    def __init__(self):
        self.peak = 0
        self.trace: List[int] = []

    def record(self, size: int) -> None:
        self.peak = max(self.peak, size)
        self.trace.append(size)


def _solve_digits(source: PhaseSource, produce: Callable[[List[_Chunk], int, int], List[PhaseQubit]],
                  bits: int) -> List[int]:
    decomp = source.decomp
    sigma = []
    for f, (_, q, e) in enumerate(decomp.factors):
        low = 0
        for digit in range(e):
            plan = _sieve_plan(decomp, f, digit, bits)
            qubits = produce(plan, f, digit)
            observations = []
            for qb in qubits:
                basis = source.rng.randrange(2)
                t = _informative(qb, decomp, f, digit)
                observations.append((t, basis, source.measure(qb, basis)))
            low += _decode_digit(observations, q, digit, low) * q ** digit
        sigma.append(low)
    return sigma


def _kuperberg_level(pool: List[PhaseQubit], chunk: _Chunk, source: PhaseSource) -> List[PhaseQubit]:
    Q = chunk.modulus
    out, buckets = [], {}
    for qb in pool:
        c = chunk.value(qb.label)
        if c == 0:
            out.append(qb)
        else:
            buckets.setdefault(min(c, Q - c), []).append(qb)
    for members in buckets.values():
        source.rng.shuffle(members)
        for a, b in zip(members[0::2], members[1::2]):
            combined = source.combine(a, b)
            if chunk.value(combined.label) == 0:
                out.append(combined)
    return out


def _kuperberg_attempt(source: PhaseSource, stats: _Stats) -> List[int]:
    decomp = source.decomp
    order = math.prod(decomp.moduli)
    bits = _chunk_bits(order)

    def produce(plan: List[_Chunk], f: int, digit: int) -> List[PhaseQubit]:
        q = decomp.factors[f][1]
        wanted = _samples_per_digit(q)
        widest = max((c.modulus for c in plan), default=1)
        batch = 2 * max(wanted, widest) * 4 ** len(plan)
        found: List[PhaseQubit] = []
        while len(found) < wanted:
            if batch > settings.kuperberg_max_pool:
                raise NoShiftFound(f"Sieve pool would exceed {settings.kuperberg_max_pool} qubits")
            pool = [source.fresh() for _ in range(batch)]
            stats.record(len(pool))
            for chunk in plan:
                pool = _kuperberg_level(pool, chunk, source)
                stats.record(len(pool))
            found += [qb for qb in pool if _informative(qb, decomp, f, digit) is not None]
            batch *= 2
        logger.debug(f"Sieve for factor {f} digit {digit}: {len(plan)} levels, {len(found)} qubits")
        return found[:wanted]

    return _solve_digits(source, produce, bits)


class MemoryTracker:
    """Qubits held at once, checked against a polynomial budget."""

    def __init__(self, budget: int):
        self.budget = budget
        self.held = 0
        self.peak = 0

    def acquire(self, n: int = 1) -> None:
        self.held += n
        self.peak = max(self.peak, self.held)
        if self.held > self.budget:
            raise NoShiftFound(f"Poly-space solver holds {self.held} qubits, budget {self.budget}")

    def release(self, n: int = 1) -> None:
        self.held -= n


def regev_memory_budget(order: int) -> int:
    return settings.regev_memory_factor * max(1, math.ceil(math.log2(max(order, 2)))) ** 2


def _regev_attempt(source: PhaseSource, stats: _Stats, tracker: MemoryTracker) -> List[int]:
    decomp = source.decomp
    order = math.prod(decomp.moduli)
    bits = _chunk_bits(order)
    rng = source.rng

    def subset_size(chunk: _Chunk) -> int:
        return max(2, min(settings.regev_max_subset, math.ceil(math.log2(chunk.modulus)) + 1))

    def produce_one(plan: List[_Chunk], level: int) -> PhaseQubit:
        if level < 0:
            tracker.acquire()
            return source.fresh()
        chunk = plan[level]
        r = subset_size(chunk)
        while True:
            qubits = [produce_one(plan, level - 1) for _ in range(r)]
            stats.record(tracker.held)
            values = [chunk.value(qb.label) for qb in qubits]
            sums = [0]
            for v in values:
                sums += [(x + v) % chunk.modulus for x in sums]
            first = rng.randrange(len(sums))
            matches = [m for m, x in enumerate(sums) if x == sums[first] and m != first]
            tracker.release(r)
            if matches:
                tracker.acquire()
                return source.combine_subsets(qubits, first, rng.choice(matches))

    def produce(plan: List[_Chunk], f: int, digit: int) -> List[PhaseQubit]:
        q = decomp.factors[f][1]
        wanted = _samples_per_digit(q)
        found: List[PhaseQubit] = []
        for _ in range(1000 * wanted):
            qb = produce_one(plan, len(plan) - 1)
            if _informative(qb, decomp, f, digit) is not None:
                found.append(qb)
                if len(found) == wanted:
                    break
            else:
                tracker.release()
        else:
            raise NoShiftFound(f"Too few informative qubits for factor {f} digit {digit}")
        tracker.release(len(found))
        return found

    return _solve_digits(source, produce, bits)


def _run_solver(name: str, inst: HiddenShiftInstance, rng: random.Random,
                attempt: Callable[[PhaseSource, _Stats], List[int]]) -> SolverResult:
    start = inst.queries
    source = PhaseSource(inst, rng)
    stats = _Stats()
    for n in range(1, settings.solver_retries + 1):
        sigma = attempt(source, stats)
        shift = source.decomp.from_factors(sigma)
        before = inst.queries
        ok = verify_shift(inst, shift, rng)
        verification = inst.queries - before
        if ok:
            logger.info(f"{name}: shift {shift} after {n} attempt(s), {source.samples} samples, "
                        f"peak pool {stats.peak}")
            return SolverResult(name, shift, source.samples, source.setup_queries, verification,
                                n, stats.peak, stats.trace[:256], True)
        logger.warning(f"{name}: attempt {n} produced unverified shift {shift}")
    raise NoShiftFound(f"{name} found no verified shift in {settings.solver_retries} attempts "
                       f"({inst.queries - start} oracle queries)")


def solve_kuperberg_sim(inst: HiddenShiftInstance, rng: random.Random) -> SolverResult:
    """Breadth-first combination sieve over phase qubits."""
    if inst.order > 1 << 24:
        raise NoShiftFound(f"|A|={inst.order} exceeds the sieve simulation budget")
    return _run_solver("kuperberg", inst, rng, _kuperberg_attempt)


def solve_regev_polyspace_sim(inst: HiddenShiftInstance, rng: random.Random) -> SolverResult:
    """Depth-first subset-sum combination with polynomially many qubits held."""
    if inst.order > 1 << 20:
        raise NoShiftFound(f"|A|={inst.order} exceeds the poly-space simulation budget")
    tracker = MemoryTracker(regev_memory_budget(inst.order))
    result = _run_solver("regev", inst, rng, lambda src, st: _regev_attempt(src, st, tracker))
    result.peak_pool = tracker.peak
    return result


def _mitm_ranges(divisors: Sequence[int]) -> Tuple[List[int], List[int]]:
    """Baby ranges and giant-step counts per coordinate, balanced near sqrt|A|."""
    target = math.isqrt(max(math.prod(divisors) - 1, 0)) + 1
    baby, giant = [], []
    covered = 1
    for d in divisors:
        if covered * d <= target:
            baby.append(d)
            giant.append(1)
            covered *= d
        else:
            m = max(1, -(-target // covered))
            baby.append(m)
            giant.append(-(-d // m))
            covered = target + 1
    return baby, giant


def solve_mitm_classical(inst: HiddenShiftInstance, rng: Optional[random.Random] = None) -> SolverResult:
    """Baby steps on f(0, .), giant steps on f(1, .)."""
    rng = rng or random.Random(settings.seed)
    if inst.order > settings.mitm_table_limit:
        raise NoShiftFound(f"|A|={inst.order} exceeds the table budget")
    start = inst.queries
    baby, giant = _mitm_ranges(inst.divisors)
    table: Dict[Hashable, Element] = {}
    for b in itertools.product(*(range(m) for m in baby)):
        table.setdefault(inst.query(0, b), inst.normalize(b))
    steps = [m if g > 1 else 0 for m, g in zip(baby, giant)]
    for j in itertools.product(*(range(g) for g in giant)):
        g = inst.normalize([-ji * step for ji, step in zip(j, steps)])
        b = table.get(inst.query(1, g))
        if b is not None:
            shift = inst.sub(b, g)
            calls = inst.queries - start
            before = inst.queries
            ok = verify_shift(inst, shift, rng)
            if ok:
                logger.info(f"mitm: shift {shift} after {calls} oracle calls")
                return SolverResult("mitm", shift, calls, 0, inst.queries - before, 1,
                                    len(table), [len(table)], True)
    raise NoShiftFound(f"No collision between f(0, .) and f(1, .) over |A|={inst.order}")


SOLVERS: Dict[str, Callable[[HiddenShiftInstance, random.Random], SolverResult]] = {
    "kuperberg": solve_kuperberg_sim,
    "regev": solve_regev_polyspace_sim,
    "mitm": solve_mitm_classical,
}


@dataclass
class AttackResult:
    """Recovered class with an equivalent exponent vector and isogeny chain."""

    shift: Element
    decomposition: ShortDecomposition
    exponents: Tuple[int, ...]
    chain: IsogenyChain
    solver: SolverResult
    verified: bool


def attack_csidh(params: CsidhParams, alice_A: int, solver: str = "mitm",
                 rng: Optional[random.Random] = None,
                 precomp: Optional[OraclePrecomp] = None) -> AttackResult:
    """Recover a class acting on the base curve to give Alice's public curve.

    Args:
        params: CSIDH parameters
        alice_A: Montgomery coefficient of Alice's public key
        solver: one of SOLVERS
        rng: randomness for the solver and for kernel sampling
        precomp: oracle precomputation over the CSIDH primes, built when omitted

    Returns:
        AttackResult; exponents are aligned with params.ells
    """
    rng = rng or random.Random(settings.seed)
    if solver not in SOLVERS:
        raise ValueError(f"Unknown solver {solver!r}, expected one of {sorted(SOLVERS)}")
    precomp = precomp or precompute(params.discriminant, allowed=params.ells, rng=rng)
    if not verify_orientation(precomp, params, rng):
        raise NoShiftFound("Prime ideal orientation is inconsistent with the prime forms")
    E1 = params.base_curve
    E2 = MontgomeryCurve(alice_A, params.p)
    inst = make_instance(precomp, E1, E2, rng)
    result = SOLVERS[solver](inst, rng)
    decomposition = decompose(precomp, result.shift)
    by_prime = dict(decomposition.pairs())
    exponents = tuple(by_prime.get(ell, 0) for ell in params.ells)
    verified = group_action(E1, params.ells, exponents, rng) == E2
    chain = reconstruct_isogeny_chain(E1, decomposition.pairs(), rng)
    verified = verified and chain.codomain_A == E2.A
    logger.info(f"Attack with {solver}: shift {result.shift}, exponents {list(exponents)}, "
                f"verified={verified}")
    return AttackResult(result.shift, decomposition, exponents, chain, result, verified)
