"""Supersingular Montgomery curves over F_p and the CSIDH group action.

Curves are y^2 = x^3 + A x^2 + x with p = 4 * l_1 * ... * l_u - 1. Points
are handled x-only in projective (X : Z) coordinates; Z = 0 is the
identity. Odd-degree isogenies use Velu-type formulas, computing the
codomain through the twisted Edwards model and pushing points with the
Montgomery x-only map.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from sympy import isprime, sqrt_mod

from src.config import settings

logger = logging.getLogger(__name__)


class IsogenyError(Exception):
    """Base exception for curve and isogeny computations."""
    pass


class FieldError(IsogenyError):
    pass


class KernelOrderError(IsogenyError):
    pass


class SamplingError(IsogenyError):
    pass


class CurveError(IsogenyError):
    pass


class PrimeField:
    """Arithmetic on canonical residues mod p."""

    def __init__(self, p: int):
        if not isprime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __call__(self, x: int) -> int:
        return x % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise FieldError("Inversion of zero")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.p

    def is_square(self, a: int) -> bool:
        a %= self.p
        return a == 0 or pow(a, (self.p - 1) // 2, self.p) == 1

    def sqrt(self, a: int) -> Optional[int]:
        """A square root of a, or None when a is not a square."""
        a %= self.p
        if a == 0:
            return 0
        if not self.is_square(a):
            return None
        if self.p % 4 == 3:
            return pow(a, (self.p + 1) // 4, self.p)
        return int(sqrt_mod(a, self.p))

    def random_element(self, rng: random.Random, nonzero: bool = True) -> int:
        return rng.randrange(1 if nonzero else 0, self.p)


@dataclass(frozen=True)
class CsidhParams:
    """p = 4 * prod(ells) - 1 with base curve A = 0."""

    p: int
    ells: Tuple[int, ...]
    base_A: int = 0

    def __post_init__(self):
        if 4 * math.prod(self.ells) - 1 != self.p:
            raise CurveError(f"p={self.p} is not 4*prod{list(self.ells)} - 1")
        if not isprime(self.p):
            raise CurveError(f"p={self.p} is not prime")
        if self.p % 4 != 3:
            raise CurveError(f"p={self.p} is not 3 mod 4")
        for ell in self.ells:
            if ell == 2 or not isprime(ell):
                raise CurveError(f"{ell} is not an odd prime")
        if len(set(self.ells)) != len(self.ells):
            raise CurveError(f"Repeated small primes in {list(self.ells)}")

    @classmethod
    def from_ells(cls, ells: Iterable[int]) -> "CsidhParams":
        ells = tuple(sorted(int(e) for e in ells))
        return cls(4 * math.prod(ells) - 1, ells)

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.p)

    @property
    def discriminant(self) -> int:
        return -4 * self.p

    @property
    def base_curve(self) -> "MontgomeryCurve":
        return MontgomeryCurve(self.base_A, self.p)

    def to_text(self) -> str:
        return f"p={self.p}\nells={','.join(str(e) for e in self.ells)}\n"

    @classmethod
    def parse(cls, text: str) -> "CsidhParams":
        values = {}
        for line in text.splitlines():
            if "=" in line:
                key, _, value = line.partition("=")
                values[key.strip()] = value.strip()
        try:
            params = cls.from_ells(int(e) for e in values["ells"].split(","))
        except (KeyError, ValueError) as e:
            raise CurveError(f"Malformed parameter file: {e}")
        if "p" in values and int(values["p"]) != params.p:
            raise CurveError(f"Parameter file p={values['p']} disagrees with its ells")
        return params


@dataclass(frozen=True)
class ProjPoint:
    X: int
    Z: int

    @property
    def is_identity(self) -> bool:
        return self.Z == 0

    def affine_x(self, F: PrimeField) -> int:
        return F.div(self.X, self.Z)


IDENTITY = ProjPoint(1, 0)


@dataclass(frozen=True)
class MontgomeryCurve:
    """y^2 = x^3 + A x^2 + x over F_p, A kept as a canonical residue."""

    A: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "A", self.A % self.p)
        if (self.A * self.A - 4) % self.p == 0:
            raise CurveError(f"A={self.A} gives a singular curve")

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.p)

    @property
    def a24(self) -> int:
        return (self.A + 2) * pow(4, -1, self.p) % self.p

    def rhs(self, x: int) -> int:
        return (x * x * x + self.A * x * x + x) % self.p

    def twist(self) -> "MontgomeryCurve":
        return MontgomeryCurve(-self.A, self.p)

    def j_invariant(self) -> int:
        F = self.field
        a2 = self.A * self.A
        return F.div(256 * pow(a2 - 3, 3, self.p), a2 - 4)

    def j_invariant_weierstrass(self) -> int:
        """j from the short Weierstrass model y^2 = u^3 + a u + b."""
        F = self.field
        a = F.sub(1, F.div(self.A * self.A, 3))
        b = F.div(self.A * (2 * self.A * self.A - 9), 27)
        num = 4 * pow(a, 3, self.p)
        return F.div(1728 * num, num + 27 * b * b)


def xdbl(P: ProjPoint, a24: int, p: int) -> ProjPoint:
    t0 = (P.X + P.Z) ** 2 % p
    t1 = (P.X - P.Z) ** 2 % p
    t2 = (t0 - t1) % p
    return ProjPoint(t0 * t1 % p, t2 * (t1 + a24 * t2) % p)


def xadd(P: ProjPoint, Q: ProjPoint, diff: ProjPoint, p: int) -> ProjPoint:
    """x(P + Q) from x(P), x(Q) and x(P - Q)."""
    u = (P.X - P.Z) * (Q.X + Q.Z) % p
    v = (P.X + P.Z) * (Q.X - Q.Z) % p
    return ProjPoint(diff.Z * (u + v) ** 2 % p, diff.X * (u - v) ** 2 % p)


def ladder(k: int, P: ProjPoint, curve: MontgomeryCurve) -> ProjPoint:
    """x([k]P) by the Montgomery ladder."""
    p = curve.p
    if k < 0:
        k = -k
    if k == 0 or P.is_identity:
        return IDENTITY
    if P.X % p == 0:
        return IDENTITY if k % 2 == 0 else ProjPoint(0, 1)
    a24 = curve.a24
    R0, R1 = IDENTITY, P
    for bit in bin(k)[2:]:
        if bit == "1":
            R0, R1 = xadd(R0, R1, P, p), xdbl(R1, a24, p)
        else:
            R0, R1 = xdbl(R0, a24, p), xadd(R0, R1, P, p)
    return R0


def point_count(curve: MontgomeryCurve) -> int:
    """#E(F_p) by summing Legendre symbols (small p only)."""
    F = curve.field
    total = 1
    for x in range(curve.p):
        y2 = curve.rhs(x)
        total += 1 if y2 == 0 else (2 if F.is_square(y2) else 0)
    return total


def is_supersingular(curve: MontgomeryCurve, rng: Optional[random.Random] = None,
                     trials: int = 16) -> bool:
    """Spot check: random points of E and of its twist are killed by p + 1."""
    rng = rng or random.Random(settings.seed)
    for _ in range(trials):
        x = rng.randrange(1, curve.p)
        if ladder(curve.p + 1, ProjPoint(x, 1), curve).Z % curve.p != 0:
            return False
    return True


def validate_curve(curve: MontgomeryCurve, rng: Optional[random.Random] = None) -> MontgomeryCurve:
    if not is_supersingular(curve, rng):
        raise CurveError(f"Curve A={curve.A} over F_{curve.p} is not supersingular")
    return curve


def kernel_multiples(K: ProjPoint, ell: int, curve: MontgomeryCurve) -> List[ProjPoint]:
    """[i]K for i = 1 .. (ell - 1) / 2."""
    p = curve.p
    half = (ell - 1) // 2
    points = [K]
    if half >= 2:
        points.append(xdbl(K, curve.a24, p))
    for _ in range(2, half):
        points.append(xadd(points[-1], K, points[-2], p))
    return points


def velu_isogeny(curve: MontgomeryCurve, K: ProjPoint, ell: int
                 ) -> Tuple[MontgomeryCurve, Callable[[ProjPoint], ProjPoint]]:
    """Codomain and point map of the degree-ell isogeny with kernel <K>."""
    p = curve.p
    if ell < 3 or ell % 2 == 0:
        raise KernelOrderError(f"Only odd prime degrees are supported, got {ell}")
    if K.is_identity or not ladder(ell, K, curve).is_identity:
        raise KernelOrderError(f"Kernel point does not have order {ell}")
    multiples = kernel_multiples(K, ell, curve)
    pi_plus, pi_minus = 1, 1
    for Q in multiples:
        pi_plus = pi_plus * (Q.X + Q.Z) % p
        pi_minus = pi_minus * (Q.X - Q.Z) % p
    a = pow((curve.A + 2) % p, ell, p) * pow(pi_plus, 8, p) % p
    d = pow((curve.A - 2) % p, ell, p) * pow(pi_minus, 8, p) % p
    F = curve.field
    codomain = MontgomeryCurve(F.div(2 * (a + d), a - d), p)

    def push(P: ProjPoint) -> ProjPoint:
        X, Z = P.X, P.Z
        num, den = X, Z
        for Q in multiples:
            num = num * (X * Q.X - Z * Q.Z) ** 2 % p
            den = den * (X * Q.Z - Z * Q.X) ** 2 % p
        return ProjPoint(num, den)

    return codomain, push


def sample_kernel_point(curve: MontgomeryCurve, ell: int, sign: int,
                        rng: random.Random) -> ProjPoint:
    """Point of order ell on E (sign +1) or on its twist (sign -1)."""
    F = curve.field
    cofactor = (curve.p + 1) // ell
    for _ in range(settings.kernel_retries):
        x = F.random_element(rng)
        y2 = curve.rhs(x)
        if y2 == 0 or F.is_square(y2) != (sign > 0):
            continue
        Q = ladder(cofactor, ProjPoint(x, 1), curve)
        if not Q.is_identity:
            return Q
    raise SamplingError(f"No point of order {ell} found after {settings.kernel_retries} tries")


def apply_prime_ideal(curve: MontgomeryCurve, ell: int, sign: int,
                      rng: random.Random) -> MontgomeryCurve:
    """Action of (ell, pi - 1) for sign +1, or of (ell, pi + 1) for sign -1."""
    codomain, _ = _prime_step(curve, ell, sign, rng)
    return codomain


def _prime_step(curve: MontgomeryCurve, ell: int, sign: int,
                rng: random.Random) -> Tuple[MontgomeryCurve, ProjPoint]:
    if (curve.p + 1) % ell:
        raise KernelOrderError(f"{ell} does not divide p + 1 = {curve.p + 1}")
    K = sample_kernel_point(curve, ell, sign, rng)
    codomain, _ = velu_isogeny(curve, K, ell)
    return codomain, K


def orbit(curve: MontgomeryCurve, ell: int, sign: int, rng: random.Random,
          limit: Optional[int] = None) -> List[MontgomeryCurve]:
    """Curves visited by repeatedly applying one prime ideal until returning."""
    limit = limit or curve.p + 1
    walk = [curve]
    current = apply_prime_ideal(curve, ell, sign, rng)
    while current != curve:
        walk.append(current)
        if len(walk) > limit:
            raise CurveError(f"Orbit of l={ell} did not close after {limit} steps")
        current = apply_prime_ideal(current, ell, sign, rng)
    return walk


@dataclass(frozen=True)
class SecretKey:
    exponents: Tuple[int, ...]

    def __neg__(self) -> "SecretKey":
        return SecretKey(tuple(-e for e in self.exponents))

    def to_text(self) -> str:
        return ",".join(str(e) for e in self.exponents)


@dataclass(frozen=True)
class PublicKey:
    A: int

    def to_text(self) -> str:
        return str(self.A)


def csidh_exponent_bound(u: int, class_number: int) -> int:
    """Smallest m with (2m + 1)^u >= h."""
    m = 0
    while (2 * m + 1) ** u < class_number:
        m += 1
    return max(m, 1)


def group_action(curve: MontgomeryCurve, ells: Sequence[int], exponents: Sequence[int],
                 rng: random.Random) -> MontgomeryCurve:
    """Apply prod l_i^{e_i}, one prime-degree isogeny per unit of |e_i|."""
    if len(ells) != len(exponents):
        raise CurveError(f"{len(exponents)} exponents for {len(ells)} primes")
    for ell, e in zip(ells, exponents):
        sign = 1 if e > 0 else -1
        for _ in range(abs(e)):
            curve = apply_prime_ideal(curve, ell, sign, rng)
    return curve


def keygen(params: CsidhParams, m: int, rng: random.Random) -> Tuple[SecretKey, PublicKey]:
    sk = SecretKey(tuple(rng.randint(-m, m) for _ in params.ells))
    pk = PublicKey(group_action(params.base_curve, params.ells, sk.exponents, rng).A)
    return sk, pk


def shared_secret(params: CsidhParams, sk: SecretKey, peer: PublicKey,
                  rng: random.Random) -> int:
    curve = validate_curve(MontgomeryCurve(peer.A, params.p), rng)
    return group_action(curve, params.ells, sk.exponents, rng).A


@dataclass(frozen=True)
class IsogenyStep:
    ell: int
    sign: int
    kernel_x: int
    codomain_A: int


@dataclass
class IsogenyChain:
    """Unevaluated composition of prime-degree steps starting at start_A."""

    start_A: int
    steps: List[IsogenyStep] = field(default_factory=list)

    @property
    def codomain_A(self) -> int:
        return self.steps[-1].codomain_A if self.steps else self.start_A

    @property
    def degree(self) -> int:
        return math.prod(step.ell for step in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def reconstruct_isogeny_chain(curve: MontgomeryCurve, decomposition: Iterable[Tuple[int, int]],
                              rng: random.Random) -> IsogenyChain:
    """Chain of prime-degree isogenies for prod l^e over (l, e) pairs."""
    chain = IsogenyChain(curve.A)
    F = curve.field
    for ell, e in decomposition:
        sign = 1 if e > 0 else -1
        for _ in range(abs(e)):
            codomain, K = _prime_step(curve, ell, sign, rng)
            chain.steps.append(IsogenyStep(ell, sign, K.affine_x(F), codomain.A))
            curve = codomain
    logger.debug(f"Isogeny chain of length {len(chain)} ends at A={chain.codomain_A}")
    return chain
