"""Parameter generation, audit and cost estimates for toy CSIDH instances."""

import itertools
import logging
import math
import random
from typing import Any, Dict, List, Optional, Sequence

from sympy import isprime, primerange

from src.config import settings
from src.models.records import AuditCheck, CostRow, ParamsReport
from src.services.classgroup import ClassGroupError, class_number_bsgs
from src.services.isogeny import CsidhParams, IsogenyError, MontgomeryCurve, is_supersingular

logger = logging.getLogger(__name__)

# Published quantum attack costs (log2) for the standard parameter sizes, shown as reference only
REFERENCE_QUANTUM_COST = {512: 62, 1024: 94, 1792: 129}

# Above this |delta| the audit skips the class number computation
AUDIT_CLASS_NUMBER_LIMIT = 10 ** 14

DEFAULT_SEARCH_BUDGET = 100_000


class ParamsServiceError(Exception):
    """Custom exception for parameter service errors."""
    pass


def generate_params(u: int, ell_bound: int, budget: Optional[int] = None) -> CsidhParams:
    """First product of u distinct odd primes <= ell_bound with 4 * prod - 1 prime.

    Products are tried in lexicographic order of the prime tuples, so the
    smallest primes are preferred.
    """
    if u < 1:
        raise ParamsServiceError(f"Need at least one small prime, got u={u}")
    primes = list(primerange(3, ell_bound + 1))
    if len(primes) < u:
        raise ParamsServiceError(f"Only {len(primes)} odd primes up to {ell_bound}, need {u}")
    budget = budget or DEFAULT_SEARCH_BUDGET
    for tried, ells in enumerate(itertools.combinations(primes, u), start=1):
        if tried > budget:
            break
        p = 4 * math.prod(ells) - 1
        if isprime(p):
            logger.info(f"Found p={p} from ells {list(ells)} after {tried} candidate(s)")
            return CsidhParams(p, tuple(ells))
    raise ParamsServiceError(f"No prime 4*prod(ells)-1 among the first {budget} products of "
                             f"{u} primes up to {ell_bound}")


def _two_sylow_message(p: int) -> str:
    return (f"p={p} is 1 mod 4: -4p is then a fundamental discriminant with two prime "
            f"divisors, so Cl(-4p) has a nontrivial 2-Sylow subgroup and even order. "
            f"Restricting to p = 3 (mod 4), where the class number of the order of "
            f"discriminant -4p is odd, is necessary.")


def audit_params(p: int, ells: Optional[Sequence[int]] = None,
                 rng: Optional[random.Random] = None) -> ParamsReport:
    """Check p and the small primes for use as CSIDH parameters.

    Args:
        p: the prime
        ells: the small primes, when known
        rng: randomness for the class number and supersingularity checks

    Returns:
        ParamsReport whose `passed` is True only if every check passed
    """
    rng = rng or random.Random(settings.seed)
    delta = -4 * p
    report = ParamsReport(p=p, ells=list(ells or []), discriminant=delta)
    checks: List[AuditCheck] = report.checks

    prime = bool(isprime(p)) and p > 3
    checks.append(AuditCheck(name="p prime", passed=prime, detail="" if prime else f"{p} is not an odd prime > 3"))
    congruent = p % 4 == 3
    if congruent:
        checks.append(AuditCheck(name="p = 3 mod 4", passed=True))
    else:
        message = _two_sylow_message(p)
        logger.warning(message)
        checks.append(AuditCheck(name="p = 3 mod 4", passed=False, detail=message))

    if ells:
        product_ok = 4 * math.prod(ells) - 1 == p
        checks.append(AuditCheck(name="p = 4*prod(ells) - 1", passed=product_ok,
                                 detail="" if product_ok else f"4*prod{list(ells)} - 1 = {4 * math.prod(ells) - 1}"))
        bad = [ell for ell in ells if ell == 2 or not isprime(ell) or (p + 1) % ell]
        checks.append(AuditCheck(name="ells odd primes dividing p + 1", passed=not bad,
                                 detail="" if not bad else f"offending: {bad}"))

    if prime and -delta <= AUDIT_CLASS_NUMBER_LIMIT:
        try:
            h = class_number_bsgs(delta, rng)
            report.class_number = h
            checks.append(AuditCheck(name="class number odd", passed=h % 2 == 1, detail=f"h({delta}) = {h}"))
        except ClassGroupError as e:
            logger.error(f"Class number of {delta} failed: {str(e)}")
            checks.append(AuditCheck(name="class number odd", passed=False, detail=str(e)))
    elif prime:
        checks.append(AuditCheck(name="class number odd", passed=congruent,
                                 detail=f"|delta| above {AUDIT_CLASS_NUMBER_LIMIT}: parity from p mod 4 only"))

    if prime:
        try:
            supersingular = is_supersingular(MontgomeryCurve(0, p), rng)
        except IsogenyError as e:
            logger.error(f"Supersingularity check failed: {str(e)}")
            supersingular = False
        checks.append(AuditCheck(name="y^2 = x^3 + x supersingular", passed=supersingular))

    report.passed = all(c.passed for c in checks)
    logger.info(f"Audit of p={p}: {'PASS' if report.passed else 'FAIL'}")
    return report


def cost_estimate(log_p: int) -> CostRow:
    """Cost exponents for a prime of log_p bits, lower-order terms dropped.

    The classical column is a collision search in a group of size
    N ~ sqrt(p). The subexponential column is exp(sqrt(ln|D| lnln|D|)/sqrt(2))
    with |D| = 4p; the query column is exp(sqrt(2 ln N)). Neither is a
    security claim.
    """
    if not 64 <= log_p <= 4096:
        raise ParamsServiceError(f"log p must lie in [64, 4096], got {log_p}")
    ln_delta = log_p * math.log(2) + math.log(4)
    ln_group = log_p * math.log(2) / 2
    subexp = math.sqrt(ln_delta * math.log(ln_delta)) / math.sqrt(2)
    queries = math.sqrt(2 * ln_group)
    return CostRow(
        log_p=log_p,
        classical_log2=log_p / 4,
        reference_quantum_log2=REFERENCE_QUANTUM_COST.get(log_p),
        subexp_log2=round(subexp / math.log(2), 2),
        query_log2=round(queries / math.log(2), 2),
    )


class ParamsService:
    """Result-dict wrappers used by the parameter subcommands."""

    def __init__(self, rng: Optional[random.Random] = None):
        self.rng = rng or random.Random(settings.seed)

    def generate(self, u: int, ell_bound: int, budget: Optional[int] = None) -> Dict[str, Any]:
        try:
            params = generate_params(u, ell_bound, budget)
            return {'success': True, 'params': params, 'error': None}
        except (ParamsServiceError, IsogenyError) as e:
            logger.error(f"Parameter generation failed: {e}")
            return {'success': False, 'params': None, 'error': str(e)}

    def audit(self, p: int, ells: Optional[Sequence[int]] = None) -> Dict[str, Any]:
        try:
            report = audit_params(p, ells, self.rng)
            failed = [c.name for c in report.checks if not c.passed]
            return {
                'success': report.passed,
                'report': report,
                'error': None if report.passed else f"Failed checks: {', '.join(failed)}",
            }
        except Exception as e:
            logger.error(f"Unexpected error in parameter audit: {e}")
            return {'success': False, 'report': None, 'error': str(e)}

    def costs(self, log_ps: Sequence[int]) -> Dict[str, Any]:
        try:
            rows = [cost_estimate(n) for n in log_ps]
            return {'success': True, 'rows': rows, 'error': None}
        except ParamsServiceError as e:
            logger.error(f"Cost estimate failed: {e}")
            return {'success': False, 'rows': [], 'error': str(e)}
