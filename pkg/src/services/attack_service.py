"""End-to-end key recovery runs with verification and persistence."""

import json
import logging
import random
from typing import Any, Dict, List, Optional, Sequence

from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session

from src.database.models import AttackTranscript
from src.models.records import AttackRecord
from src.services.classgroup import ClassGroupError, compose, identity, power, prime_form
from src.services.genset import HeuristicFailure
from src.services.hsp import NoShiftFound, attack_csidh, regev_memory_budget
from src.services.isogeny import CsidhParams, IsogenyError, SecretKey, csidh_exponent_bound, keygen
from src.services.lattice import LatticeError
from src.services.oracle import OraclePrecomp, precompute

logger = logging.getLogger(__name__)


class AttackServiceError(Exception):
    """Custom exception for attack service errors."""
    pass


class AttackService:
    """Generates Alice keys and recovers them with a hidden shift solver."""

    def __init__(self, params: CsidhParams, solver: str = "mitm", seed: Optional[int] = None,
                 db: Optional[Session] = None):
        self.params = params
        self.solver = solver
        self.seed = seed
        self.db = db
        self.rng = random.Random(seed)
        self._precomp: Optional[OraclePrecomp] = None

    @property
    def precomp(self) -> OraclePrecomp:
        """Oracle precomputation over the CSIDH primes, built once per service."""
        if self._precomp is None:
            try:
                self._precomp = precompute(self.params.discriminant, allowed=self.params.ells, rng=self.rng)
            except (ClassGroupError, HeuristicFailure, LatticeError) as e:
                logger.error(f"Precomputation for p={self.params.p} failed: {str(e)}")
                raise AttackServiceError(f"Precomputation failed: {str(e)}")
        return self._precomp

    def secret_class(self, sk: SecretKey) -> List[int]:
        """Coordinates of prod l_i^{e_i} with respect to the precomputed generators."""
        delta = self.params.discriminant
        form = identity(delta)
        for ell, e in zip(self.params.ells, sk.exponents):
            if e:
                form = compose(form, power(prime_form(delta, ell), e))
        return list(self.precomp.dlog(form))

    def attack_key(self, public_A: int, index: int = 0,
                   true_shift: Optional[Sequence[int]] = None) -> AttackRecord:
        precomp = self.precomp
        record = AttackRecord(
            p=self.params.p, ells=list(self.params.ells), seed=self.seed, index=index,
            solver=self.solver, public_A=public_A,
            true_shift=list(true_shift) if true_shift is not None else None,
            divisors=list(precomp.divisors), generating_primes=precomp.primes.norms,
        )
        if self.solver == "regev":
            record.memory_budget = regev_memory_budget(precomp.order)
        try:
            result = attack_csidh(self.params, public_A, solver=self.solver, rng=self.rng, precomp=precomp)
            solved = result.solver
            record.recovered = result.verified
            record.first_attempt = result.verified and solved.attempts == 1
            record.shift = list(result.shift)
            record.exponents = list(result.exponents)
            record.decomposition = list(result.decomposition.exponents)
            record.attempts = solved.attempts
            record.queries = solved.queries
            record.setup_queries = solved.setup_queries
            record.verification_queries = solved.verification_queries
            record.peak_pool = solved.peak_pool
            record.pool_trace = list(solved.pool_trace)
            record.chain_length = len(result.chain)
            record.chain_degree = result.chain.degree
            if not result.verified:
                record.error = "Recovered class does not reproduce the public curve"
        except (NoShiftFound, IsogenyError, ClassGroupError) as e:
            logger.error(f"Attack on key {index} (A={public_A}) failed: {str(e)}")
            record.error = f"{type(e).__name__}: {str(e)}"
        return record

    def run(self, keys: int = 1, m: Optional[int] = None) -> Dict[str, Any]:
        """Attack `keys` freshly generated Alice keys.

        Args:
            keys: number of random keys
            m: exponent bound for the generated secrets, derived from h when omitted

        Returns:
            Dictionary with records, first-attempt count and success flag
        """
        try:
            m = m or csidh_exponent_bound(len(self.params.ells), self.precomp.order)
            records: List[AttackRecord] = []
            for index in range(keys):
                sk, pk = keygen(self.params, m, self.rng)
                records.append(self.attack_key(pk.A, index, self.secret_class(sk)))
            recovered = sum(r.recovered for r in records)
            first = sum(bool(r.first_attempt) for r in records)
            logger.info(f"{self.solver}: recovered {recovered}/{keys} keys, "
                        f"{first} on the first attempt")
            self._persist(records)
            return {
                'success': recovered == keys,
                'records': records,
                'recovered': recovered,
                'first_attempt': first,
                'error': None if recovered == keys else f"{keys - recovered} key(s) not recovered",
            }
        except (AttackServiceError, IsogenyError, ClassGroupError) as e:
            logger.error(f"Attack run failed: {e}")
            return {'success': False, 'records': [], 'recovered': 0, 'first_attempt': 0, 'error': str(e)}

    def _persist(self, records: Sequence[AttackRecord]) -> None:
        if self.db is None:
            return
        try:
            for r in records:
                self.db.add(AttackTranscript(
                    p=str(r.p), ells=json.dumps(r.ells), seed=r.seed, solver=r.solver,
                    public_A=str(r.public_A), recovered=r.recovered, first_attempt=r.first_attempt,
                    attempts=r.attempts, queries=r.queries, peak_pool=r.peak_pool,
                    shift=json.dumps(r.shift), exponents=json.dumps(r.exponents), error=r.error,
                ))
            self.db.commit()
        except SQLAlchemyError as e:
            self.db.rollback()
            logger.error(f"Storing attack transcripts failed: {e}")
            raise AttackServiceError(f"Database error: {str(e)}")
