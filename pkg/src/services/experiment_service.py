"""Short-decomposition experiment over random CSIDH-shaped discriminants."""

import json
import logging
import random
import uuid
from typing import Any, Dict, List, Optional, Sequence

from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session
from sympy import nextprime

from src.database.models import ExperimentRow, ExperimentRun, ExperimentTrial
from src.models.records import ReferenceRow, Table2Row, TrialLine
from src.services.oracle import HeuristicRow, TrialRecord, heuristic_experiment

logger = logging.getLogger(__name__)

# Published maximal exponents over 1000 random classes: (digits, s, max, bound)
REFERENCE_ROWS = [
    (20, 13, 6, 36),
    (25, 15, 8, 48),
    (30, 17, 7, 61),
    (35, 19, 9, 75),
    (40, 20, 10, 91),
    (45, 22, 14, 110),
    (50, 24, 13, 130),
]


class ExperimentServiceError(Exception):
    """Custom exception for experiment service errors."""
    pass


def random_csidh_discriminant(digits: int, rng: random.Random) -> int:
    """-4p for a random prime p = 3 mod 4 with log10(4p) in [digits, digits + log10 2)."""
    if digits < 3:
        raise ExperimentServiceError(f"Discriminants need at least 3 digits, got {digits}")
    lo, hi = 10 ** digits // 4, 10 ** digits // 2
    p = nextprime(rng.randrange(lo, hi))
    while p % 4 != 3:
        p = nextprime(p)
    return -4 * int(p)


def reference_rows(digits: Sequence[int]) -> List[ReferenceRow]:
    wanted = set(digits)
    return [ReferenceRow(log10_delta=d, generator_count=s, max_coefficient=m, exponent_bound=b)
            for d, s, m, b in REFERENCE_ROWS if d in wanted]


def _to_row(row: HeuristicRow) -> Table2Row:
    within = None if row.max_coefficient is None else row.max_coefficient <= row.exponent_bound
    return Table2Row(
        delta=row.delta, log10_delta=row.log10_delta, generator_count=row.generator_count,
        max_coefficient=row.max_coefficient, exponent_bound=row.exponent_bound, within_bound=within,
        mode=row.mode, trials=row.trials, mean_max=row.mean_max,
        raw_max_coefficient=row.raw_max_coefficient, raw_mean_max=row.raw_mean_max,
        class_number=row.class_number, divisors=list(row.divisors), primes=list(row.primes),
        error=row.error,
    )


def _to_line(record: TrialRecord) -> TrialLine:
    return TrialLine(delta=record.delta, trial=record.trial, y=list(record.y),
                     exponents=list(record.exponents), max_abs=record.max_abs,
                     raw_max_abs=record.raw_max_abs)


class ExperimentService:
    """Runs the maximal-exponent experiment and stores its trials."""

    def __init__(self, db: Optional[Session] = None, seed: Optional[int] = None):
        self.db = db
        self.seed = seed
        self.rng = random.Random(seed)

    def sample_discriminants(self, digits: Sequence[int], count: int) -> List[int]:
        return [random_csidh_discriminant(d, self.rng) for d in digits for _ in range(count)]

    def run(self, trials: int, digits: Sequence[int] = (20,), count: int = 3,
            deltas: Optional[Sequence[int]] = None, mode: str = "consecutive") -> Dict[str, Any]:
        """
        Decompose `trials` random classes per discriminant.

        Args:
            trials: random classes per discriminant
            digits: sizes log10|delta| to sample when deltas is not given
            count: discriminants per size
            deltas: explicit discriminants
            mode: consecutive or reordered prime sets

        Returns:
            Dictionary with rows, per-trial lines and reference rows; success
            requires every row to finish within its exponent bound
        """
        try:
            sampled = not deltas
            deltas = self.sample_discriminants(digits, count) if sampled else list(deltas)
            logger.info(f"Experiment over {len(deltas)} discriminant(s), {trials} trials each, mode {mode}")
            records: List[TrialRecord] = []
            raw_rows = heuristic_experiment(deltas, trials, mode=mode, rng=self.rng, records=records)
            rows = [_to_row(r) for r in raw_rows]
            lines = [_to_line(r) for r in records]
            run_id = self._persist(raw_rows, lines, trials, mode, digits if sampled else None)
            failed = [r for r in rows if r.error or not r.within_bound]
            for r in failed:
                logger.warning(f"delta={r.delta}: {r.error or f'max {r.max_coefficient} above {r.exponent_bound}'}")
            return {
                'success': not failed,
                'run_id': run_id,
                'rows': rows,
                'trials': lines,
                'reference': reference_rows(sorted({round(r.log10_delta) for r in rows})),
                'error': None if not failed else f"{len(failed)} row(s) failed or exceeded the bound",
            }
        except ExperimentServiceError as e:
            logger.error(f"Experiment failed: {e}")
            return {'success': False, 'run_id': None, 'rows': [], 'trials': [], 'reference': [],
                    'error': str(e)}

    def _persist(self, rows: Sequence[HeuristicRow], lines: Sequence[TrialLine], trials: int,
                 mode: str, digits: Optional[Sequence[int]]) -> Optional[str]:
        if self.db is None:
            return None
        run_id = str(uuid.uuid4())
        try:
            self.db.add(ExperimentRun(run_id=run_id, seed=self.seed, mode=mode,
                                      digits=digits[0] if digits and len(digits) == 1 else None,
                                      trials_per_delta=trials))
            for r in rows:
                self.db.add(ExperimentRow(
                    run_id=run_id, delta=str(r.delta), log10_delta=r.log10_delta,
                    generator_count=r.generator_count, max_coefficient=r.max_coefficient,
                    exponent_bound=r.exponent_bound, mean_max=r.mean_max,
                    raw_max_coefficient=r.raw_max_coefficient,
                    class_number=None if r.class_number is None else str(r.class_number),
                    divisors=json.dumps([str(d) for d in r.divisors]), primes=json.dumps(list(r.primes)),
                    seconds=r.seconds, error=r.error,
                ))
            for line in lines:
                self.db.add(ExperimentTrial(
                    run_id=run_id, delta=str(line.delta), coordinates=json.dumps([str(v) for v in line.y]),
                    exponents=json.dumps(line.exponents), max_abs=line.max_abs, raw_max_abs=line.raw_max_abs,
                ))
            self.db.commit()
            logger.info(f"Stored run {run_id}: {len(rows)} row(s), {len(lines)} trial(s)")
            return run_id
        except SQLAlchemyError as e:
            self.db.rollback()
            logger.error(f"Storing experiment run failed: {e}")
            raise ExperimentServiceError(f"Database error: {str(e)}")
