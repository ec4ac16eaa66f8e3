"""In-process CSIDH key generation and key exchange."""

import logging
import random
from typing import Any, Dict, List, Optional

from src.models.records import ExchangeTranscript, KeyRecord
from src.services.classgroup import ClassGroupError, class_number_bsgs
from src.services.isogeny import (
    CsidhParams, IsogenyError, csidh_exponent_bound, keygen, shared_secret,
)

logger = logging.getLogger(__name__)


class ExchangeService:
    """Key generation and two-party exchange, deterministic under a seed."""

    def __init__(self, params: CsidhParams, seed: Optional[int] = None):
        self.params = params
        self.seed = seed
        self.rng = random.Random(seed)

    def exponent_bound(self, m: Optional[int] = None) -> int:
        """m given, or the smallest m with (2m + 1)^u >= h(-4p)."""
        if m is not None:
            return m
        h = class_number_bsgs(self.params.discriminant, self.rng)
        bound = csidh_exponent_bound(len(self.params.ells), h)
        logger.info(f"h({self.params.discriminant}) = {h}, exponent bound m = {bound}")
        return bound

    def generate_keys(self, count: int = 1, m: Optional[int] = None) -> Dict[str, Any]:
        try:
            m = self.exponent_bound(m)
            records: List[KeyRecord] = []
            for index in range(count):
                sk, pk = keygen(self.params, m, self.rng)
                records.append(KeyRecord(p=self.params.p, ells=list(self.params.ells), seed=self.seed,
                                         index=index, m=m, secret=list(sk.exponents), public_A=pk.A))
            return {'success': True, 'records': records, 'error': None}
        except (IsogenyError, ClassGroupError) as e:
            logger.error(f"Key generation failed: {e}")
            return {'success': False, 'records': [], 'error': str(e)}

    def exchange(self, count: int = 1, m: Optional[int] = None) -> Dict[str, Any]:
        """Run `count` exchanges; success only if every pair agrees."""
        try:
            m = self.exponent_bound(m)
            transcripts: List[ExchangeTranscript] = []
            for index in range(count):
                alice_sk, alice_pk = keygen(self.params, m, self.rng)
                bob_sk, bob_pk = keygen(self.params, m, self.rng)
                alice_shared = shared_secret(self.params, alice_sk, bob_pk, self.rng)
                bob_shared = shared_secret(self.params, bob_sk, alice_pk, self.rng)
                transcript = ExchangeTranscript(
                    p=self.params.p, ells=list(self.params.ells), seed=self.seed, index=index, m=m,
                    alice_secret=list(alice_sk.exponents), alice_public=alice_pk.A,
                    bob_secret=list(bob_sk.exponents), bob_public=bob_pk.A,
                    alice_shared=alice_shared, bob_shared=bob_shared,
                    agreed=alice_shared == bob_shared,
                )
                if not transcript.agreed:
                    logger.error(f"Exchange {index}: shared secrets differ "
                                 f"({alice_shared} != {bob_shared})")
                transcripts.append(transcript)
            agreed = sum(t.agreed for t in transcripts)
            logger.info(f"{agreed}/{count} exchanges agreed at p={self.params.p}")
            return {
                'success': agreed == count,
                'transcripts': transcripts,
                'error': None if agreed == count else f"{count - agreed} exchange(s) disagreed",
            }
        except (IsogenyError, ClassGroupError) as e:
            logger.error(f"Key exchange failed: {e}")
            return {'success': False, 'transcripts': [], 'error': str(e)}
