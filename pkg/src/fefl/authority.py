"""Key authority: cryptosystem init, slot provisioning, and key-request filtering.

The authority owns the master keys, hands each participant its slot key
(with spare capacity so late joiners need no re-keying), and gates every
function-key request behind the inference-prevention filter: a requested
weight vector is served only if it averages at least `filter_threshold`
participants uniformly. Keys are derived for the 0/1 indicator of the
accepted slot set; the 1/c_nz division happens in plaintext after
decryption, which keeps decryption's discrete log small while enforcing
exactly the same uniformity and minimum-support rule.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .errors import ConfigError, KeyRequestRejected, ProtocolError
from .groups import GroupParams, group_setup
from .mife import (FunctionKey, MasterKeys, PublicKeyShare, mife_setup,
                   pk_distribute, sk_generate)

logger = logging.getLogger(__name__)

REASON_TOO_FEW = "too-few-nonzero"
REASON_NON_UNIFORM = "non-uniform"


def collusion_safe_threshold(participants: int) -> int:
    """Smallest threshold guaranteeing a non-colluding majority."""
    return participants // 2 + 1


@dataclass(frozen=True)
class WeightedVector:
    """Rational averaging weights over participant slots.

    Weights are numerators over one common denominator, so any vector an
    aggregator might request (including malformed ones) is representable
    exactly. slot_ids[k] is the slot numerators[k] refers to.
    """

    numerators: Tuple[int, ...]
    denominator: int
    slot_ids: Tuple[int, ...]

    def __post_init__(self):
        if self.denominator < 1:
            raise ConfigError("weight denominator must be positive")
        if len(self.numerators) != len(self.slot_ids):
            raise ConfigError("numerators and slot_ids must align")
        if len(set(self.slot_ids)) != len(self.slot_ids):
            raise ConfigError("duplicate slot in weighted vector")

    @classmethod
    def uniform(cls, responders: Iterable[int],
                all_slots: Iterable[int]) -> "WeightedVector":
        """1/|responders| on each responder slot, zero elsewhere."""
        responders = set(responders)
        slots = tuple(sorted(set(all_slots) | responders))
        count = max(len(responders), 1)
        return cls(numerators=tuple(1 if s in responders else 0 for s in slots),
                   denominator=count, slot_ids=slots)

    def nonzero_slots(self) -> Tuple[int, ...]:
        return tuple(s for s, n in zip(self.slot_ids, self.numerators) if n != 0)

    def weight(self, k: int) -> Fraction:
        return Fraction(self.numerators[k], self.denominator)


@dataclass(frozen=True)
class FilterDecision:
    accepted: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.accepted


def inference_prevention_filter(w: WeightedVector, t: int) -> FilterDecision:
    """Accept w iff it has >= t nonzero weights, all equal to 1/c_nz.

    The two checks run in order: support size first, then uniformity, so a
    vector failing both reports the support-size reason. This blocks keys
    that would single out or isolate individual participants' updates.
    """
    nonzero = [k for k, n in enumerate(w.numerators) if n != 0]
    c_nz = len(nonzero)
    if c_nz < t:
        return FilterDecision(False, REASON_TOO_FEW)
    share = Fraction(1, c_nz)
    for k in nonzero:
        if w.weight(k) != share:
            return FilterDecision(False, REASON_NON_UNIFORM)
    return FilterDecision(True)


@dataclass
class KeyRegistry:
    """Authority state: master keys plus the id -> slot assignment map."""

    master: MasterKeys
    capacity: int
    filter_threshold: int
    assignments: Dict[str, int] = field(default_factory=dict)

    def register(self, participant_id: str) -> PublicKeyShare:
        """Assign (or look up) the participant's slot and return its key.

        Idempotent per id; joining after training has started changes
        nothing for already-registered participants.
        """
        return pk_distribute(self.master, participant_id, self.assignments)

    def request_function_key(self, w: WeightedVector) -> FunctionKey:
        """Run the filter, then derive a key for the 0/1 slot indicator.

        Raises KeyRequestRejected with the filter's reason, or ProtocolError
        if the vector names a slot that was never assigned.
        """
        decision = inference_prevention_filter(w, self.filter_threshold)
        if not decision:
            raise KeyRequestRejected(decision.reason)
        assigned = len(self.assignments)
        for slot in w.slot_ids:
            if not 0 <= slot < assigned:
                raise ProtocolError(f"weighted vector names unassigned slot {slot}")
        indicator = [0] * assigned
        for slot in w.nonzero_slots():
            indicator[slot] = 1
        return sk_generate(self.master, indicator)


def tpa_init(security_bits: int, capacity: int, threshold: int,
             expected_participants: Optional[int] = None,
             seed: Optional[int] = None,
             group: Optional[GroupParams] = None,
             rng=None) -> KeyRegistry:
    """Create group context and master keys; no slots are assigned yet.

    `capacity` should leave generous headroom over the expected participant
    count so join events never exhaust slots. When `expected_participants`
    is given, a threshold below the non-colluding majority bound is allowed
    but logged, since it weakens the collusion guarantee.
    """
    if threshold < 1:
        raise ConfigError("filter threshold must be at least 1")
    if capacity < 1:
        raise ConfigError("capacity must be at least 1")
    if expected_participants is not None:
        if capacity < expected_participants:
            raise ConfigError("capacity below expected participant count")
        bound = collusion_safe_threshold(expected_participants)
        if threshold < bound:
            logger.warning(
                "threshold %d below non-colluding majority bound %d for %d "
                "expected participants", threshold, bound, expected_participants)
    if group is None:
        group = group_setup(security_bits, seed=seed)
    if rng is None and seed is not None:
        import random
        rng = random.Random(seed + 0x5eed)
    master = mife_setup(group, capacity, rng=rng)
    return KeyRegistry(master=master, capacity=capacity, filter_threshold=threshold)
