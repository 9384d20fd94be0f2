"""Multi-engine scanning with threshold aggregation and repeated rounds.

One scan runs every detector R times (R odd).  Within a round the weighted
count of malicious verdicts meets the aggregation threshold or the round
labels benign; the final label is the majority across rounds, which
removes one-off verdict flips from unstable engines.  Detector errors
count as benign for that round but stay flagged in the outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ScriptMorphError
from .detectors import BENIGN, ERROR, MALICIOUS, Detector, DetectorVerdict


class ScanPolicyError(ScriptMorphError):
    pass


@dataclass(frozen=True)
class ScanPolicy:
    threshold: int = 1
    rounds: int = 3

    def __post_init__(self):
        if self.threshold < 1:
            raise ScanPolicyError("aggregation threshold must be >= 1")
        if self.rounds < 1 or self.rounds % 2 == 0:
            raise ScanPolicyError("rounds must be a positive odd number")


@dataclass
class ScanOutcome:
    sample_id: str
    rounds: list[list[DetectorVerdict]]
    weighted_positives: list[int]
    round_labels: list[str]
    consensus: str
    error_flags: list[str] = field(default_factory=list)

    @property
    def detected(self) -> bool:
        return self.consensus == MALICIOUS


def scan(
    sample_id: str,
    text: str,
    detectors: list[Detector],
    policy: ScanPolicy,
) -> ScanOutcome:
    if not detectors:
        raise ScanPolicyError("at least one detector is required")
    rounds: list[list[DetectorVerdict]] = []
    weighted: list[int] = []
    labels: list[str] = []
    errors: list[str] = []
    for round_no in range(policy.rounds):
        verdicts = []
        positive = 0
        for det in detectors:
            try:
                answer = det.scan(text)
            except Exception as exc:  # detector failure: benign + flag
                errors.append(f"round {round_no}: {det.detector_id}: {exc}")
                verdicts.append(
                    DetectorVerdict(det.detector_id, ERROR, weight=det.weight)
                )
                continue
            if answer not in (MALICIOUS, BENIGN):
                errors.append(
                    f"round {round_no}: {det.detector_id}: bad verdict {answer!r}"
                )
                verdicts.append(
                    DetectorVerdict(det.detector_id, ERROR, weight=det.weight)
                )
                continue
            verdicts.append(DetectorVerdict(det.detector_id, answer, weight=det.weight))
            if answer == MALICIOUS:
                positive += det.weight
        rounds.append(verdicts)
        weighted.append(positive)
        labels.append(MALICIOUS if positive >= policy.threshold else BENIGN)
    malicious_rounds = sum(1 for lab in labels if lab == MALICIOUS)
    consensus = MALICIOUS if malicious_rounds * 2 > policy.rounds else BENIGN
    return ScanOutcome(
        sample_id=sample_id,
        rounds=rounds,
        weighted_positives=weighted,
        round_labels=labels,
        consensus=consensus,
        error_flags=errors,
    )


def detector_majority(outcome: ScanOutcome, detector_id: str) -> str:
    """A single engine's own across-rounds majority verdict."""
    votes = 0
    total = 0
    for verdicts in outcome.rounds:
        for v in verdicts:
            if v.detector_id == detector_id:
                total += 1
                if v.verdict == MALICIOUS:
                    votes += 1
    if total == 0:
        return BENIGN
    return MALICIOUS if votes * 2 > total else BENIGN
