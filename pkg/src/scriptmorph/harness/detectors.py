"""Detector interface and the local signature engine.

A detector inspects script text and answers malicious/benign.  Detectors
may be nondeterministic or fail outright; the scanner treats a raised error
as a benign verdict with a flag.  ``weight`` is the redundant-vote
multiplier: a detector with weight w counts w times toward the label
aggregation threshold.
"""

from __future__ import annotations

import json
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

from ..errors import ScriptMorphError

MALICIOUS = "malicious"
BENIGN = "benign"
ERROR = "error"


class DetectorConfigError(ScriptMorphError):
    pass


@dataclass(frozen=True)
class DetectorVerdict:
    detector_id: str
    verdict: str  # malicious | benign | error
    weight: int = 1

    def __post_init__(self):
        if self.weight < 1:
            raise DetectorConfigError("verdict weight must be >= 1")
        if self.verdict not in (MALICIOUS, BENIGN, ERROR):
            raise DetectorConfigError(f"unknown verdict {self.verdict!r}")


class Detector(ABC):
    detector_id: str
    weight: int = 1

    @abstractmethod
    def scan(self, text: str) -> str:
        """Return MALICIOUS or BENIGN; may raise on internal failure."""


@dataclass(frozen=True)
class SignatureRule:
    name: str
    pattern: re.Pattern
    weight: int = 1


def load_rules(rules_path: Path) -> list[SignatureRule]:
    """Rules file: JSON array of {name, pattern, weight}.

    Invalid regular expressions are rejected at load time, by rule name.
    """
    with open(rules_path, encoding="utf-8") as fh:
        docs = json.load(fh)
    if not isinstance(docs, list):
        raise DetectorConfigError("rules file must hold a JSON array")
    rules = []
    for doc in docs:
        name = doc.get("name", "<unnamed>")
        try:
            pattern = re.compile(doc["pattern"], re.MULTILINE)
        except re.error as exc:
            raise DetectorConfigError(
                f"rule {name!r} has an invalid pattern: {exc}"
            ) from exc
        except KeyError:
            raise DetectorConfigError(f"rule {name!r} has no pattern") from None
        rules.append(SignatureRule(name=name, pattern=pattern, weight=int(doc.get("weight", 1))))
    return rules


class SignatureDetector(Detector):
    """Flags a sample when any rule's pattern matches its text."""

    def __init__(self, rules: list[SignatureRule], detector_id: str = "signature", weight: int = 1):
        self.rules = list(rules)
        self.detector_id = detector_id
        self.weight = weight

    @classmethod
    def from_file(cls, rules_path: Path, detector_id: str = "signature", weight: int = 1):
        return cls(load_rules(rules_path), detector_id=detector_id, weight=weight)

    def scan(self, text: str) -> str:
        for rule in self.rules:
            if rule.pattern.search(text):
                return MALICIOUS
        return BENIGN

    def matching_rules(self, text: str) -> list[str]:
        return [rule.name for rule in self.rules if rule.pattern.search(text)]


def signature_detector(rules_path: Path) -> SignatureDetector:
    """The any-rule-matches engine over one rules file."""
    return SignatureDetector.from_file(rules_path)


def signature_bank(rules_path: Path) -> list[SignatureDetector]:
    """One single-rule engine per rule, weighted per the rule's weight.

    This is how a rules file stands in for a whole cluster of engines in
    threshold-aggregation scans.
    """
    return [
        SignatureDetector([rule], detector_id=f"sig:{rule.name}", weight=rule.weight)
        for rule in load_rules(rules_path)
    ]
