"""Campaign metrics: escape/detection/survival/modification rates, the
classifier scores, and the stratified fold splitter.

Rate definitions: DR is the fraction of samples the aggregated scan
detected, ER = 1 - DR, SR the fraction of outputs whose behaviour matches
their original, MR the total transformed size over the total original
size.  Classifier scores follow the usual confusion-matrix formulas with
undefined ratios reported as absent rather than zero.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from ..errors import ScriptMorphError
from ..minilang import MiniLangError, compile_ast, interpret, parse, trace_equal
from ..seeding import derive_seed
from .scanning import ScanOutcome, detector_majority


class MetricsError(ScriptMorphError):
    pass


@dataclass(frozen=True)
class SurvivalResult:
    survived: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.survived


def survival_check(original: str, transformed: str, step_limit: int = 100_000) -> SurvivalResult:
    """Behaviour preservation: both sources parse and their execution
    traces agree on output and calls.  Any failure maps to False with the
    reason recorded."""
    try:
        base = interpret(compile_ast(parse(original)), step_limit)
    except MiniLangError as exc:
        return SurvivalResult(False, f"original-parse-failure: {exc}")
    try:
        morphed = interpret(compile_ast(parse(transformed)), step_limit)
    except MiniLangError as exc:
        return SurvivalResult(False, f"parse-failure: {exc}")
    if trace_equal(base, morphed):
        return SurvivalResult(True)
    return SurvivalResult(False, "behavior-divergence")


@dataclass
class MetricsReport:
    total: int
    detected: int
    survived: int
    dr: float
    er: float
    sr: float
    mr: float
    per_detector: dict[str, dict]

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "detected": self.detected,
            "survived": self.survived,
            "DR": self.dr,
            "ER": self.er,
            "SR": self.sr,
            "MR": self.mr,
            "per_detector": self.per_detector,
        }


def compute_metrics(
    outcomes: Sequence[ScanOutcome],
    survivals: Sequence[SurvivalResult],
    sizes: Sequence[tuple[int, int]],
) -> MetricsReport:
    """Roll scan outcomes, survival checks and size pairs into one report.

    ``sizes`` holds (original_size, transformed_size) per sample, aligned
    with the other two sequences.
    """
    total = len(outcomes)
    if total == 0:
        raise MetricsError("empty sample set")
    if len(survivals) != total or len(sizes) != total:
        raise MetricsError("outcomes, survivals and sizes must align")
    detected = sum(1 for o in outcomes if o.detected)
    survived = sum(1 for s in survivals if s.survived)
    original_total = sum(orig for orig, _ in sizes)
    transformed_total = sum(trans for _, trans in sizes)
    if original_total <= 0:
        raise MetricsError("original sizes sum to zero")
    dr = detected / total
    detector_ids: list[str] = []
    for outcome in outcomes:
        for verdicts in outcome.rounds:
            for v in verdicts:
                if v.detector_id not in detector_ids:
                    detector_ids.append(v.detector_id)
    per_detector = {}
    for det_id in detector_ids:
        det_hits = sum(
            1 for o in outcomes if detector_majority(o, det_id) == "malicious"
        )
        det_dr = det_hits / total
        per_detector[det_id] = {"detected": det_hits, "DR": det_dr, "ER": 1.0 - det_dr}
    return MetricsReport(
        total=total,
        detected=detected,
        survived=survived,
        dr=dr,
        er=1.0 - dr,
        sr=survived / total,
        mr=transformed_total / original_total,
        per_detector=per_detector,
    )


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise MetricsError("confusion-matrix counts must be non-negative")


@dataclass(frozen=True)
class ClassifierScores:
    acc: float
    pre: Optional[float]
    rec: Optional[float]
    f1: Optional[float]


def classifier_metrics(cm: ConfusionMatrix) -> ClassifierScores:
    """Acc, Pre, Rec, F1; a score whose denominator vanishes is absent."""
    total = cm.tp + cm.fp + cm.tn + cm.fn
    if total == 0:
        raise MetricsError("confusion matrix is all zero")
    acc = (cm.tp + cm.tn) / total
    pre = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp > 0 else None
    rec = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn > 0 else None
    if pre is None or rec is None or pre + rec == 0:
        f1 = None
    else:
        f1 = (2 * pre * rec) / (pre + rec)
    return ClassifierScores(acc=acc, pre=pre, rec=rec, f1=f1)


def stratified_split(
    labels: Mapping[str, str], k: int, seed: int = 0
) -> dict[str, int]:
    """Assign samples to k folds so per-class counts differ by at most one.

    Deterministic for a fixed seed; every class must have at least k
    members.
    """
    if k < 2:
        raise MetricsError("k must be >= 2")
    by_class: dict[str, list[str]] = {}
    for sample_id, label in labels.items():
        by_class.setdefault(label, []).append(sample_id)
    assignment: dict[str, int] = {}
    for label in sorted(by_class):
        members = sorted(by_class[label])
        if len(members) < k:
            raise MetricsError(
                f"class {label!r} has {len(members)} members, fewer than k={k}"
            )
        rng = random.Random(derive_seed(seed, "stratified-split", label))
        rng.shuffle(members)
        offset = rng.randrange(k)
        for i, sample_id in enumerate(members):
            assignment[sample_id] = (i + offset) % k
    return assignment


def format_metrics_table(rows: Mapping[str, MetricsReport]) -> str:
    """Aligned text table: one row per labelled report, per-detector ER
    columns first, then SR and MR."""
    if not rows:
        raise MetricsError("nothing to tabulate")
    detector_ids: list[str] = []
    for report in rows.values():
        for det_id in report.per_detector:
            if det_id not in detector_ids:
                detector_ids.append(det_id)
    headers = ["run"] + [f"ER:{d}" for d in detector_ids] + ["ER", "SR", "MR"]
    table = [headers]
    for label, report in rows.items():
        row = [label]
        for det_id in detector_ids:
            cell = report.per_detector.get(det_id)
            row.append(f"{cell['ER']:.4f}" if cell else "-")
        row += [f"{report.er:.4f}", f"{report.sr:.4f}", f"{report.mr:.4f}"]
        table.append(row)
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    lines = []
    for row in table:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines)
