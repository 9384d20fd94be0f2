"""Evaluation harness: detectors, aggregated scanning, campaign metrics."""

from .detectors import (
    BENIGN,
    MALICIOUS,
    Detector,
    DetectorConfigError,
    DetectorVerdict,
    SignatureDetector,
    SignatureRule,
    load_rules,
    signature_bank,
    signature_detector,
)
from .metrics import (
    ClassifierScores,
    ConfusionMatrix,
    MetricsError,
    MetricsReport,
    SurvivalResult,
    classifier_metrics,
    compute_metrics,
    format_metrics_table,
    stratified_split,
    survival_check,
)
from .scanning import ScanOutcome, ScanPolicy, ScanPolicyError, detector_majority, scan

__all__ = [
    "BENIGN",
    "MALICIOUS",
    "ClassifierScores",
    "ConfusionMatrix",
    "Detector",
    "DetectorConfigError",
    "DetectorVerdict",
    "MetricsError",
    "MetricsReport",
    "ScanOutcome",
    "ScanPolicy",
    "ScanPolicyError",
    "SignatureDetector",
    "SignatureRule",
    "SurvivalResult",
    "classifier_metrics",
    "compute_metrics",
    "detector_majority",
    "format_metrics_table",
    "load_rules",
    "scan",
    "signature_bank",
    "signature_detector",
    "stratified_split",
    "survival_check",
]
