"""Metrics over scored title pairs, mirroring the pipeline's evaluation."""

from __future__ import annotations

from typing import Sequence

from .data import load_pairs
from .model import PairScorer

THRESHOLD = 0.5  # strictly greater-than; a score of exactly 0.5 is False


def compute_metrics(probs: Sequence[float], labels: Sequence[bool]) -> dict:
    """Accuracy, positive-class F1 and the confusion counts at the 0.5 threshold."""
    if len(probs) != len(labels):
        raise ValueError(f"length mismatch: {len(probs)} vs {len(labels)}")
    if not probs:
        raise ValueError("nothing to evaluate")
    predicted = [p > THRESHOLD for p in probs]
    tp = sum(1 for p, g in zip(predicted, labels) if p and g)
    fp = sum(1 for p, g in zip(predicted, labels) if p and not g)
    fn = sum(1 for p, g in zip(predicted, labels) if not p and g)
    tn = sum(1 for p, g in zip(predicted, labels) if not p and not g)
    denom = 2 * tp + fp + fn
    return {
        "accuracy": (tp + tn) / len(probs),
        "f1": 1.0 if denom == 0 else 2 * tp / denom,
        "confusion": {"tp": tp, "fp": fp, "fn": fn, "tn": tn},
    }


def evaluate_artifact(artifact_dir, test_file) -> dict:
    """Score a pair file with a stored artifact and report the metrics."""
    scorer = PairScorer.load(artifact_dir)
    pairs = load_pairs(test_file)
    probs = scorer.score([(p.a, p.b) for p in pairs])
    metrics = compute_metrics(probs, [p.label for p in pairs])
    metrics["n"] = len(pairs)
    metrics["artifact_digest"] = scorer.digest
    return metrics
