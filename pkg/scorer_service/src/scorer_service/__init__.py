"""Title-pair scoring service: fine-tuning, inference and HTTP serving."""

from .data import DataFormat, TitlePair, load_pairs
from .evaluate import compute_metrics, evaluate_artifact
from .model import PairScorer, ScorerConfig
from .train import TrainingFloor, fine_tune

__version__ = "0.1.0"

__all__ = [
    "DataFormat",
    "PairScorer",
    "ScorerConfig",
    "TitlePair",
    "TrainingFloor",
    "compute_metrics",
    "evaluate_artifact",
    "fine_tune",
    "load_pairs",
]
