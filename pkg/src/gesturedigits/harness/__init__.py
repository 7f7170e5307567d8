"""Training/evaluation loops, metrics export, inference pipelines."""

from .config import EvalConfig, TrainConfig
from .metrics import EpochMetrics, MetricsLog, export_curves, parse_metrics_csv
from .train import resume_training, train
from .evaluate import EvalResult, evaluate
from .infer import InferResult, infer
from .stream import StreamRecord, run_stream

__all__ = [
    "EvalConfig",
    "TrainConfig",
    "EpochMetrics",
    "MetricsLog",
    "export_curves",
    "parse_metrics_csv",
    "train",
    "resume_training",
    "EvalResult",
    "evaluate",
    "InferResult",
    "infer",
    "StreamRecord",
    "run_stream",
]
