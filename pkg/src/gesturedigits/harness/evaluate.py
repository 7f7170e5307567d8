"""Deterministic evaluation with a confusion matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolation
from ..models.network import Network
from ..nn import ops
from .config import EvalConfig


@dataclass(frozen=True)
class EvalResult:
    accuracy: float
    mean_loss: float
    confusion: np.ndarray  # confusion[i][j] counts true i predicted j
    evaluated: int


def evaluate(net: Network, examples, eval_cfg: EvalConfig = EvalConfig()) -> EvalResult:
    """Iterate min(max_steps, len(examples)) classifier examples in order."""
    if not examples:
        raise ContractViolation("evaluate: no examples")
    num_classes = net.output_shape[0]
    confusion = np.zeros((num_classes, num_classes), dtype=np.int64)
    total_loss = 0.0
    correct = 0
    limit = min(eval_cfg.max_steps, len(examples))
    for x, target in examples[:limit]:
        probs = net.forward(x)
        predicted = int(np.argmax(probs))
        total_loss += ops.cross_entropy(probs, target)
        confusion[target, predicted] += 1
        correct += predicted == target
    return EvalResult(
        accuracy=correct / limit,
        mean_loss=total_loss / limit,
        confusion=confusion,
        evaluated=limit,
    )
