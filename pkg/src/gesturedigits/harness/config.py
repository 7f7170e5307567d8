"""Training and evaluation configuration.

The defaults here (optimizer step size, batch size, epoch count) are this
artifact's own choices; nothing upstream prescribes them.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ContractViolation

MODES = ("classifier", "detector", "finetune")

CLASSIFIER_INPUT_SIDE = 32
DETECTOR_INPUT_SIDE = 96


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 60
    batch_size: int = 16
    learning_rate: float = 0.05
    weight_decay: float = 1e-4
    seed: int = 42
    checkpoint_every: int = 0  # steps; 0 disables periodic checkpoints
    mode: str = "classifier"

    def __post_init__(self):
        if self.epochs < 1:
            raise ContractViolation(f"TrainConfig: epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ContractViolation(f"TrainConfig: batch_size must be >= 1, got {self.batch_size}")
        # learning_rate 0 is allowed as an explicit "measure but do not move" run
        if self.learning_rate < 0:
            raise ContractViolation(
                f"TrainConfig: learning_rate must be >= 0, got {self.learning_rate}")
        if self.weight_decay < 0:
            raise ContractViolation(
                f"TrainConfig: weight_decay must be >= 0, got {self.weight_decay}")
        if self.mode not in MODES:
            raise ContractViolation(f"TrainConfig: mode must be one of {MODES}, got {self.mode!r}")
        if self.checkpoint_every < 0:
            raise ContractViolation(
                f"TrainConfig: checkpoint_every must be >= 0, got {self.checkpoint_every}")
        if self.seed < 0:
            raise ContractViolation(f"TrainConfig: seed must be >= 0, got {self.seed}")


@dataclass(frozen=True)
class EvalConfig:
    max_steps: int = 10000
    compute_confusion: bool = True

    def __post_init__(self):
        if self.max_steps < 1:
            raise ContractViolation(f"EvalConfig: max_steps must be >= 1, got {self.max_steps}")
