"""The training loop.

Determinism contract: the shuffle stream for epoch e is Philox keyed by
SeedSequence([seed, e]), so the random state is a pure function of
(seed, epoch) and never of training history.  That is what makes
checkpoint-resume bit-exact: resuming at an epoch boundary replays the
same per-epoch streams an uninterrupted run would have used.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..dataset.labelmap import LabelMap
from ..dataset.manifest import DatasetManifest
from ..errors import ContractViolation
from ..models.checkpoint import load_checkpoint, save_checkpoint
from ..models.detector import DetectorConfig, detector_loss, detector_loss_grad
from ..models.network import Network
from ..nn import ops
from .config import TrainConfig
from .data import load_classifier_examples, load_detector_examples
from .metrics import EpochMetrics, MetricsLog


def epoch_rng(seed: int, epoch: int) -> np.random.Generator:
    """The documented per-epoch stream: Philox4x64 keyed by SeedSequence([seed, epoch])."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, epoch])))


def _classifier_pass(net: Network, x: np.ndarray, target: int):
    logits, cache = net.forward_collect(x)
    probs = ops.softmax(logits)
    loss = ops.cross_entropy(probs, target)
    correct = int(np.argmax(probs)) == target
    grads = net.backward(cache, ops.softmax_cross_entropy_grad(probs, target))
    return loss, correct, grads


def _detector_pass(net: Network, x: np.ndarray, target_grid: np.ndarray,
                   dcfg: DetectorConfig):
    flat, cache = net.forward_collect(x)
    pred = flat.reshape(dcfg.grid_shape())
    loss = detector_loss(pred, target_grid, dcfg).total
    d_pred = detector_loss_grad(pred, target_grid, dcfg)
    grads = net.backward(cache, d_pred.reshape(-1))
    # "accuracy": class argmax agrees with the target at every responsible cell
    responsible = target_grid[..., 4] == 1.0
    pred_cls = np.argmax(pred[..., dcfg.boxes_per_cell * 5:], axis=-1)
    true_cls = np.argmax(target_grid[..., dcfg.boxes_per_cell * 5:], axis=-1)
    correct = bool(np.all(pred_cls[responsible] == true_cls[responsible]))
    return loss, correct, grads


def _eval_split(net: Network, examples, mode: str, dcfg: DetectorConfig | None):
    total_loss = 0.0
    total_correct = 0
    for x, target in examples:
        if mode == "detector":
            flat = net.forward_logits(x)
            pred = flat.reshape(dcfg.grid_shape())
            total_loss += detector_loss(pred, target, dcfg).total
            responsible = target[..., 4] == 1.0
            pred_cls = np.argmax(pred[..., dcfg.boxes_per_cell * 5:], axis=-1)
            true_cls = np.argmax(target[..., dcfg.boxes_per_cell * 5:], axis=-1)
            total_correct += bool(np.all(pred_cls[responsible] == true_cls[responsible]))
        else:
            probs = net.forward(x)
            total_loss += ops.cross_entropy(probs, target)
            total_correct += int(np.argmax(probs)) == target
    n = max(len(examples), 1)
    return total_loss / n, total_correct / n


def steps_per_epoch(n_train: int, batch_size: int) -> int:
    return math.ceil(n_train / batch_size)


def train(net: Network, manifest: DatasetManifest, cfg: TrainConfig,
          label_map: LabelMap | None = None,
          detector_cfg: DetectorConfig | None = None,
          start_epoch: int = 0,
          checkpoint_dir=None) -> tuple[Network, MetricsLog]:
    """Train in place; returns the network and the per-epoch metrics log.

    Identical (net initialization, manifest, cfg) inputs produce
    bit-identical parameters and logs.
    """
    train_items = manifest.train_items()
    val_items = manifest.val_items()
    if not train_items:
        raise ContractViolation("train: manifest has an empty train split")

    if cfg.mode == "detector":
        if detector_cfg is None:
            raise ContractViolation("train: detector mode needs a DetectorConfig")
        train_examples = load_detector_examples(train_items, detector_cfg)
        val_examples = load_detector_examples(val_items, detector_cfg)
    else:
        if label_map is None:
            raise ContractViolation("train: classifier mode needs a label map")
        train_examples = load_classifier_examples(train_items, label_map)
        val_examples = load_classifier_examples(val_items, label_map)

    n_train = len(train_examples)
    per_epoch = steps_per_epoch(n_train, cfg.batch_size)
    step = start_epoch * per_epoch
    frozen = net.frozen_names()
    log = MetricsLog()

    for epoch in range(start_epoch, cfg.epochs):
        order = epoch_rng(cfg.seed, epoch).permutation(n_train)
        epoch_loss = 0.0
        epoch_correct = 0
        for batch_start in range(0, n_train, cfg.batch_size):
            batch = order[batch_start:batch_start + cfg.batch_size]
            grad_sum: dict[str, np.ndarray] = {}
            for idx in batch:
                x, target = train_examples[idx]
                if cfg.mode == "detector":
                    loss, correct, grads = _detector_pass(net, x, target, detector_cfg)
                else:
                    loss, correct, grads = _classifier_pass(net, x, target)
                epoch_loss += loss
                epoch_correct += correct
                for name, g in grads.items():
                    if name in grad_sum:
                        grad_sum[name] += g
                    else:
                        grad_sum[name] = g.copy()
            if cfg.learning_rate > 0.0:
                mean_grads = {k: v / len(batch) for k, v in grad_sum.items()}
                updated = ops.sgd_step(net.params(), mean_grads, cfg.learning_rate,
                                       cfg.weight_decay, frozen=frozen)
                net.assign_params(updated)
            step += 1
            if (checkpoint_dir is not None and cfg.checkpoint_every
                    and step % cfg.checkpoint_every == 0):
                save_checkpoint(net, step, Path(checkpoint_dir) / f"step_{step:08d}.ckpt")

        val_loss, val_acc = _eval_split(net, val_examples, cfg.mode, detector_cfg)
        log.append(EpochMetrics(
            epoch=epoch + 1,
            train_loss=epoch_loss / n_train,
            val_loss=val_loss,
            train_acc=epoch_correct / n_train,
            val_acc=val_acc,
        ))
        if checkpoint_dir is not None:
            save_checkpoint(net, step, Path(checkpoint_dir) / "latest.ckpt")
    return net, log


def resume_training(checkpoint_path, manifest: DatasetManifest, cfg: TrainConfig,
                    label_map: LabelMap | None = None,
                    detector_cfg: DetectorConfig | None = None,
                    checkpoint_dir=None) -> tuple[Network, MetricsLog]:
    """Continue a run from an epoch-boundary checkpoint, bit-exactly."""
    net, step = load_checkpoint(checkpoint_path)
    n_train = len(manifest.train_items())
    per_epoch = steps_per_epoch(n_train, cfg.batch_size)
    if per_epoch == 0 or step % per_epoch != 0:
        raise ContractViolation(
            f"resume_training: step {step} is not an epoch boundary "
            f"({per_epoch} steps per epoch)")
    return train(net, manifest, cfg, label_map=label_map, detector_cfg=detector_cfg,
                 start_epoch=step // per_epoch, checkpoint_dir=checkpoint_dir)
