"""Training loop with patience-based early stopping, plus evaluation.

Determinism contract: one seeded generator drives parameter init, batch
shuffling and dropout masks in a fixed order, so identical configs and
data produce bit-identical checkpoints.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .checkpoint import Checkpoint
from .dataset import Dataset, split
from .errors import TrainingDivergedError
from .features import Preprocessor, fit_normalization, Normalization
from .models import build_model
from .nn.network import Network, cross_entropy_from_probs
from .nn.optim import OptimizerState, SGDMomentum


@dataclass
class TrainConfig:
    """Defaults encode the published recipe: momentum 0.9, per-epoch decay
    0.95, early-stop patience 18.  The published learning rate (0.9) is a
    momentum-coefficient value, not a stable learning rate for these
    models; the base learning rate is therefore exposed as config."""

    model: str = "polar1d"
    input_mode: str = "both"
    base_learning_rate: float = 0.01
    momentum: float = 0.9
    decay_rate: float = 0.95
    batch_size: int = 64
    max_epochs: int = 120
    patience: int = 18
    seed: int = 0
    split_seed: int = 0
    nesterov: bool = False

    def __post_init__(self):
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_accuracy: float
    lr_eff: float


class EarlyStopper:
    """Strict-improvement patience: a strictly greater validation accuracy
    resets the counter; `patience` epochs without one stops training."""

    def __init__(self, patience: int):
        self.patience = patience
        self.best_accuracy = -np.inf
        self.best_epoch = 0

    def update(self, epoch: int, accuracy: float) -> bool:
        """Record an epoch; returns True if it improved the best."""
        if accuracy > self.best_accuracy:
            self.best_accuracy = accuracy
            self.best_epoch = epoch
            return True
        return False

    def should_stop(self, epoch: int) -> bool:
        return epoch - self.best_epoch >= self.patience


@dataclass
class Metrics:
    accuracy: float
    loss: float
    confusion: np.ndarray  # (10, 10) counts, rows = true label
    precision: list[float]
    recall: list[float]

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "loss": self.loss,
            "confusion": self.confusion.tolist(),
            "precision": self.precision,
            "recall": self.recall,
        }


def metrics_from_predictions(
    y_true: np.ndarray, y_pred: np.ndarray, loss: float = float("nan"), classes: int = 10
) -> Metrics:
    confusion = np.zeros((classes, classes), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        confusion[t, p] += 1
    correct = np.trace(confusion)
    total = confusion.sum()
    precision = []
    recall = []
    for c in range(classes):
        col = confusion[:, c].sum()
        row = confusion[c, :].sum()
        precision.append(float(confusion[c, c] / col) if col else 0.0)
        recall.append(float(confusion[c, c] / row) if row else 0.0)
    return Metrics(
        accuracy=float(correct / total) if total else 0.0,
        loss=loss,
        confusion=confusion,
        precision=precision,
        recall=recall,
    )


def predict_batched(network: Network, x: np.ndarray, batch_size: int = 256) -> np.ndarray:
    """Inference-mode probabilities, chunked to bound memory."""
    outputs = []
    for i in range(0, len(x), batch_size):
        outputs.append(network.forward(x[i : i + batch_size], train=False))
    return np.concatenate(outputs) if outputs else np.zeros((0, 10))


@dataclass
class TrainResult:
    checkpoint: Checkpoint
    history: list[EpochStats]
    best_epoch: int
    best_val_accuracy: float
    elapsed_seconds: float


def train(config: TrainConfig, dataset: Dataset, *, log=None) -> TrainResult:
    """Train per config; returns the best-validation checkpoint (not the
    last) and the per-epoch history."""
    t_start = time.perf_counter()
    log = log or (lambda msg: None)
    assignment = split(dataset, config.split_seed)
    train_glyphs = assignment.glyphs(dataset, "train")
    val_glyphs = assignment.glyphs(dataset, "validation")
    if not train_glyphs or not val_glyphs:
        raise ValueError(
            f"empty split bucket (train={len(train_glyphs)}, validation={len(val_glyphs)})"
        )

    model_spec = build_model(config.model, config.input_mode)
    norm = fit_normalization(train_glyphs)
    pre = Preprocessor(config.model, model_spec.input_mode, norm)
    x_train = pre.batch(train_glyphs, degenerate_ok=True)
    y_train = np.array([g.label for g in train_glyphs])
    x_val = pre.batch(val_glyphs, degenerate_ok=True)
    y_val = np.array([g.label for g in val_glyphs])
    log(
        f"training {config.model}[{model_spec.input_mode or '-'}] on "
        f"{len(y_train)} glyphs, validating on {len(y_val)}"
    )

    rng = np.random.default_rng(config.seed)
    network = model_spec.build(rng=rng)
    optimizer = SGDMomentum(
        network,
        OptimizerState(
            base_learning_rate=config.base_learning_rate,
            momentum=config.momentum,
            decay_rate=config.decay_rate,
            nesterov=config.nesterov,
        ),
    )
    stopper = EarlyStopper(config.patience)
    history: list[EpochStats] = []
    best_state = network.get_state()
    n = len(y_train)

    for epoch in range(1, config.max_epochs + 1):
        optimizer.set_epoch(epoch - 1)
        perm = rng.permutation(n)
        total_loss = 0.0
        for i in range(0, n, config.batch_size):
            idx = perm[i : i + config.batch_size]
            probs = network.forward(x_train[idx], train=True, rng=rng)
            loss = cross_entropy_from_probs(probs, y_train[idx])
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    f"non-finite training loss at epoch {epoch}, batch {i // config.batch_size}"
                )
            network.backward(y_train[idx])
            optimizer.step()
            total_loss += loss * len(idx)
        val_probs = predict_batched(network, x_val)
        val_accuracy = float((val_probs.argmax(axis=1) == y_val).mean())
        stats = EpochStats(
            epoch=epoch,
            train_loss=total_loss / n,
            val_accuracy=val_accuracy,
            lr_eff=optimizer.state.effective_lr(),
        )
        history.append(stats)
        improved = stopper.update(epoch, val_accuracy)
        if improved:
            best_state = network.get_state()
        log(
            f"epoch {epoch:3d}  loss {stats.train_loss:.4f}  "
            f"val_acc {val_accuracy:.4f}  lr {stats.lr_eff:.5f}"
            + ("  *" if improved else "")
        )
        if stopper.should_stop(epoch):
            log(f"early stop: no improvement for {config.patience} epochs")
            break

    network.set_state(best_state)
    meta = {
        "config": asdict(config),
        "best_epoch": stopper.best_epoch,
        "best_val_accuracy": stopper.best_accuracy,
        "epochs_run": len(history),
        "split_seed": config.split_seed,
    }
    ckpt = Checkpoint.from_network(
        network, model_spec, norm.to_dict(), train_seed=config.seed, meta=meta
    )
    return TrainResult(
        checkpoint=ckpt,
        history=history,
        best_epoch=stopper.best_epoch,
        best_val_accuracy=float(stopper.best_accuracy),
        elapsed_seconds=time.perf_counter() - t_start,
    )


def preprocessor_for(ckpt: Checkpoint) -> Preprocessor:
    return Preprocessor(
        ckpt.model.name,
        ckpt.model.input_mode,
        Normalization.from_dict(ckpt.normalization),
    )


def evaluate(
    ckpt: Checkpoint,
    dataset: Dataset,
    bucket: str = "test",
    split_seed: Optional[int] = None,
) -> Metrics:
    """Deterministic inference-mode metrics over one split bucket.  The
    split seed defaults to the one recorded in the checkpoint."""
    if split_seed is None:
        split_seed = int(ckpt.meta.get("split_seed", 0))
    assignment = split(dataset, split_seed)
    glyphs = assignment.glyphs(dataset, bucket)
    network = ckpt.build_network()
    pre = preprocessor_for(ckpt)
    x = pre.batch(glyphs, degenerate_ok=True)
    y = np.array([g.label for g in glyphs])
    probs = predict_batched(network, x)
    loss = cross_entropy_from_probs(probs, y)
    return metrics_from_predictions(y, probs.argmax(axis=1), loss)


def save_history_csv(path, history: list[EpochStats]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_accuracy", "lr_eff"])
        for row in history:
            writer.writerow([row.epoch, f"{row.train_loss:.6f}", f"{row.val_accuracy:.6f}", f"{row.lr_eff:.8f}"])


def save_metrics_json(path, metrics: Metrics) -> None:
    with open(path, "w") as fh:
        json.dump(metrics.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
