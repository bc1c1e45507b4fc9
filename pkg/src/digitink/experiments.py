"""Ablation runner, early-recognition curve and the error gallery."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .checkpoint import Checkpoint
from .dataset import Dataset, split
from .models import build_model, count_parameters
from .strokes import completion_prefix
from .training import (
    TrainConfig,
    TrainResult,
    evaluate,
    predict_batched,
    preprocessor_for,
    train,
)

INPUT_MODES = ("angle", "distance", "both")


@dataclass
class AblationResult:
    rows: dict[str, dict]  # mode -> {accuracy, parameters, best_epoch}
    results: dict[str, TrainResult]

    def format_table(self) -> str:
        lines = [f"{'input':<10} {'accuracy':>9} {'parameters':>11} {'best epoch':>11}"]
        for mode in INPUT_MODES:
            row = self.rows[mode]
            lines.append(
                f"{mode:<10} {row['accuracy']:>9.4f} {row['parameters']:>11,} {row['best_epoch']:>11}"
            )
        return "\n".join(lines)


def ablation_run(config: TrainConfig, dataset: Dataset, *, log=None) -> AblationResult:
    """Train the 1D model three times, identical seeds and splits, varying
    only which polar channels it reads."""
    rows = {}
    results = {}
    for mode in INPUT_MODES:
        cfg = replace(config, model="polar1d", input_mode=mode)
        result = train(cfg, dataset, log=log)
        metrics = evaluate(result.checkpoint, dataset, "test")
        rows[mode] = {
            "accuracy": metrics.accuracy,
            "parameters": count_parameters(build_model("polar1d", mode)),
            "best_epoch": result.best_epoch,
        }
        results[mode] = result
    return AblationResult(rows=rows, results=results)


@dataclass
class CompletionCurve:
    points: list[tuple[float, float]]  # (fraction, accuracy), sorted

    def accuracies(self) -> list[float]:
        return [a for _, a in self.points]

    def fractions(self) -> list[float]:
        return [f for f, _ in self.points]


def spearman_rho(x, y) -> float:
    """Spearman rank correlation with average ranks on ties."""

    def ranks(v):
        v = np.asarray(v, dtype=np.float64)
        order = np.argsort(v, kind="stable")
        r = np.empty(len(v))
        i = 0
        while i < len(v):
            j = i
            while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
                j += 1
            r[order[i : j + 1]] = (i + j) / 2.0 + 1.0
            i = j + 1
        return r

    rx, ry = ranks(x), ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = np.sqrt((rx**2).sum() * (ry**2).sum())
    return float((rx * ry).sum() / denom) if denom else 0.0


def completion_curve(
    ckpt: Checkpoint,
    dataset: Dataset,
    fractions,
    bucket: str = "test",
    split_seed: Optional[int] = None,
) -> CompletionCurve:
    """Accuracy after truncating every test glyph to each arclength
    fraction and re-running the full preprocessing chain.

    Fraction 1.0 shares the code path with evaluate(), so its accuracy
    matches exactly.  Prefixes that degenerate below the preprocessing
    minimum (e.g. one touch point for the polar model) become all-zero
    inputs rather than errors.
    """
    fractions = sorted(float(f) for f in fractions)
    if not fractions or fractions[-1] != 1.0:
        raise ValueError("fractions must be sorted and include 1.0")
    if split_seed is None:
        split_seed = int(ckpt.meta.get("split_seed", 0))
    assignment = split(dataset, split_seed)
    glyphs = assignment.glyphs(dataset, bucket)
    y = np.array([g.label for g in glyphs])
    network = ckpt.build_network()
    pre = preprocessor_for(ckpt)
    points = []
    for fraction in fractions:
        truncated = [completion_prefix(g, fraction) for g in glyphs]
        x = pre.batch(truncated, degenerate_ok=True)
        probs = predict_batched(network, x)
        points.append((fraction, float((probs.argmax(axis=1) == y).mean())))
    return CompletionCurve(points=points)


def save_curve_csv(path, curve: CompletionCurve) -> None:
    with open(path, "w") as fh:
        fh.write("fraction,accuracy\n")
        for fraction, accuracy in curve.points:
            fh.write(f"{fraction:.3f},{accuracy:.6f}\n")


def plot_curve(path, curve: CompletionCurve) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(curve.fractions(), curve.accuracies(), marker="o")
    ax.set_xlabel("stroke completion fraction")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0, 1.02)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


@dataclass
class GalleryEntry:
    glyph_id: str
    true_label: int
    predicted: int
    confidence: float  # probability assigned to the wrong predicted class


def error_gallery(
    ckpt: Checkpoint,
    dataset: Dataset,
    k: int,
    out_path=None,
    bucket: str = "test",
    split_seed: Optional[int] = None,
) -> list[GalleryEntry]:
    """The k most confidently wrong test predictions, optionally rendered
    as a bitmap grid PNG.  A perfect model yields an empty gallery."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if split_seed is None:
        split_seed = int(ckpt.meta.get("split_seed", 0))
    assignment = split(dataset, split_seed)
    glyphs = assignment.glyphs(dataset, bucket)
    y = np.array([g.label for g in glyphs])
    network = ckpt.build_network()
    pre = preprocessor_for(ckpt)
    probs = predict_batched(network, pre.batch(glyphs, degenerate_ok=True))
    pred = probs.argmax(axis=1)
    wrong = np.nonzero(pred != y)[0]
    order = wrong[np.argsort(-probs[wrong, pred[wrong]], kind="stable")][:k]
    entries = [
        GalleryEntry(
            glyph_id=glyphs[i].glyph_id or str(i),
            true_label=int(y[i]),
            predicted=int(pred[i]),
            confidence=float(probs[i, pred[i]]),
        )
        for i in order
    ]
    if out_path is not None:
        _render_gallery(out_path, [glyphs[i] for i in order], entries)
    return entries


def _render_gallery(path, glyphs, entries: list[GalleryEntry]) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .raster import rasterize

    count = len(entries)
    if count == 0:
        fig, ax = plt.subplots(figsize=(4, 1.5))
        ax.text(0.5, 0.5, "no misclassifications", ha="center", va="center")
        ax.axis("off")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        return
    cols = min(5, count)
    rows = (count + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(2.2 * cols, 2.5 * rows), squeeze=False)
    for ax in axes.ravel():
        ax.axis("off")
    for ax, glyph, entry in zip(axes.ravel(), glyphs, entries):
        ax.imshow(rasterize(glyph), cmap="gray_r", interpolation="nearest")
        ax.set_title(
            f"pred {entry.predicted} ({entry.confidence:.2f})\ntrue {entry.true_label}",
            fontsize=9,
        )
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
