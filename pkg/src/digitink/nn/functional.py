"""Single-sample functional forms of the layer operations.

The training stack uses the batched Layer classes; these wrappers exist
for direct use and for pinning the per-operation contracts in tests.
Images are (H, W, Cin), sequences are (L, Cin).
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatchError
from . import kernels


def _pad_amounts(k: int) -> tuple[int, int]:
    before = (k - 1) // 2
    return before, k - 1 - before


def conv2d_forward(x: np.ndarray, weights: np.ndarray, biases: np.ndarray, padding: str = "same"):
    """Cross-correlation plus bias; `same` preserves H and W, `valid`
    shrinks them by kernel_size - 1."""
    k = weights.shape[0]
    if x.ndim != 3 or weights.ndim != 4 or x.shape[-1] != weights.shape[2]:
        raise ShapeMismatchError(
            "conv2d input channels do not match kernel channels",
            expected=weights.shape,
            actual=x.shape,
        )
    if padding == "same":
        before, after = _pad_amounts(k)
        x = np.pad(x, ((before, after), (before, after), (0, 0)))
    cols = kernels.im2col2d(np.ascontiguousarray(x[None]), k, k)
    ho, wo = cols.shape[1], cols.shape[2]
    y = cols.reshape(ho * wo, -1) @ weights.reshape(-1, weights.shape[-1]) + biases
    return y.reshape(ho, wo, -1)


def conv1d_forward(x: np.ndarray, weights: np.ndarray, biases: np.ndarray, padding: str = "valid"):
    k = weights.shape[0]
    if x.ndim != 2 or weights.ndim != 3 or x.shape[-1] != weights.shape[1]:
        raise ShapeMismatchError(
            "conv1d input channels do not match kernel channels",
            expected=weights.shape,
            actual=x.shape,
        )
    if padding == "same":
        before, after = _pad_amounts(k)
        x = np.pad(x, ((before, after), (0, 0)))
    cols = kernels.im2col1d(np.ascontiguousarray(x[None]), k)
    lo = cols.shape[1]
    y = cols.reshape(lo, -1) @ weights.reshape(-1, weights.shape[-1]) + biases
    return y.reshape(lo, -1)


def maxpool_forward(x: np.ndarray, window: int) -> np.ndarray:
    """Max over non-overlapping windows, trailing remainder dropped.

    A 3-D input is pooled over its first two axes (H, W, C); a 2-D input
    over its first axis (L, C).
    """
    if window < 2:
        raise ValueError("pooling window must be >= 2")
    if x.ndim == 3:
        if x.shape[0] < window or x.shape[1] < window:
            raise ShapeMismatchError(
                "maxpool window exceeds spatial extent", expected=f">= {window}", actual=x.shape
            )
        out, _ = kernels.maxpool2d_forward(np.ascontiguousarray(x[None]), window)
        return out[0]
    if x.ndim == 2:
        if x.shape[0] < window:
            raise ShapeMismatchError(
                "maxpool window exceeds sequence length", expected=f">= {window}", actual=x.shape
            )
        out, _ = kernels.maxpool1d_forward(np.ascontiguousarray(x[None]), window)
        return out[0]
    raise ShapeMismatchError("maxpool expects (H, W, C) or (L, C)", actual=x.shape)


def dense_forward(x: np.ndarray, weights: np.ndarray, biases: np.ndarray) -> np.ndarray:
    if x.ndim != 1 or x.shape[0] != weights.shape[0]:
        raise ShapeMismatchError(
            "dense input length does not match weight rows",
            expected=weights.shape,
            actual=x.shape,
        )
    return x @ weights + biases


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0)


def softmax(x: np.ndarray) -> np.ndarray:
    z = np.asarray(x, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    p = e / e.sum(axis=-1, keepdims=True)
    return p / p.sum(axis=-1, keepdims=True)


def cross_entropy(probs: np.ndarray, label: int) -> float:
    """-log(probs[label]); always >= 0 for a proper distribution."""
    if not 0 <= int(label) < probs.shape[-1]:
        raise ValueError(f"label {label} outside [0, {probs.shape[-1] - 1}]")
    return float(-np.log(np.clip(probs[int(label)], 1e-300, None)))


def dropout_apply(x: np.ndarray, rate: float, mode: str, rng_seed: int = 0) -> np.ndarray:
    """Inverted dropout.  `infer` mode is the identity; `train` zeroes each
    element with probability `rate` and rescales survivors by 1/(1-rate)."""
    if not 0.0 <= rate < 1.0:
        raise ValueError("dropout rate must be in [0, 1)")
    if mode not in ("train", "infer"):
        raise ValueError(f"mode must be 'train' or 'infer', got {mode!r}")
    if mode == "infer" or rate == 0.0:
        return x
    rng = np.random.default_rng(rng_seed)
    keep = rng.random(x.shape) >= rate
    return np.where(keep, x / (1.0 - rate), np.zeros((), dtype=x.dtype))
