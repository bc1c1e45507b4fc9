"""Layer configuration records and their closed-form size accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

LAYER_KINDS = {
    "conv2d",
    "conv1d",
    "maxpool2d",
    "maxpool1d",
    "dense",
    "relu",
    "softmax",
    "dropout",
    "flatten",
}

_FIELD_USE = {
    "conv2d": {"kernel_size", "padding", "feature_count"},
    "conv1d": {"kernel_size", "padding", "feature_count"},
    "maxpool2d": {"kernel_size"},
    "maxpool1d": {"kernel_size"},
    "dense": {"feature_count"},
    "dropout": {"dropout_rate"},
    "relu": set(),
    "softmax": set(),
    "flatten": set(),
}


@dataclass(frozen=True)
class LayerSpec:
    """One layer's configuration.  Fields irrelevant to `kind` stay None.

    For pooling layers `kernel_size` is the (non-overlapping) window.
    """

    kind: str
    kernel_size: Optional[int] = None
    stride: int = 1
    padding: Optional[str] = None
    feature_count: Optional[int] = None
    dropout_rate: Optional[float] = None

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}")
        used = _FIELD_USE[self.kind]
        for name in ("kernel_size", "padding", "feature_count", "dropout_rate"):
            value = getattr(self, name)
            if value is not None and name not in used:
                raise ValueError(f"{self.kind} layer does not take {name}")
            if value is None and name in used:
                raise ValueError(f"{self.kind} layer requires {name}")
        if self.padding is not None and self.padding not in ("same", "valid"):
            raise ValueError(f"padding must be 'same' or 'valid', got {self.padding!r}")
        if self.dropout_rate is not None and not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.kernel_size is not None and self.kernel_size < 1:
            raise ValueError("kernel_size must be positive")

    def parameter_count(self, in_shape: tuple[int, ...]) -> int:
        """Closed-form parameter count given the layer's input shape."""
        if self.kind == "conv2d":
            return self.kernel_size**2 * in_shape[-1] * self.feature_count + self.feature_count
        if self.kind == "conv1d":
            return self.kernel_size * in_shape[-1] * self.feature_count + self.feature_count
        if self.kind == "dense":
            return in_shape[0] * self.feature_count + self.feature_count
        return 0

    def output_shape(self, in_shape: tuple[int, ...]) -> tuple[int, ...]:
        """Spatial bookkeeping: `same` preserves extent, `valid` shrinks by
        k-1, pooling floors, flatten collapses."""
        if self.kind == "conv2d":
            h, w, _ = in_shape
            if self.padding == "valid":
                h, w = h - self.kernel_size + 1, w - self.kernel_size + 1
            return (h, w, self.feature_count)
        if self.kind == "conv1d":
            length, _ = in_shape
            if self.padding == "valid":
                length = length - self.kernel_size + 1
            return (length, self.feature_count)
        if self.kind == "maxpool2d":
            h, w, c = in_shape
            return (h // self.kernel_size, w // self.kernel_size, c)
        if self.kind == "maxpool1d":
            length, c = in_shape
            return (length // self.kernel_size, c)
        if self.kind == "dense":
            return (self.feature_count,)
        if self.kind == "flatten":
            return (math.prod(in_shape),)
        return in_shape

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "stride": self.stride}
        for name in ("kernel_size", "padding", "feature_count", "dropout_rate"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "LayerSpec":
        return cls(**data)


def conv2d(kernel_size: int, features: int, padding: str) -> LayerSpec:
    return LayerSpec("conv2d", kernel_size=kernel_size, feature_count=features, padding=padding)


def conv1d(kernel_size: int, features: int, padding: str) -> LayerSpec:
    return LayerSpec("conv1d", kernel_size=kernel_size, feature_count=features, padding=padding)


def maxpool2d(window: int) -> LayerSpec:
    return LayerSpec("maxpool2d", kernel_size=window)


def maxpool1d(window: int) -> LayerSpec:
    return LayerSpec("maxpool1d", kernel_size=window)


def dense(features: int) -> LayerSpec:
    return LayerSpec("dense", feature_count=features)


def relu() -> LayerSpec:
    return LayerSpec("relu")


def softmax() -> LayerSpec:
    return LayerSpec("softmax")


def dropout(rate: float) -> LayerSpec:
    return LayerSpec("dropout", dropout_rate=rate)


def flatten() -> LayerSpec:
    return LayerSpec("flatten")
