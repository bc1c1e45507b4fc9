"""Batched forward/backward implementations of every layer kind.

Activations carry a leading batch axis: 2D feature maps are (N, H, W, C),
1D sequences are (N, L, C), dense vectors are (N, D).  Convolutions are
cross-correlations (kernel not flipped) plus bias, stride 1.  The heavy
lifting is im2col/col2im plus BLAS matmul; the data-movement kernels come
from digitink.nn.kernels (compiled when available).
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatchError
from . import kernels
from .spec import LayerSpec


def glorot_uniform(rng: np.random.Generator, shape, fan_in: int, fan_out: int, dtype):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


class Layer:
    """Base layer: stateless unless it has parameters or a forward cache."""

    spec: LayerSpec
    in_shape: tuple[int, ...]
    out_shape: tuple[int, ...]

    def __init__(self, spec: LayerSpec, in_shape: tuple[int, ...]):
        self.spec = spec
        self.in_shape = tuple(in_shape)
        self.out_shape = spec.output_shape(self.in_shape)
        self._cache = None

    @property
    def has_params(self) -> bool:
        return False

    def forward(self, x: np.ndarray, train: bool = False, rng=None) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _require_cache(self):
        if self._cache is None:
            raise RuntimeError(
                f"{type(self).__name__}.backward called without a cached forward pass"
            )
        return self._cache


class ParamLayer(Layer):
    """Layer owning weights/biases plus matching momentum velocity buffers."""

    weights: np.ndarray
    biases: np.ndarray
    vel_weights: np.ndarray
    vel_biases: np.ndarray
    grad_weights: np.ndarray | None
    grad_biases: np.ndarray | None

    @property
    def has_params(self) -> bool:
        return True

    @property
    def parameter_count(self) -> int:
        return self.weights.size + self.biases.size

    def _init_state(self):
        self.vel_weights = np.zeros_like(self.weights)
        self.vel_biases = np.zeros_like(self.biases)
        self.grad_weights = None
        self.grad_biases = None


class Conv2D(ParamLayer):
    def __init__(self, spec, in_shape, rng, dtype):
        super().__init__(spec, in_shape)
        k, cin, cout = spec.kernel_size, in_shape[-1], spec.feature_count
        fan_in = k * k * cin
        fan_out = k * k * cout
        self.weights = glorot_uniform(rng, (k, k, cin, cout), fan_in, fan_out, dtype)
        self.biases = np.zeros(cout, dtype=dtype)
        self._init_state()

    def forward(self, x, train=False, rng=None):
        k = self.spec.kernel_size
        cin = self.weights.shape[2]
        if x.shape[-1] != cin:
            raise ShapeMismatchError(
                "conv2d input channels do not match kernel channels",
                expected=self.weights.shape,
                actual=x.shape,
            )
        if self.spec.padding == "same":
            before = (k - 1) // 2
            after = k - 1 - before
            x = np.pad(x, ((0, 0), (before, after), (before, after), (0, 0)))
        n, h, w, _ = x.shape
        cols = kernels.im2col2d(np.ascontiguousarray(x), k, k)
        ho, wo = cols.shape[1], cols.shape[2]
        flat = cols.reshape(n * ho * wo, -1)
        y = flat @ self.weights.reshape(-1, self.weights.shape[-1]) + self.biases
        self._cache = (flat, (n, h, w, cin), (ho, wo))
        return y.reshape(n, ho, wo, -1)

    def backward(self, dy):
        flat, (n, h, w, cin), (ho, wo) = self._require_cache()
        cout = self.weights.shape[-1]
        dy_flat = dy.reshape(n * ho * wo, cout)
        self.grad_weights = (flat.T @ dy_flat).reshape(self.weights.shape)
        self.grad_biases = dy_flat.sum(axis=0)
        dcols = dy_flat @ self.weights.reshape(-1, cout).T
        k = self.spec.kernel_size
        dx = kernels.col2im2d(
            np.ascontiguousarray(dcols.reshape(n, ho, wo, -1)), h, w, cin
        )
        if self.spec.padding == "same":
            before = (k - 1) // 2
            dx = dx[:, before : before + self.in_shape[0], before : before + self.in_shape[1], :]
        return dx


class Conv1D(ParamLayer):
    def __init__(self, spec, in_shape, rng, dtype):
        super().__init__(spec, in_shape)
        k, cin, cout = spec.kernel_size, in_shape[-1], spec.feature_count
        self.weights = glorot_uniform(rng, (k, cin, cout), k * cin, k * cout, dtype)
        self.biases = np.zeros(cout, dtype=dtype)
        self._init_state()

    def forward(self, x, train=False, rng=None):
        k = self.spec.kernel_size
        cin = self.weights.shape[1]
        if x.shape[-1] != cin:
            raise ShapeMismatchError(
                "conv1d input channels do not match kernel channels",
                expected=self.weights.shape,
                actual=x.shape,
            )
        if self.spec.padding == "same":
            before = (k - 1) // 2
            x = np.pad(x, ((0, 0), (before, k - 1 - before), (0, 0)))
        n, length, _ = x.shape
        cols = kernels.im2col1d(np.ascontiguousarray(x), k)
        lo = cols.shape[1]
        flat = cols.reshape(n * lo, -1)
        y = flat @ self.weights.reshape(-1, self.weights.shape[-1]) + self.biases
        self._cache = (flat, (n, length, cin), lo)
        return y.reshape(n, lo, -1)

    def backward(self, dy):
        flat, (n, length, cin), lo = self._require_cache()
        cout = self.weights.shape[-1]
        dy_flat = dy.reshape(n * lo, cout)
        self.grad_weights = (flat.T @ dy_flat).reshape(self.weights.shape)
        self.grad_biases = dy_flat.sum(axis=0)
        dcols = dy_flat @ self.weights.reshape(-1, cout).T
        dx = kernels.col2im1d(np.ascontiguousarray(dcols.reshape(n, lo, -1)), length, cin)
        if self.spec.padding == "same":
            before = (self.spec.kernel_size - 1) // 2
            dx = dx[:, before : before + self.in_shape[0], :]
        return dx


class MaxPool2D(Layer):
    def __init__(self, spec, in_shape):
        super().__init__(spec, in_shape)
        if in_shape[0] < spec.kernel_size or in_shape[1] < spec.kernel_size:
            raise ShapeMismatchError(
                "maxpool2d window exceeds spatial extent",
                expected=f">= {spec.kernel_size}x{spec.kernel_size}",
                actual=in_shape,
            )

    def forward(self, x, train=False, rng=None):
        out, idx = kernels.maxpool2d_forward(np.ascontiguousarray(x), self.spec.kernel_size)
        self._cache = (idx, x.shape)
        return out

    def backward(self, dy):
        idx, in_shape = self._require_cache()
        return kernels.maxpool2d_backward(
            np.ascontiguousarray(dy), idx, in_shape[1], in_shape[2], self.spec.kernel_size
        )


class MaxPool1D(Layer):
    def __init__(self, spec, in_shape):
        super().__init__(spec, in_shape)
        if in_shape[0] < spec.kernel_size:
            raise ShapeMismatchError(
                "maxpool1d window exceeds sequence length",
                expected=f">= {spec.kernel_size}",
                actual=in_shape,
            )

    def forward(self, x, train=False, rng=None):
        out, idx = kernels.maxpool1d_forward(np.ascontiguousarray(x), self.spec.kernel_size)
        self._cache = (idx, x.shape)
        return out

    def backward(self, dy):
        idx, in_shape = self._require_cache()
        return kernels.maxpool1d_backward(
            np.ascontiguousarray(dy), idx, in_shape[1], self.spec.kernel_size
        )


class Dense(ParamLayer):
    def __init__(self, spec, in_shape, rng, dtype):
        super().__init__(spec, in_shape)
        if len(in_shape) != 1:
            raise ShapeMismatchError(
                "dense expects a flat input", expected="(D,)", actual=in_shape
            )
        d, m = in_shape[0], spec.feature_count
        self.weights = glorot_uniform(rng, (d, m), d, m, dtype)
        self.biases = np.zeros(m, dtype=dtype)
        self._init_state()

    def forward(self, x, train=False, rng=None):
        if x.shape[-1] != self.weights.shape[0]:
            raise ShapeMismatchError(
                "dense input length does not match weight rows",
                expected=self.weights.shape,
                actual=x.shape,
            )
        self._cache = x
        return x @ self.weights + self.biases

    def backward(self, dy):
        x = self._require_cache()
        self.grad_weights = x.T @ dy
        self.grad_biases = dy.sum(axis=0)
        return dy @ self.weights.T


class ReLU(Layer):
    def forward(self, x, train=False, rng=None):
        mask = x > 0
        self._cache = mask
        return np.where(mask, x, np.zeros((), dtype=x.dtype))

    def backward(self, dy):
        mask = self._require_cache()
        return np.where(mask, dy, np.zeros((), dtype=dy.dtype))


class Flatten(Layer):
    def forward(self, x, train=False, rng=None):
        self._cache = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dy):
        return dy.reshape(self._require_cache())


class Dropout(Layer):
    """Inverted dropout: train mode zeroes with probability `rate` and
    rescales survivors by 1/(1-rate); infer mode is the identity."""

    def forward(self, x, train=False, rng=None):
        rate = self.spec.dropout_rate
        if not train or rate == 0.0:
            self._cache = None
            return x
        if rng is None:
            raise ValueError("dropout in train mode needs an RNG")
        keep = (rng.random(x.shape) >= rate).astype(x.dtype)
        scale = x.dtype.type(1.0 / (1.0 - rate))
        self._cache = keep * scale
        return x * self._cache

    def backward(self, dy):
        if self._cache is None:
            return dy
        return dy * self._cache


class Softmax(Layer):
    """Row softmax over the class axis, computed and emitted in float64 so
    the outputs sum to 1 within 1e-9 regardless of the network dtype."""

    def forward(self, x, train=False, rng=None):
        z = x.astype(np.float64)
        z -= z.max(axis=-1, keepdims=True)
        e = np.exp(z)
        p = e / e.sum(axis=-1, keepdims=True)
        p /= p.sum(axis=-1, keepdims=True)
        self._cache = p
        return p

    def backward(self, dy):
        p = self._require_cache()
        dot = (dy * p).sum(axis=-1, keepdims=True)
        return (p * (dy - dot)).astype(dy.dtype)


def build_layer(spec: LayerSpec, in_shape, rng, dtype) -> Layer:
    kind = spec.kind
    if kind == "conv2d":
        return Conv2D(spec, in_shape, rng, dtype)
    if kind == "conv1d":
        return Conv1D(spec, in_shape, rng, dtype)
    if kind == "maxpool2d":
        return MaxPool2D(spec, in_shape)
    if kind == "maxpool1d":
        return MaxPool1D(spec, in_shape)
    if kind == "dense":
        return Dense(spec, in_shape, rng, dtype)
    if kind == "relu":
        return ReLU(spec, in_shape)
    if kind == "flatten":
        return Flatten(spec, in_shape)
    if kind == "dropout":
        return Dropout(spec, in_shape)
    if kind == "softmax":
        return Softmax(spec, in_shape)
    raise ValueError(f"unknown layer kind {kind!r}")
