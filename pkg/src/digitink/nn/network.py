"""Network container: a layer stack with fused softmax/cross-entropy backward."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatchError
from .layers import ParamLayer, Softmax, build_layer
from .spec import LayerSpec


def one_hot(labels: np.ndarray, classes: int = 10) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() >= classes:
        raise ValueError(f"labels must lie in [0, {classes - 1}]")
    out = np.zeros((labels.size, classes))
    out[np.arange(labels.size), labels] = 1.0
    return out


def cross_entropy_from_probs(probs: np.ndarray, labels: np.ndarray) -> float:
    """Mean negative log-probability of the true class over the batch."""
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() >= probs.shape[-1]:
        raise ValueError(f"labels must lie in [0, {probs.shape[-1] - 1}]")
    picked = probs[np.arange(labels.size), labels]
    return float(-np.log(np.clip(picked, 1e-300, None)).mean())


class Network:
    """A sequential model instance with owned parameters.

    One instance is single-threaded: forward caches feed the matching
    backward call.  Parameter arrays may be shared read-only across
    concurrent forward-only users (e.g. the inference service).
    """

    def __init__(self, input_shape, layer_specs, *, rng: np.random.Generator, dtype=np.float32):
        self.input_shape = tuple(input_shape)
        self.dtype = np.dtype(dtype)
        self.layers = []
        shape = self.input_shape
        for spec in layer_specs:
            layer = build_layer(spec, shape, rng, self.dtype)
            self.layers.append(layer)
            shape = layer.out_shape
        self.output_shape = shape
        self._forward_done = False

    @property
    def layer_specs(self) -> list[LayerSpec]:
        return [layer.spec for layer in self.layers]

    @property
    def param_layers(self) -> list[ParamLayer]:
        return [layer for layer in self.layers if layer.has_params]

    @property
    def parameter_count(self) -> int:
        return sum(layer.parameter_count for layer in self.param_layers)

    def forward(self, x: np.ndarray, train: bool = False, rng=None) -> np.ndarray:
        """Run a batch (N, *input_shape) through the stack; returns the
        softmax probabilities as float64."""
        x = np.asarray(x, dtype=self.dtype)
        if x.shape[1:] != self.input_shape:
            raise ShapeMismatchError(
                "network input shape mismatch",
                expected=("N",) + self.input_shape,
                actual=x.shape,
            )
        for layer in self.layers:
            x = layer.forward(x, train=train, rng=rng)
        self._forward_done = True
        return x

    def backward(self, labels: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
        """Mean cross-entropy gradient for the cached forward batch.

        The gradient at the softmax input is probs - one_hot(label),
        averaged over the batch; upstream layers then apply the chain rule.
        Returns [(d_weights, d_biases), ...] for each parameterized layer
        in forward order (also stored on the layers for the optimizer).
        """
        if not self._forward_done:
            raise RuntimeError("backward called before forward")
        if not isinstance(self.layers[-1], Softmax):
            raise RuntimeError("backward expects a softmax output layer")
        probs = self.layers[-1]._require_cache()
        n = probs.shape[0]
        delta = (probs - one_hot(labels, probs.shape[-1])) / n
        delta = delta.astype(self.dtype)
        for layer in reversed(self.layers[:-1]):
            delta = layer.backward(delta)
        self._forward_done = False
        return [(layer.grad_weights, layer.grad_biases) for layer in self.param_layers]

    def predict_proba(self, x_single: np.ndarray) -> np.ndarray:
        """Inference-mode probabilities for one sample (no dropout)."""
        return self.forward(x_single[None, ...], train=False)[0]

    # -- parameter snapshots (weights, biases, velocities) -----------------

    def get_state(self) -> list[np.ndarray]:
        arrays = []
        for layer in self.param_layers:
            arrays.extend(
                [
                    layer.weights.copy(),
                    layer.biases.copy(),
                    layer.vel_weights.copy(),
                    layer.vel_biases.copy(),
                ]
            )
        return arrays

    def set_state(self, arrays: list[np.ndarray]) -> None:
        expected = 4 * len(self.param_layers)
        if len(arrays) != expected:
            raise ShapeMismatchError(
                "state array count mismatch", expected=expected, actual=len(arrays)
            )
        it = iter(arrays)
        for layer in self.param_layers:
            for name in ("weights", "biases", "vel_weights", "vel_biases"):
                src = next(it)
                dst = getattr(layer, name)
                if src.shape != dst.shape:
                    raise ShapeMismatchError(
                        f"{name} shape mismatch", expected=dst.shape, actual=src.shape
                    )
                setattr(layer, name, src.astype(dst.dtype).copy())
