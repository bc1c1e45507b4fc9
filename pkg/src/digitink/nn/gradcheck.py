"""Central finite-difference verification of the analytic gradients."""

from __future__ import annotations

import numpy as np

from . import spec
from .network import Network, cross_entropy_from_probs


def _loss(network: Network, x, labels) -> float:
    return cross_entropy_from_probs(network.forward(x, train=False), labels)


def max_relative_error(network: Network, x, labels, eps: float = 1e-5) -> float:
    """Max over all parameters of |analytic - numeric| / max(|a|, |n|, 1e-6).

    Run in float64: the step size interacts with single-precision rounding
    badly enough to swamp the comparison.
    """
    network.forward(x, train=False)
    network.backward(labels)
    analytic = [
        (layer.grad_weights.copy(), layer.grad_biases.copy())
        for layer in network.param_layers
    ]
    worst = 0.0
    for layer, (gw, gb) in zip(network.param_layers, analytic):
        for param, grad in ((layer.weights, gw), (layer.biases, gb)):
            flat = param.reshape(-1)
            gflat = grad.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + eps
                up = _loss(network, x, labels)
                flat[i] = orig - eps
                down = _loss(network, x, labels)
                flat[i] = orig
                numeric = (up - down) / (2 * eps)
                denom = max(abs(gflat[i]), abs(numeric), 1e-6)
                worst = max(worst, abs(gflat[i] - numeric) / denom)
    return worst


def random_miniature(rng: np.random.Generator) -> tuple[Network, np.ndarray, np.ndarray]:
    """A tiny random model plus a matching input batch and labels.

    Kept small (spatial extent <= 8x8 / length <= 16, <= 4 features per
    layer) so exhaustive finite differencing stays fast.  Dropout is
    omitted: it has no parameters and is identity at inference.
    """
    classes = 10
    if rng.random() < 0.5:
        h = int(rng.integers(5, 9))
        w = int(rng.integers(5, 9))
        c = int(rng.integers(1, 3))
        input_shape = (h, w, c)
        layers = [
            spec.conv2d(3, int(rng.integers(2, 5)), rng.choice(["same", "valid"])),
            spec.relu(),
        ]
        if min(h, w) >= 4 and rng.random() < 0.5:
            layers.append(spec.maxpool2d(2))
    else:
        length = int(rng.integers(8, 17))
        c = int(rng.integers(1, 3))
        input_shape = (length, c)
        layers = [
            spec.conv1d(int(rng.choice([3, 5])), int(rng.integers(2, 5)), rng.choice(["same", "valid"])),
            spec.relu(),
            spec.maxpool1d(2),
        ]
    layers += [
        spec.flatten(),
        spec.dense(int(rng.integers(3, 7))),
        spec.relu(),
        spec.dense(classes),
        spec.softmax(),
    ]
    net = Network(input_shape, layers, rng=rng, dtype=np.float64)
    n = int(rng.integers(1, 4))
    x = rng.normal(0.0, 1.0, size=(n,) + input_shape)
    labels = rng.integers(0, classes, size=n)
    return net, x, labels
