"""Momentum SGD with staircase exponential learning-rate decay."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import TrainingDivergedError
from .network import Network


@dataclass
class OptimizerState:
    base_learning_rate: float
    momentum: float = 0.9
    decay_rate: float = 0.95
    epoch_index: int = 0
    nesterov: bool = False

    def __post_init__(self):
        if self.base_learning_rate <= 0:
            raise ValueError("base_learning_rate must be positive")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must be in [0, 1)")
        if not 0.0 < self.decay_rate <= 1.0:
            raise ValueError("decay_rate must be in (0, 1]")

    def effective_lr(self) -> float:
        """base_lr * decay^epoch, stepped once per epoch (staircase)."""
        return self.base_learning_rate * self.decay_rate**self.epoch_index


def sgd_momentum_step(param, velocity, grad, state: OptimizerState):
    """One update: v <- momentum*v - lr_eff*grad; param <- param + v.

    Returns (param, velocity) as new arrays; the in-place variant used by
    the trainer lives in SGDMomentum.step.
    """
    if not np.all(np.isfinite(grad)):
        raise TrainingDivergedError("non-finite gradient passed to optimizer")
    lr = state.effective_lr()
    velocity = state.momentum * velocity - lr * grad
    if state.nesterov:
        param = param + state.momentum * velocity - lr * grad
    else:
        param = param + velocity
    return param, velocity


class SGDMomentum:
    def __init__(self, network: Network, state: OptimizerState):
        self.network = network
        self.state = state

    def set_epoch(self, epoch_index: int) -> None:
        self.state.epoch_index = epoch_index

    def step(self) -> None:
        """Apply the cached gradients of every parameterized layer in place."""
        lr = self.network.dtype.type(self.state.effective_lr())
        mu = self.network.dtype.type(self.state.momentum)
        for i, layer in enumerate(self.network.param_layers):
            for pname, vname, gname in (
                ("weights", "vel_weights", "grad_weights"),
                ("biases", "vel_biases", "grad_biases"),
            ):
                grad = getattr(layer, gname)
                if grad is None:
                    raise TrainingDivergedError(
                        f"optimizer step before backward (layer {i}, {pname})"
                    )
                if not np.all(np.isfinite(grad)):
                    raise TrainingDivergedError(
                        f"non-finite gradient in layer {i} ({type(layer).__name__}.{pname})"
                    )
                vel = getattr(layer, vname)
                vel *= mu
                vel -= lr * grad
                param = getattr(layer, pname)
                if self.state.nesterov:
                    param += mu * vel
                    param -= lr * grad
                else:
                    param += vel
