"""Minimal deterministic neural-network engine for the two digit models."""

from .kernels import BACKEND
from .network import Network, cross_entropy_from_probs, one_hot
from .optim import OptimizerState, SGDMomentum, sgd_momentum_step
from .spec import LayerSpec

__all__ = [
    "BACKEND",
    "Network",
    "LayerSpec",
    "OptimizerState",
    "SGDMomentum",
    "sgd_momentum_step",
    "one_hot",
    "cross_entropy_from_probs",
]
