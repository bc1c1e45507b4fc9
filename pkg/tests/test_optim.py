"""Momentum SGD update rule and staircase decay schedule."""

import numpy as np
import pytest

from digitink.errors import TrainingDivergedError
from digitink.nn import OptimizerState, sgd_momentum_step


def test_zero_momentum_is_plain_sgd():
    state = OptimizerState(base_learning_rate=0.1, momentum=0.0, decay_rate=1.0)
    param = np.array([1.0, -2.0])
    vel = np.zeros(2)
    grad = np.array([0.5, 0.25])
    new_param, _ = sgd_momentum_step(param, vel, grad, state)
    np.testing.assert_allclose(new_param, param - 0.1 * grad)


def test_staircase_decay():
    state = OptimizerState(base_learning_rate=0.1, decay_rate=0.95)
    assert state.effective_lr() == pytest.approx(0.1)
    state.epoch_index = 1
    assert state.effective_lr() == pytest.approx(0.095)
    state.epoch_index = 3
    assert state.effective_lr() == pytest.approx(0.1 * 0.95**3)
    assert state.effective_lr() > 0


def test_two_step_momentum_displacement():
    # v1 = -lr*g, v2 = mu*v1 - lr*g => total displacement -lr*g*(1 + 1 + mu)
    lr, mu, g = 0.1, 0.9, 2.0
    state = OptimizerState(base_learning_rate=lr, momentum=mu, decay_rate=1.0)
    param = np.array([0.0])
    vel = np.zeros(1)
    grad = np.array([g])
    param, vel = sgd_momentum_step(param, vel, grad, state)
    param, vel = sgd_momentum_step(param, vel, grad, state)
    assert param[0] == pytest.approx(-lr * g * (1 + 1.9))


def test_nonfinite_gradient_rejected():
    state = OptimizerState(base_learning_rate=0.1)
    with pytest.raises(TrainingDivergedError):
        sgd_momentum_step(np.zeros(2), np.zeros(2), np.array([np.nan, 0.0]), state)


def test_hyperparameter_validation():
    with pytest.raises(ValueError):
        OptimizerState(base_learning_rate=0.0)
    with pytest.raises(ValueError):
        OptimizerState(base_learning_rate=0.1, momentum=1.0)
    with pytest.raises(ValueError):
        OptimizerState(base_learning_rate=0.1, decay_rate=0.0)
