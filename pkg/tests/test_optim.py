"""Adam update semantics and convergence."""

import numpy as np
import pytest

from gamc.errors import ContractError
from gamc.optim import AdamState, adam_step


def test_zero_gradient_is_identity():
    params = {"w": np.array([[1.0, -2.0], [3.0, 4.0]])}
    state = AdamState.init(params)
    new = adam_step(state, params, {"w": np.zeros((2, 2))})
    assert np.array_equal(new["w"], params["w"])
    assert state.step == 1


def test_first_step_bias_corrected():
    # p=1, g=1: bias correction makes m_hat = v_hat = 1, so p <- 1 - lr/(1+eps)
    params = {"p": np.array([[1.0]])}
    state = AdamState.init(params, lr=1e-3)
    new = adam_step(state, params, {"p": np.array([[1.0]])})
    expected = 1.0 - 1e-3 / (1.0 + 1e-8)
    assert new["p"][0, 0] == pytest.approx(expected, abs=1e-15)


def test_step_counter_strictly_increases():
    params = {"p": np.zeros((1, 1))}
    state = AdamState.init(params)
    for expected in range(1, 5):
        params = adam_step(state, params, {"p": np.ones((1, 1))})
        assert state.step == expected


def test_missing_gradient_raises():
    params = {"a": np.zeros((1, 1)), "b": np.zeros((1, 1))}
    state = AdamState.init(params)
    with pytest.raises(ContractError, match="b"):
        adam_step(state, params, {"a": np.zeros((1, 1))})


def test_converges_on_quadratic():
    # 200 steps of lr=0.1 Adam on (p - 3)^2 lands within 1e-2 of the minimum
    params = {"p": np.array([[1.0]])}
    state = AdamState.init(params, lr=0.1)
    for _ in range(200):
        grad = {"p": 2.0 * (params["p"] - 3.0)}
        params = adam_step(state, params, grad)
    assert abs(params["p"][0, 0] - 3.0) < 1e-2


def test_moment_shapes_track_parameters():
    params = {"w": np.zeros((3, 2)), "b": np.zeros((1, 2))}
    state = AdamState.init(params)
    assert state.m["w"].shape == (3, 2)
    assert state.v["b"].shape == (1, 2)
    with pytest.raises(ContractError):
        adam_step(state, params, {"w": np.zeros((2, 3)), "b": np.zeros((1, 2))})
