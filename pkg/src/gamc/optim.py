"""Adam with bias correction, operating on named parameter dicts."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    @classmethod
    def init(cls, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        state = cls(lr=lr, beta1=beta1, beta2=beta2, eps=eps)
        state.m = {name: np.zeros_like(p) for name, p in params.items()}
        state.v = {name: np.zeros_like(p) for name, p in params.items()}
        return state


def adam_step(state, params, grads):
    """One Adam update. Returns new parameter arrays; inputs stay untouched."""
    missing = [k for k in params if k not in grads]
    if missing:
        raise ContractError(f"adam_step: missing gradients for {missing}")
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    out = {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ContractError(f"adam_step: gradient shape {g.shape} != param {p.shape} for {name}")
        m = state.m[name] = b1 * state.m[name] + (1.0 - b1) * g
        v = state.v[name] = b2 * state.v[name] + (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        out[name] = p - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return out
