"""Composite objective: reconstruction error minus weighted view alignment.

The reconstruction term is (1/n) * sum of squared feature errors over both
views (n = node count of the graph). The contrast term is the cosine
similarity of the two reconstructions, treated as flattened vectors, and it
enters the total with a negative weight, so driving the total down pushes
the two views' reconstructions together.
"""

from dataclasses import dataclass
from typing import Optional

from . import tensor as T
from .errors import ContractError
from .tensor import Tensor2

REC_SCOPES = ("all_nodes", "masked_only")
LOSS_ABLATIONS = ("full", "no_rec", "no_con")
COSINE_MODES = ("matrix", "row_mean")

COSINE_FLOOR = 1e-12


@dataclass(frozen=True)
class LossConfig:
    alpha: float = 0.1
    rec_scope: str = "all_nodes"
    ablation: str = "full"
    cosine: str = "matrix"

    def validate(self):
        if self.alpha < 0:
            raise ContractError(f"alpha must be >= 0, got {self.alpha}")
        if self.rec_scope not in REC_SCOPES:
            raise ContractError(f"rec_scope must be one of {REC_SCOPES}")
        if self.ablation not in LOSS_ABLATIONS:
            raise ContractError(f"ablation must be one of {LOSS_ABLATIONS}")
        if self.cosine not in COSINE_MODES:
            raise ContractError(f"cosine must be one of {COSINE_MODES}")
        return self


@dataclass(frozen=True)
class LossBreakdown:
    l_rec: float
    l_con: float
    l_total: float


def _pair_error(x, x_rec, scope, masked):
    d = T.sub(x, x_rec)
    if scope == "masked_only":
        if masked is None:
            raise ContractError("masked_only scope needs the masked node indices")
        d = T.keep_rows(d, masked)
    return T.frobenius_dot(d, d)


def reconstruction_loss(x1, x1_rec, x2=None, x2_rec=None, scope="all_nodes",
                        masked1=None, masked2=None):
    """Per-node-normalized squared error of one or two reconstructions."""
    if scope not in REC_SCOPES:
        raise ContractError(f"rec_scope must be one of {REC_SCOPES}")
    x1 = x1 if isinstance(x1, Tensor2) else Tensor2(x1)
    total = _pair_error(x1, x1_rec, scope, masked1)
    if x2_rec is not None:
        x2 = x1 if x2 is None else (x2 if isinstance(x2, Tensor2) else Tensor2(x2))
        total = T.add(total, _pair_error(x2, x2_rec, scope, masked2))
    return T.scale(total, 1.0 / x1.rows)


def contrast_loss(x1_rec, x2_rec, cosine="matrix"):
    """Cosine similarity of the two reconstructions; always in [-1, 1]."""
    if cosine == "row_mean":
        return T.row_cosine_mean(x1_rec, x2_rec, COSINE_FLOOR)
    num = T.frobenius_dot(x1_rec, x2_rec)
    den = T.maximum_const(
        T.mul(T.frobenius_norm(x1_rec), T.frobenius_norm(x2_rec)), COSINE_FLOOR
    )
    return T.div(num, den)


def total_loss(cfg, x1, x1_rec, x2=None, x2_rec=None, masked1=None, masked2=None):
    """Combine the terms per the configured ablation.

    Returns (loss tensor, LossBreakdown). The breakdown always reports both
    component values when they are computable, even for ablations that do
    not optimize them; l_con is 0.0 in single-view mode.
    """
    cfg.validate()
    l_rec = reconstruction_loss(x1, x1_rec, x2, x2_rec, cfg.rec_scope, masked1, masked2)
    l_con = contrast_loss(x1_rec, x2_rec, cfg.cosine) if x2_rec is not None else None

    if cfg.ablation == "no_con" or l_con is None:
        if cfg.ablation != "no_con":
            raise ContractError("two reconstructions are required unless ablation is no_con")
        total = l_rec
    elif cfg.ablation == "no_rec":
        total = T.scale(l_con, -cfg.alpha)
    else:
        total = T.sub(l_rec, T.scale(l_con, cfg.alpha))

    breakdown = LossBreakdown(
        l_rec=l_rec.item(),
        l_con=l_con.item() if l_con is not None else 0.0,
        l_total=total.item(),
    )
    return total, breakdown
