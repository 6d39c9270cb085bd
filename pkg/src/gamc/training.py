"""Unsupervised training loop, checkpoint container, and loss trace output.

Per epoch, graphs are shuffled and mini-batched; each graph gets two fresh
augmented views (one in no_con mode, unaugmented ones in no_aug mode), runs
the autoencoder forward on its own tape, and contributes an equal share of
the batch gradient. Labels are stripped before anything touches the data.
Fixed seeds give bit-identical parameters, reports, and checkpoint bytes.
"""

import json
import struct
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import tensor as T
from .augment import AugmentConfig, make_views
from .errors import ContractError, DataError, NumericError
from .losses import LossBreakdown, LossConfig, total_loss
from .model import FORMAT_VERSION, bind, from_named, init_params, named_params, view_forward
from .optim import AdamState, adam_step
from .rng import SHUFFLE, VIEWS, stream
from .tensor import Tape, Tensor2

TRAIN_ABLATIONS = ("full", "no_aug", "no_rec", "no_con")

CHECKPOINT_MAGIC = b"GAMCCKPT"


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 80
    lr: float = 1e-3
    alpha: float = 0.1
    mask_rate: float = 0.5
    edge_drop_rate: float = 0.2
    hidden_dim: int = 512
    seed: int = 0
    batch_size: int = 32
    ablation: str = "full"
    static_views: bool = False
    rec_scope: str = "all_nodes"
    cosine: str = "matrix"
    decoder_layers: int = 1

    def validate(self):
        if self.epochs < 1:
            raise ContractError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ContractError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.hidden_dim < 1 or self.decoder_layers < 1:
            raise ContractError("hidden_dim and decoder_layers must be >= 1")
        if self.ablation not in TRAIN_ABLATIONS:
            raise ContractError(f"ablation must be one of {TRAIN_ABLATIONS}")
        AugmentConfig(self.mask_rate, self.edge_drop_rate).validate()
        self.loss_config().validate()
        return self

    def loss_config(self):
        ablation = self.ablation if self.ablation in ("no_rec", "no_con") else "full"
        return LossConfig(self.alpha, self.rec_scope, ablation, self.cosine)

    def augment_config(self):
        if self.ablation == "no_aug":
            return AugmentConfig(0.0, 0.0)
        return AugmentConfig(self.mask_rate, self.edge_drop_rate)


@dataclass
class TrainReport:
    epoch_losses: list = field(default_factory=list)  # per-epoch mean LossBreakdown
    wall_time: float = 0.0
    seed: int = 0
    checkpoint_path: Optional[str] = None


def _graph_views(g, aug_cfg, rng, single_view):
    v1, v2 = make_views(g, aug_cfg, rng)
    return (v1,) if single_view else (v1, v2)


def graph_loss(bound, g, views, loss_cfg):
    outs = [view_forward(bound, v) for v in views]
    x = Tensor2(g.features)
    if len(outs) == 2:
        return total_loss(loss_cfg, x, outs[0].x_rec, x, outs[1].x_rec,
                          masked1=views[0].masked_nodes, masked2=views[1].masked_nodes)
    return total_loss(loss_cfg, x, outs[0].x_rec, masked1=views[0].masked_nodes)


def train(cfg, dataset):
    """Run the full unsupervised loop; returns (ModelParams, TrainReport)."""
    cfg.validate()
    dataset.validate()
    graphs = [g.without_label() for g in dataset.graphs]
    loss_cfg = cfg.loss_config()
    aug_cfg = cfg.augment_config()
    single_view = cfg.ablation == "no_con"

    start = time.perf_counter()
    params = init_params(dataset.feature_dim, cfg.hidden_dim, cfg.decoder_layers, seed=cfg.seed)
    state = AdamState.init(named_params(params), lr=cfg.lr)
    static = None
    if cfg.static_views:
        static = [
            _graph_views(g, aug_cfg, stream(cfg.seed, VIEWS, 0, gi), single_view)
            for gi, g in enumerate(graphs)
        ]

    report = TrainReport(seed=cfg.seed)
    for epoch in range(1, cfg.epochs + 1):
        order = stream(cfg.seed, SHUFFLE, epoch).permutation(len(graphs))
        epoch_rows = []
        for lo in range(0, len(order), cfg.batch_size):
            batch = order[lo: lo + cfg.batch_size]
            accum = {name: np.zeros_like(p) for name, p in named_params(params).items()}
            share = 1.0 / len(batch)
            for gi in batch:
                g = graphs[gi]
                views = (static[gi] if static is not None else
                         _graph_views(g, aug_cfg, stream(cfg.seed, VIEWS, epoch, gi), single_view))
                tape = Tape()
                bound, leaves = bind(params, tape)
                try:
                    loss, breakdown = graph_loss(bound, g, views, loss_cfg)
                except NumericError as exc:
                    raise NumericError(f"epoch {epoch}, graph {g.id!r}: {exc}") from exc
                if not np.isfinite(breakdown.l_total):
                    raise NumericError(f"epoch {epoch}, graph {g.id!r}: non-finite loss")
                grads = T.backward(tape, loss)
                for name, leaf in leaves.items():
                    accum[name] += share * grads[leaf]
                epoch_rows.append(breakdown)
            new_values = adam_step(state, named_params(params), accum)
            params = from_named(new_values, params.feature_dim, params.hidden_dim,
                                cfg.decoder_layers)
        report.epoch_losses.append(LossBreakdown(
            l_rec=float(np.mean([b.l_rec for b in epoch_rows])),
            l_con=float(np.mean([b.l_con for b in epoch_rows])),
            l_total=float(np.mean([b.l_total for b in epoch_rows])),
        ))
    report.wall_time = time.perf_counter() - start
    return params, report


def write_trace(report, path):
    """Training trace CSV: epoch,l_rec,l_con,l_total."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("epoch,l_rec,l_con,l_total\n")
        for i, row in enumerate(report.epoch_losses, start=1):
            fh.write(f"{i},{row.l_rec!r},{row.l_con!r},{row.l_total!r}\n")


def save_checkpoint(params, path):
    """Versioned binary container: magic, JSON header, raw float64 arrays."""
    named = named_params(params)
    header = json.dumps(
        {
            "format_version": params.format_version,
            "feature_dim": params.feature_dim,
            "hidden_dim": params.hidden_dim,
            "decoder_layers": len(params.decoder.layers),
            "arrays": [
                {"name": name, "rows": int(a.shape[0]), "cols": int(a.shape[1])}
                for name, a in named.items()
            ],
        },
        sort_keys=True,
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        for a in named.values():
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_checkpoint(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[: len(CHECKPOINT_MAGIC)] != CHECKPOINT_MAGIC:
        raise DataError(f"{path}: not a checkpoint file")
    pos = len(CHECKPOINT_MAGIC)
    (header_len,) = struct.unpack_from("<I", blob, pos)
    pos += 4
    try:
        header = json.loads(blob[pos: pos + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: corrupt checkpoint header") from exc
    pos += header_len
    if header.get("format_version") != FORMAT_VERSION:
        raise DataError(
            f"{path}: checkpoint format_version {header.get('format_version')} "
            f"unsupported (expected {FORMAT_VERSION})"
        )
    named = {}
    for spec in header["arrays"]:
        count = spec["rows"] * spec["cols"]
        end = pos + 8 * count
        if end > len(blob):
            raise DataError(f"{path}: truncated checkpoint")
        arr = np.frombuffer(blob[pos:end], dtype="<f8").reshape(spec["rows"], spec["cols"])
        named[spec["name"]] = arr.astype(np.float64)
        pos = end
    if pos != len(blob):
        raise DataError(f"{path}: trailing bytes in checkpoint")
    try:
        params = from_named(named, header["feature_dim"], header["hidden_dim"],
                            header["decoder_layers"])
    except KeyError as exc:
        raise DataError(f"{path}: checkpoint missing array {exc}") from exc
    return params
