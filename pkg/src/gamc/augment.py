"""Stochastic graph augmentation: node-feature masking and edge dropping.

Counts are exact, not expected: a mask rate lam masks round(lam * n) nodes
(clipped so at least one node survives unmasked when n >= 2) and an edge
drop rate gamma removes floor(gamma * |E|) undirected edges. Everything is
a pure function of (graph, config, rng stream), so fixed seeds reproduce
views byte for byte.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ContractError
from .graphs import PropagationGraph
from .rng import stream_label


@dataclass(frozen=True)
class AugmentConfig:
    mask_rate: float = 0.5
    edge_drop_rate: float = 0.2
    seed: Optional[int] = None

    def validate(self):
        if not (0.0 <= self.mask_rate <= 1.0 and 0.0 <= self.edge_drop_rate <= 1.0):
            raise ContractError(
                f"augment rates must lie in [0,1], got mask={self.mask_rate} "
                f"edge_drop={self.edge_drop_rate}"
            )
        return self


@dataclass(frozen=True)
class AugmentedView:
    graph: PropagationGraph  # masked features, reduced edge set
    masked_nodes: np.ndarray  # sorted node indices
    dropped_edges: tuple
    seed_trace: str


def masked_count(lam, num_nodes):
    """round(lam * n), half away from zero, clipped to [0, n-1]."""
    m = int(np.floor(lam * num_nodes + 0.5))
    return max(0, min(m, num_nodes - 1))


def mask_features(g, lam, mask_token_row, rng):
    """Replace a uniform sample of round(lam*n) feature rows with the mask token."""
    token = np.asarray(mask_token_row, dtype=np.float64).reshape(-1)
    if token.shape[0] != g.feature_dim:
        raise ContractError(
            f"mask token has dim {token.shape[0]}, features have dim {g.feature_dim}"
        )
    m = masked_count(lam, g.num_nodes)
    masked = np.sort(rng.choice(g.num_nodes, size=m, replace=False).astype(np.int64))
    x_hat = g.features.copy()
    x_hat[masked] = token
    return x_hat, masked


def drop_edges(g, gamma, rng):
    """Remove floor(gamma*|E|) undirected edges, sampled uniformly."""
    num_edges = len(g.edges)
    k = int(np.floor(gamma * num_edges))
    drop_idx = set(rng.choice(num_edges, size=k, replace=False).tolist()) if num_edges else set()
    kept = tuple(e for i, e in enumerate(g.edges) if i not in drop_idx)
    dropped = tuple(e for i, e in enumerate(g.edges) if i in drop_idx)
    return kept, dropped


def make_view(g, cfg, rng):
    x_hat, masked = mask_features(g, cfg.mask_rate, np.zeros(g.feature_dim), rng)
    kept, dropped = drop_edges(g, cfg.edge_drop_rate, rng)
    # The zero rows written here are placeholders; the encoder substitutes the
    # current (learnable) mask token at forward time so gradients reach it.
    view_graph = PropagationGraph(g.id, g.num_nodes, kept, x_hat, g.label)
    return AugmentedView(view_graph, masked, dropped, stream_label(rng))


def make_views(g, cfg, rng=None):
    """Two independently sampled views from split streams of `rng`."""
    cfg.validate()
    if rng is None:
        if cfg.seed is None:
            raise ContractError("make_views needs an rng or a seeded config")
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed)))
    r1, r2 = rng.spawn(2)
    return make_view(g, cfg, r1), make_view(g, cfg, r2)
