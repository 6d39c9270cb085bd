"""Synthetic propagation cascades with two distinguishable regimes.

Each graph is a random tree: the news node is the root, every node spawns a
Poisson number of children up to a per-graph depth cap, and every node's
feature row is its regime's center plus Gaussian noise. The noise can carry
a per-graph shared component (graph_noise_frac of the variance) so that
class separation cannot be trivially read off a single node. Labels are
balanced to within one graph and everything is a pure function of the seed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .graphs import Dataset, PropagationGraph
from .rng import SYNTH, stream

MAX_NODES = 512  # safety cap; keeps runaway branching draws desk-scale


@dataclass(frozen=True)
class RegimeConfig:
    branching: float  # Poisson mean children per node
    depth: float  # Poisson mean of the per-graph depth cap
    center: np.ndarray  # feature-space center, shape (feature_dim,)
    sigma: float  # noise scale


@dataclass(frozen=True)
class SynthConfig:
    num_graphs: int
    fake: RegimeConfig
    real: RegimeConfig
    feature_dim: int = 32
    class_balance: float = 0.5
    graph_noise_frac: float = 0.0
    seed: int = 0
    name: str = "synth"

    def validate(self):
        if self.num_graphs < 1:
            raise ContractError("num_graphs must be >= 1")
        if not (0.0 <= self.class_balance <= 1.0):
            raise ContractError("class_balance must lie in [0,1]")
        if not (0.0 <= self.graph_noise_frac < 1.0):
            raise ContractError("graph_noise_frac must lie in [0,1)")
        for regime in (self.fake, self.real):
            if regime.sigma <= 0 or regime.branching < 0 or regime.depth < 0:
                raise ContractError("regimes need sigma > 0 and nonnegative structure means")
            if regime.center.shape != (self.feature_dim,):
                raise ContractError("regime center must have shape (feature_dim,)")
        if not np.linalg.norm(self.fake.center - self.real.center) > 0:
            raise ContractError("regime centers must differ")
        return self


def default_config(num_graphs, feature_dim=32, delta=3.0, sigma=1.0, seed=0,
                   branching=(2.2, 1.8), depth=(2.5, 2.5), class_balance=0.5,
                   graph_noise_frac=0.0, name="synth"):
    """Two regimes whose centers sit delta*sigma apart along a seeded direction."""
    if delta <= 0:
        raise ContractError("delta must be > 0")
    direction = stream(seed, SYNTH, 0, 0).standard_normal(feature_dim)
    direction /= np.linalg.norm(direction)
    offset = 0.5 * delta * sigma * direction
    return SynthConfig(
        num_graphs=num_graphs,
        fake=RegimeConfig(branching[0], depth[0], offset.copy(), sigma),
        real=RegimeConfig(branching[1], depth[1], -offset, sigma),
        feature_dim=feature_dim,
        class_balance=class_balance,
        graph_noise_frac=graph_noise_frac,
        seed=seed,
        name=name,
    ).validate()


def _grow_tree(rng, regime):
    """Node count and parent-child edges of one cascade."""
    depth_cap = int(rng.poisson(regime.depth))
    edges = []
    frontier = [(0, 0)]  # (node, depth)
    next_id = 1
    while frontier:
        node, d = frontier.pop(0)
        if d >= depth_cap:
            continue
        for _ in range(int(rng.poisson(regime.branching))):
            if next_id >= MAX_NODES:
                return next_id, edges
            edges.append((node, next_id))
            frontier.append((next_id, d + 1))
            next_id += 1
    return next_id, edges


def generate(cfg):
    """Labeled Dataset of cfg.num_graphs random cascades."""
    cfg.validate()
    n_fake = int(np.floor(cfg.class_balance * cfg.num_graphs + 0.5))
    sigma_graph_frac = np.sqrt(cfg.graph_noise_frac)
    sigma_node_frac = np.sqrt(1.0 - cfg.graph_noise_frac)
    graphs = []
    for i in range(cfg.num_graphs):
        label = "fake" if i < n_fake else "real"
        regime = cfg.fake if label == "fake" else cfg.real
        rng = stream(cfg.seed, SYNTH, 1, i)
        num_nodes, edges = _grow_tree(rng, regime)
        shared = regime.sigma * sigma_graph_frac * rng.standard_normal(cfg.feature_dim)
        noise = regime.sigma * sigma_node_frac * rng.standard_normal((num_nodes, cfg.feature_dim))
        features = regime.center + shared + noise
        graphs.append(PropagationGraph(
            id=f"g{i:05d}",
            num_nodes=num_nodes,
            edges=tuple(edges),
            features=features,
            label=label,
        ))
    return Dataset(tuple(graphs), cfg.feature_dim, cfg.name).validate()
