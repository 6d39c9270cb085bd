"""Shared helpers: independent oracles and random-graph builders."""

import numpy as np
import pytest

from gamc.graphs import Dataset, PropagationGraph


def finite_diff(f, arr, step=1e-5):
    """Central finite differences of scalar f() w.r.t. arr, mutated in place."""
    grad = np.zeros_like(arr)
    flat = arr.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        saved = flat[i]
        flat[i] = saved + step
        fp = f()
        flat[i] = saved - step
        fm = f()
        flat[i] = saved
        gflat[i] = (fp - fm) / (2.0 * step)
    return grad


def max_rel_err(analytic, fd, floor=1e-6):
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(fd)), floor)
    return float(np.max(np.abs(analytic - fd) / denom))


def random_graph(rng, num_nodes, feature_dim, edge_prob=0.4, label=None, gid="g"):
    """Random simple undirected graph with Gaussian features."""
    edges = []
    for u in range(num_nodes):
        for v in range(u + 1, num_nodes):
            if rng.random() < edge_prob:
                edges.append((u, v))
    g = PropagationGraph(
        id=gid,
        num_nodes=num_nodes,
        edges=tuple(edges),
        features=rng.standard_normal((num_nodes, feature_dim)),
        label=label,
    )
    return g.validate()


def permute_graph(g, perm):
    """Relabel nodes by perm (old -> new); perm[0] must be 0 to keep the news node."""
    assert perm[0] == 0
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    features = g.features[inv]
    edges = tuple((int(perm[u]), int(perm[v])) for u, v in g.edges)
    return PropagationGraph(g.id, g.num_nodes, edges, features, g.label).validate()


def dense_adjacency(g):
    a = np.zeros((g.num_nodes, g.num_nodes))
    for u, v in g.edges:
        a[u, v] = 1.0
        a[v, u] = 1.0
    return a


def tiny_dataset(rng, num_graphs, feature_dim, num_nodes=6, labeled=True):
    graphs = []
    for i in range(num_graphs):
        label = ("fake" if i % 2 == 0 else "real") if labeled else None
        graphs.append(
            random_graph(rng, num_nodes, feature_dim, label=label, gid=f"g{i:03d}")
        )
    return Dataset(tuple(graphs), feature_dim, "tiny").validate()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
