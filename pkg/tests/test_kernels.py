"""Backend parity and aggregation-vs-dense oracles."""

import itertools

import numpy as np
import pytest

from conftest import dense_adjacency, random_graph
from gamc import _kernels_py, kernels
from gamc.graphs import PropagationGraph, to_csr
from gamc.tensor import Tensor2, spmm_neighbors

try:
    from gamc import _kernels
except ImportError:
    _kernels = None

BACKENDS = [("python", _kernels_py)] + ([("cython", _kernels)] if _kernels else [])


def _all_graphs_up_to(max_nodes):
    """Every simple undirected graph with 1..max_nodes nodes."""
    for n in range(1, max_nodes + 1):
        pairs = list(itertools.combinations(range(n), 2))
        for bits in range(1 << len(pairs)):
            edges = tuple(p for k, p in enumerate(pairs) if bits >> k & 1)
            yield n, edges


@pytest.mark.parametrize("name,impl", BACKENDS)
def test_neighbor_sum_matches_dense_exhaustive_small(name, impl):
    rng = np.random.default_rng(11)
    for n, edges in _all_graphs_up_to(4):
        g = PropagationGraph(id="x", num_nodes=n, edges=edges,
                             features=np.zeros((n, 1))).validate()
        adj = to_csr(g)
        h = rng.standard_normal((n, 3))
        got = impl.neighbor_sum(adj.offsets, adj.cols, h)
        assert np.max(np.abs(got - dense_adjacency(g) @ h)) < 1e-12


@pytest.mark.parametrize("name,impl", BACKENDS)
@pytest.mark.parametrize("n", [5, 6, 7, 8])
def test_neighbor_sum_matches_dense_random(name, impl, n):
    for seed in range(50):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, n, 2, edge_prob=rng.uniform(0.1, 0.9))
        adj = to_csr(g)
        h = rng.standard_normal((n, 4))
        got = impl.neighbor_sum(adj.offsets, adj.cols, h)
        assert np.max(np.abs(got - dense_adjacency(g) @ h)) < 1e-12


@pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")
def test_backends_bit_identical():
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = random_graph(rng, 30, 2, edge_prob=0.2)
        adj = to_csr(g)
        h = rng.standard_normal((30, 16))
        a = _kernels.neighbor_sum(adj.offsets, adj.cols, h)
        b = _kernels_py.neighbor_sum(adj.offsets, adj.cols, h)
        assert np.array_equal(a, b)


def test_spmm_matches_dense_oracle_on_random_6_node(rng):
    g = random_graph(rng, 6, 2, edge_prob=0.5)
    h = rng.standard_normal((6, 5))
    out = spmm_neighbors(to_csr(g), Tensor2(h))
    assert np.max(np.abs(out.data - dense_adjacency(g) @ h)) < 1e-12


def test_selected_backend_is_exported():
    assert kernels.BACKEND in ("cython", "python")
    assert callable(kernels.neighbor_sum)
