"""Dataset format, validation, CSR construction, and statistics."""

import json
import os

import numpy as np
import pytest

from conftest import dense_adjacency, random_graph
from gamc.errors import DataError
from gamc.graphs import (
    Dataset,
    PropagationGraph,
    dataset_stats,
    load_dataset,
    save_dataset,
    to_csr,
)
from gamc.synth import default_config, generate


def _write_lines(path, lines):
    path.write_text("\n".join(json.dumps(obj, separators=(",", ":")) for obj in lines) + "\n")


def test_load_single_graph(tmp_path):
    f = tmp_path / "one.ndjson"
    _write_lines(f, [{"id": "a", "num_nodes": 1, "edges": [],
                      "features": [[0.5, -1.5]], "label": "fake"}])
    ds = load_dataset(f)
    assert len(ds) == 1
    assert ds.feature_dim == 2
    assert ds.graphs[0].label == "fake"


def test_load_rejects_duplicate_undirected_edge(tmp_path):
    f = tmp_path / "dup.ndjson"
    _write_lines(f, [{"id": "dup-graph", "num_nodes": 2,
                      "edges": [[0, 1], [1, 0]],
                      "features": [[0.0], [0.0]]}])
    with pytest.raises(DataError, match="dup-graph"):
        load_dataset(f)


def test_load_rejects_self_loop(tmp_path):
    f = tmp_path / "loop.ndjson"
    _write_lines(f, [{"id": "x", "num_nodes": 2, "edges": [[1, 1]],
                      "features": [[0.0], [0.0]]}])
    with pytest.raises(DataError, match="self-loop"):
        load_dataset(f)


def test_load_rejects_bad_json_with_line_number(tmp_path):
    f = tmp_path / "bad.ndjson"
    f.write_text('{"id": "a", "num_nodes": 1, "edges": [], "features": [[0.0]]}\n{oops\n')
    with pytest.raises(DataError, match="line 2"):
        load_dataset(f)


def test_load_rejects_feature_row_mismatch(tmp_path):
    f = tmp_path / "rows.ndjson"
    _write_lines(f, [{"id": "m", "num_nodes": 3, "edges": [],
                      "features": [[0.0], [0.0]]}])
    with pytest.raises(DataError, match="m"):
        load_dataset(f)


def test_load_rejects_mixed_feature_dims(tmp_path):
    f = tmp_path / "dims.ndjson"
    _write_lines(f, [
        {"id": "a", "num_nodes": 1, "edges": [], "features": [[0.0, 1.0]]},
        {"id": "b", "num_nodes": 1, "edges": [], "features": [[0.0]]},
    ])
    with pytest.raises(DataError, match="feature_dim"):
        load_dataset(f)


def test_load_rejects_duplicate_ids(tmp_path):
    f = tmp_path / "ids.ndjson"
    _write_lines(f, [
        {"id": "a", "num_nodes": 1, "edges": [], "features": [[0.0]]},
        {"id": "a", "num_nodes": 1, "edges": [], "features": [[1.0]]},
    ])
    with pytest.raises(DataError, match="duplicate graph id"):
        load_dataset(f)


def test_news_node_remapped_to_zero(tmp_path):
    f = tmp_path / "remap.ndjson"
    _write_lines(f, [{"id": "r", "num_nodes": 3, "news_node": 2,
                      "edges": [[0, 2], [0, 1]],
                      "features": [[0.0], [1.0], [2.0]]}])
    g = load_dataset(f).graphs[0]
    # old node 2 (the news node) now sits at index 0
    assert g.features[0, 0] == 2.0
    assert g.features[2, 0] == 0.0
    assert set(frozenset(e) for e in g.edges) == {frozenset({2, 0}), frozenset({2, 1})}


def test_save_omits_absent_label_and_writes_empty_edges(tmp_path):
    g = PropagationGraph(id="a", num_nodes=1, edges=(),
                         features=np.array([[0.25]])).validate()
    ds = Dataset((g,), 1, "t")
    out = tmp_path / "out.ndjson"
    save_dataset(ds, out)
    lines = out.read_text().splitlines()
    assert json.loads(lines[0]) == {"meta": {"feature_dim": 1, "name": "t"}}
    record = json.loads(lines[1])
    assert record["edges"] == []
    assert "label" not in record


def test_round_trip_is_byte_identical(tmp_path):
    ds = generate(default_config(num_graphs=50, feature_dim=5, seed=9))
    f1 = tmp_path / "a.ndjson"
    f2 = tmp_path / "b.ndjson"
    save_dataset(ds, f1)
    save_dataset(load_dataset(f1), f2)
    assert f1.read_bytes() == f2.read_bytes()


def test_round_trip_values_identical(tmp_path):
    ds = generate(default_config(num_graphs=50, feature_dim=4, seed=2))
    f = tmp_path / "d.ndjson"
    save_dataset(ds, f)
    back = load_dataset(f)
    assert back.feature_dim == ds.feature_dim
    for g1, g2 in zip(ds.graphs, back.graphs):
        assert g1.id == g2.id
        assert g1.edges == g2.edges
        assert g1.label == g2.label
        assert np.array_equal(g1.features, g2.features)


def test_to_csr_path_graph():
    g = PropagationGraph(id="p", num_nodes=3, edges=((0, 1), (1, 2)),
                         features=np.zeros((3, 1))).validate()
    adj = to_csr(g)
    assert adj.neighbors(0).tolist() == [1]
    assert adj.neighbors(1).tolist() == [0, 2]
    assert adj.neighbors(2).tolist() == [1]


def test_to_csr_edgeless():
    g = PropagationGraph(id="e", num_nodes=4, edges=(), features=np.zeros((4, 1))).validate()
    adj = to_csr(g)
    assert all(adj.degree(i) == 0 for i in range(4))


def test_csr_reconstruction_matches_dense(rng):
    g = random_graph(rng, 10, 2, edge_prob=0.4)
    adj = to_csr(g)
    dense = np.zeros((10, 10))
    for i in range(10):
        for j in adj.neighbors(i):
            dense[i, j] = 1.0
    assert np.array_equal(dense, dense_adjacency(g))
    assert np.array_equal(dense, dense.T)


def test_csr_round_trips_edge_sets(rng):
    for seed in range(10):
        g = random_graph(np.random.default_rng(seed), 8, 1, edge_prob=0.5)
        adj = to_csr(g)
        recovered = set()
        for i in range(8):
            for j in adj.neighbors(i):
                recovered.add((min(i, int(j)), max(i, int(j))))
        assert recovered == {(min(u, v), max(u, v)) for u, v in g.edges}


def test_stats_counts(rng):
    ds = generate(default_config(num_graphs=21, feature_dim=3, seed=4))
    s = dataset_stats(ds)
    assert s.num_news == 21
    assert s.num_fake + s.num_real == 21
    assert abs(s.num_fake - s.num_real) <= 1
    assert s.num_nodes == sum(g.num_nodes for g in ds.graphs)
    assert s.num_edges == sum(len(g.edges) for g in ds.graphs)


POLITIFACT = os.environ.get("GAMC_POLITIFACT_NDJSON", "")


@pytest.mark.skipif(not POLITIFACT, reason="set GAMC_POLITIFACT_NDJSON to run")
def test_politifact_table_statistics():
    s = dataset_stats(load_dataset(POLITIFACT))
    assert (s.num_news, s.num_fake, s.num_real) == (314, 157, 157)
    assert (s.num_nodes, s.num_edges) == (41054, 40740)
