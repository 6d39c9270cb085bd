"""Generator invariants: trees, balance, determinism, separability floor."""

import numpy as np
import pytest

from gamc.errors import ContractError
from gamc.graphs import save_dataset, to_csr
from gamc.synth import RegimeConfig, SynthConfig, default_config, generate


def _is_connected_tree(g):
    if len(g.edges) != g.num_nodes - 1:
        return False
    adj = to_csr(g)
    seen = {0}
    frontier = [0]
    while frontier:
        node = frontier.pop()
        for nb in adj.neighbors(node):
            if int(nb) not in seen:
                seen.add(int(nb))
                frontier.append(int(nb))
    return len(seen) == g.num_nodes


def test_every_graph_is_a_connected_tree():
    ds = generate(default_config(num_graphs=60, feature_dim=4, seed=7))
    for g in ds.graphs:
        assert _is_connected_tree(g), g.id


def test_balance_two_graphs():
    ds = generate(default_config(num_graphs=2, feature_dim=3, seed=0))
    labels = sorted(g.label for g in ds.graphs)
    assert labels == ["fake", "real"]


def test_balance_within_one():
    for n in (7, 20, 33):
        ds = generate(default_config(num_graphs=n, feature_dim=3, seed=1))
        fake = sum(1 for g in ds.graphs if g.label == "fake")
        assert abs(fake - (n - fake)) <= 1


def test_depth_zero_gives_single_nodes():
    cfg = default_config(num_graphs=10, feature_dim=3, seed=2, depth=(0.0, 0.0))
    ds = generate(cfg)
    assert all(g.num_nodes == 1 for g in ds.graphs)


def test_same_seed_byte_identical_file(tmp_path):
    cfg = default_config(num_graphs=25, feature_dim=4, seed=11)
    f1, f2 = tmp_path / "a.ndjson", tmp_path / "b.ndjson"
    save_dataset(generate(cfg), f1)
    save_dataset(generate(cfg), f2)
    assert f1.read_bytes() == f2.read_bytes()


def test_centroid_oracle_on_mean_features():
    """delta=4 sigma keeps classes separable by a nearest-centroid rule."""
    ds = generate(default_config(num_graphs=100, feature_dim=16, delta=4.0, seed=5))
    means = np.stack([g.features.mean(axis=0) for g in ds.graphs])
    labels = np.array([g.label for g in ds.graphs])
    c_fake = means[labels == "fake"].mean(axis=0)
    c_real = means[labels == "real"].mean(axis=0)
    pred = np.where(
        np.linalg.norm(means - c_fake, axis=1) < np.linalg.norm(means - c_real, axis=1),
        "fake", "real",
    )
    assert float(np.mean(pred == labels)) >= 0.95


def test_config_validation():
    center = np.zeros(3)
    with pytest.raises(ContractError):
        SynthConfig(0, RegimeConfig(1, 1, center, 1.0),
                    RegimeConfig(1, 1, center + 1, 1.0), feature_dim=3).validate()
    with pytest.raises(ContractError):
        SynthConfig(4, RegimeConfig(1, 1, center, 1.0),
                    RegimeConfig(1, 1, center.copy(), 1.0), feature_dim=3).validate()
    with pytest.raises(ContractError):
        SynthConfig(4, RegimeConfig(1, 1, center, 0.0),
                    RegimeConfig(1, 1, center + 1, 1.0), feature_dim=3).validate()
    with pytest.raises(ContractError):
        default_config(4, delta=0.0)


def test_ids_unique_and_dataset_valid():
    ds = generate(default_config(num_graphs=40, feature_dim=3, seed=9))
    assert len({g.id for g in ds.graphs}) == 40
    ds.validate()
