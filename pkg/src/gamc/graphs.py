"""Propagation-graph data model and its NDJSON on-disk format.

One news item is one graph: node 0 carries the news-content embedding, the
remaining nodes carry user embeddings, and undirected edges record who
forwarded what. Files hold one JSON object per line, with an optional meta
header line; see save_dataset for the exact layout. Loading validates every
invariant and rejects bad records rather than repairing them.
"""

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DataError

LABELS = ("fake", "real")


@dataclass(frozen=True)
class PropagationGraph:
    id: str
    num_nodes: int
    edges: tuple  # undirected (u, v) pairs
    features: np.ndarray  # num_nodes x feature_dim, float64
    label: Optional[str] = None

    @property
    def feature_dim(self):
        return self.features.shape[1]

    def validate(self):
        gid = self.id
        if self.num_nodes < 1:
            raise DataError(f"graph {gid!r}: num_nodes must be >= 1")
        if self.features.shape[0] != self.num_nodes:
            raise DataError(
                f"graph {gid!r}: features have {self.features.shape[0]} rows "
                f"for {self.num_nodes} nodes"
            )
        if self.features.ndim != 2 or self.features.shape[1] < 1:
            raise DataError(f"graph {gid!r}: features must be num_nodes x feature_dim")
        if not np.isfinite(self.features).all():
            raise DataError(f"graph {gid!r}: non-finite feature values")
        if self.label not in (None, *LABELS):
            raise DataError(f"graph {gid!r}: label must be 'fake', 'real', or absent")
        seen = set()
        for e in self.edges:
            u, v = e
            if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
                raise DataError(f"graph {gid!r}: edge {e} out of range")
            if u == v:
                raise DataError(f"graph {gid!r}: self-loop at node {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise DataError(f"graph {gid!r}: duplicate undirected edge {key}")
            seen.add(key)
        return self

    def without_label(self):
        if self.label is None:
            return self
        return PropagationGraph(self.id, self.num_nodes, self.edges, self.features, None)


@dataclass(frozen=True)
class AdjacencyCSR:
    """Symmetric CSR adjacency: both directions of every undirected edge."""

    num_nodes: int
    offsets: np.ndarray  # int64, num_nodes + 1
    cols: np.ndarray  # int64, sorted within each row

    def neighbors(self, i):
        return self.cols[self.offsets[i]: self.offsets[i + 1]]

    def degree(self, i):
        return int(self.offsets[i + 1] - self.offsets[i])


def to_csr(g):
    """Symmetric CSR of a validated graph; isolated nodes get empty rows."""
    n = g.num_nodes
    counts = np.zeros(n, dtype=np.int64)
    for u, v in g.edges:
        counts[u] += 1
        counts[v] += 1
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    cols = np.zeros(offsets[-1], dtype=np.int64)
    fill = offsets[:-1].copy()
    for u, v in g.edges:
        cols[fill[u]] = v
        fill[u] += 1
        cols[fill[v]] = u
        fill[v] += 1
    for i in range(n):
        cols[offsets[i]: offsets[i + 1]].sort()
    return AdjacencyCSR(n, offsets, cols)


@dataclass(frozen=True)
class Dataset:
    graphs: tuple
    feature_dim: int
    name: str = ""

    def __len__(self):
        return len(self.graphs)

    def validate(self):
        if not self.graphs:
            raise DataError(f"dataset {self.name!r}: no graphs")
        ids = set()
        for g in self.graphs:
            g.validate()
            if g.feature_dim != self.feature_dim:
                raise DataError(
                    f"graph {g.id!r}: feature_dim {g.feature_dim} != dataset {self.feature_dim}"
                )
            if g.id in ids:
                raise DataError(f"duplicate graph id {g.id!r}")
            ids.add(g.id)
        return self

    def without_labels(self):
        return Dataset(tuple(g.without_label() for g in self.graphs), self.feature_dim, self.name)

    def labeled(self):
        return [g for g in self.graphs if g.label is not None]


@dataclass(frozen=True)
class DatasetStats:
    num_news: int
    num_fake: int
    num_real: int
    num_nodes: int
    num_edges: int


def dataset_stats(ds):
    labels = [g.label for g in ds.graphs]
    return DatasetStats(
        num_news=len(ds.graphs),
        num_fake=sum(1 for y in labels if y == "fake"),
        num_real=sum(1 for y in labels if y == "real"),
        num_nodes=sum(g.num_nodes for g in ds.graphs),
        num_edges=sum(len(g.edges) for g in ds.graphs),
    )


def _remap_news_node(record, gid):
    """Move a nonzero news node to index 0 by swapping the two indices."""
    k = record["news_node"]
    n = record["num_nodes"]
    if not isinstance(k, int) or not (0 <= k < n):
        raise DataError(f"graph {gid!r}: news_node {k!r} out of range")
    if k == 0:
        return record
    swap = {0: k, k: 0}
    record["edges"] = [[swap.get(u, u), swap.get(v, v)] for u, v in record["edges"]]
    feats = record["features"]
    feats[0], feats[k] = feats[k], feats[0]
    return record


def _graph_from_record(record, lineno):
    if not isinstance(record, dict):
        raise DataError(f"line {lineno}: expected a JSON object")
    missing = [k for k in ("id", "num_nodes", "edges", "features") if k not in record]
    if missing:
        raise DataError(f"line {lineno}: missing fields {missing}")
    gid = record["id"]
    if "news_node" in record:
        record = _remap_news_node(record, gid)
    try:
        features = np.asarray(record["features"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DataError(f"graph {gid!r}: bad feature matrix ({exc})") from exc
    if features.ndim == 1:
        raise DataError(f"graph {gid!r}: features must be a list of rows")
    edges = []
    for e in record["edges"]:
        if not (isinstance(e, list) and len(e) == 2):
            raise DataError(f"graph {gid!r}: edge {e!r} is not a pair")
        edges.append((int(e[0]), int(e[1])))
    g = PropagationGraph(
        id=str(gid),
        num_nodes=int(record["num_nodes"]),
        edges=tuple(edges),
        features=features,
        label=record.get("label"),
    )
    return g.validate()


def load_dataset(path):
    """Parse and validate an NDJSON dataset file."""
    graphs = []
    meta = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from exc
            if lineno == 1 and isinstance(record, dict) and set(record) == {"meta"}:
                meta = record["meta"]
                continue
            graphs.append(_graph_from_record(record, lineno))
    if not graphs:
        raise DataError(f"{path}: no graphs")
    feature_dim = meta.get("feature_dim", graphs[0].feature_dim)
    ds = Dataset(tuple(graphs), int(feature_dim), str(meta.get("name", "")))
    return ds.validate()


def _graph_record(g):
    record = {
        "id": g.id,
        "num_nodes": g.num_nodes,
        "edges": [[int(u), int(v)] for u, v in g.edges],
        "features": g.features.tolist(),
    }
    if g.label is not None:
        record["label"] = g.label
    return record


def save_dataset(ds, path):
    """Write NDJSON with a meta header; bit-stable for identical input."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps({"meta": {"feature_dim": ds.feature_dim, "name": ds.name}},
                                separators=(",", ":")) + "\n")
            for g in ds.graphs:
                fh.write(json.dumps(_graph_record(g), separators=(",", ":")) + "\n")
    except OSError as exc:
        raise DataError(f"cannot write dataset to {path}: {exc}") from exc
