"""Downstream probe and metrics.

Representation quality is measured by freezing the encoder, embedding every
graph, fitting a linear SVM on a stratified train split, and scoring the
test split. "fake" is the positive class throughout. multi_run repeats the
whole pipeline with independent derived seeds and reports mean and sample
standard deviation per metric; sweep does the same over a (mask rate, edge
drop rate) grid.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ContractError, DataError
from .model import embed_clean, init_params
from .rng import RUN, SPLIT, SWEEP, derive_seed, stream
from .training import train

SVM_ITERATIONS = 2000
SVM_LR = 1e-2
SVM_L2 = 1e-4  # base ridge weight; C scales it down, sklearn-style


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int


def metrics_from_predictions(y_true, y_pred):
    """Confusion counts and derived metrics with fake as the positive class."""
    if len(y_true) != len(y_pred) or not y_true:
        raise ContractError("metrics need equal-length, nonempty label lists")
    tp = sum(1 for t, p in zip(y_true, y_pred) if t == "fake" and p == "fake")
    fp = sum(1 for t, p in zip(y_true, y_pred) if t == "real" and p == "fake")
    tn = sum(1 for t, p in zip(y_true, y_pred) if t == "real" and p == "real")
    fn = sum(1 for t, p in zip(y_true, y_pred) if t == "fake" and p == "real")
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(
        accuracy=(tp + tn) / len(y_true),
        precision=precision,
        recall=recall,
        f1=f1,
        tp=tp, fp=fp, tn=tn, fn=fn,
    )


def split_stratified(dataset, train_frac, seed):
    """Disjoint, exhaustive (train_ids, test_ids) preserving class shares.

    Per class, round(train_frac * count) graphs go to train (clamped so both
    sides stay nonempty when the class has at least two graphs).
    """
    if not (0.0 < train_frac < 1.0):
        raise ContractError(f"train_frac must lie in (0,1), got {train_frac}")
    by_label = {}
    for g in dataset.graphs:
        if g.label is None:
            raise DataError(f"graph {g.id!r} is unlabeled; stratified split needs labels")
        by_label.setdefault(g.label, []).append(g.id)
    rng = stream(seed, SPLIT)
    train_ids, test_ids = [], []
    for label in sorted(by_label):
        ids = by_label[label]
        n_train = int(np.floor(train_frac * len(ids) + 0.5))
        if len(ids) >= 2:
            n_train = min(max(n_train, 1), len(ids) - 1)
        order = rng.permutation(len(ids))
        train_ids.extend(ids[i] for i in order[:n_train])
        test_ids.extend(ids[i] for i in order[n_train:])
    return train_ids, test_ids


@dataclass
class LinearSvm:
    """Linear SVM with squared hinge, fit by deterministic full-batch GD."""

    weights: np.ndarray
    bias: float
    c: float
    mean: np.ndarray
    scale: np.ndarray
    trained: bool = True

    def decision(self, embeddings):
        x = (np.asarray(embeddings, dtype=np.float64) - self.mean) / self.scale
        return x @ self.weights + self.bias

    def predict(self, embeddings):
        """Label per row; ties on the boundary go to 'real'."""
        return ["fake" if s > 0 else "real" for s in self.decision(embeddings)]


def train_svm(embeddings, labels, c=1.0):
    """Fit on standardized embeddings; labels are 'fake' (+1) / 'real' (-1)."""
    x = np.asarray(embeddings, dtype=np.float64)
    if not np.isfinite(x).all():
        raise ContractError("svm: non-finite embeddings")
    y = np.array([1.0 if lab == "fake" else -1.0 for lab in labels])
    if len(set(labels)) < 2:
        raise ContractError("svm needs at least one example of each class")
    n = x.shape[0]
    mean = x.mean(axis=0)
    sd = np.maximum(x.std(axis=0), 1e-12)
    xs = (x - mean) / sd

    w = np.zeros(x.shape[1])
    b = 0.0
    for _ in range(SVM_ITERATIONS):
        slack = np.maximum(0.0, 1.0 - y * (xs @ w + b))
        gw = (SVM_L2 / c) * w - (2.0 / n) * (xs.T @ (y * slack))
        gb = -(2.0 / n) * np.sum(y * slack)
        w = w - SVM_LR * gw
        b = b - SVM_LR * gb
    return LinearSvm(weights=w, bias=float(b), c=c, mean=mean, scale=sd)


def squared_hinge(svm, embeddings, labels):
    y = np.array([1.0 if lab == "fake" else -1.0 for lab in labels])
    slack = np.maximum(0.0, 1.0 - y * svm.decision(embeddings))
    return float(np.mean(slack * slack))


def evaluate(params, svm, graphs):
    """Embed labeled graphs with the frozen encoder and score the probe."""
    y_true = []
    embeddings = []
    for g in graphs:
        if g.label is None:
            raise DataError(f"graph {g.id!r} is unlabeled; evaluation needs labels")
        y_true.append(g.label)
        embeddings.append(embed_clean(params, g))
    return metrics_from_predictions(y_true, svm.predict(np.stack(embeddings)))


def probe_metrics(params, dataset, train_frac, svm_c, split_seed):
    """Split, fit the SVM on train embeddings, and score the test split."""
    train_ids, test_ids = split_stratified(dataset, train_frac, split_seed)
    by_id = {g.id: g for g in dataset.graphs}
    train_graphs = [by_id[i] for i in train_ids]
    test_graphs = [by_id[i] for i in test_ids]
    emb = np.stack([embed_clean(params, g) for g in train_graphs])
    svm = train_svm(emb, [g.label for g in train_graphs], c=svm_c)
    return evaluate(params, svm, test_graphs)


METRIC_FIELDS = ("accuracy", "precision", "recall", "f1")


@dataclass
class MultiRunResult:
    runs: list  # Metrics per run
    mean: dict  # metric name -> mean over runs
    std: dict  # metric name -> sample standard deviation (0 for a single run)


def _summarize(runs):
    mean, std = {}, {}
    for name in METRIC_FIELDS:
        vals = np.array([getattr(m, name) for m in runs])
        mean[name] = float(vals.mean())
        std[name] = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
    return MultiRunResult(list(runs), mean, std)


def _one_run(args):
    cfg, dataset, train_frac, svm_c, run_index, untrained = args
    run_seed = derive_seed(cfg.seed, RUN, run_index)
    run_cfg = replace(cfg, seed=run_seed)
    if untrained:
        params = init_params(dataset.feature_dim, cfg.hidden_dim, cfg.decoder_layers,
                             seed=run_seed)
    else:
        params, _ = train(run_cfg, dataset)
    return probe_metrics(params, dataset, train_frac, svm_c,
                         split_seed=derive_seed(run_seed, SPLIT))


def multi_run(cfg, dataset, runs=10, train_frac=0.75, svm_c=1.0, untrained=False, workers=1):
    """Independent seeded repetitions of train -> split -> probe -> score.

    The encoder always trains label-blind on the full dataset; labels only
    reach the probe. With untrained=True the encoder keeps its random
    initialization (same init and same splits as the trained runs), which is
    the random-weights baseline.
    """
    if runs < 1:
        raise ContractError(f"runs must be >= 1, got {runs}")
    jobs = [(cfg, dataset, train_frac, svm_c, r, untrained) for r in range(runs)]
    if workers > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_run, jobs))
    else:
        results = [_one_run(job) for job in jobs]
    return _summarize(results)


@dataclass(frozen=True)
class SweepRow:
    mask_rate: float
    edge_drop_rate: float
    accuracy: float
    precision: float
    recall: float
    f1: float


def _one_cell(args):
    base_cfg, dataset, eval_dataset, train_frac, svm_c, i, j, lam, gamma = args
    cell_seed = derive_seed(base_cfg.seed, SWEEP, i, j)
    cfg = replace(base_cfg, mask_rate=lam, edge_drop_rate=gamma, seed=cell_seed)
    params, _ = train(cfg, dataset)
    m = probe_metrics(params, eval_dataset, train_frac, svm_c,
                      split_seed=derive_seed(cell_seed, SPLIT))
    return SweepRow(lam, gamma, m.accuracy, m.precision, m.recall, m.f1)


def sweep(mask_rates, edge_drop_rates, base_cfg, dataset, eval_dataset=None,
          train_frac=0.75, svm_c=1.0, workers=1):
    """Train one model per (mask rate, edge drop rate) cell and score each.

    Cells run under independent derived seeds, so results do not depend on
    execution order or worker count. Rows come back in grid order.
    """
    for r in list(mask_rates) + list(edge_drop_rates):
        if not (0.0 <= r <= 1.0):
            raise ContractError(f"sweep rates must lie in [0,1], got {r}")
    eval_dataset = dataset if eval_dataset is None else eval_dataset
    jobs = [
        (base_cfg, dataset, eval_dataset, train_frac, svm_c, i, j, lam, gamma)
        for i, lam in enumerate(mask_rates)
        for j, gamma in enumerate(edge_drop_rates)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_one_cell, jobs))
    return [_one_cell(job) for job in jobs]


def write_metrics_csv(runs, path):
    """Per-run metrics CSV: run,acc,prec,rec,f1."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("run,acc,prec,rec,f1\n")
        for r, m in enumerate(runs, start=1):
            fh.write(f"{r},{m.accuracy!r},{m.precision!r},{m.recall!r},{m.f1!r}\n")


def write_sweep_csv(rows, path):
    """Sweep grid CSV: lambda,gamma,acc,prec,rec,f1."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("lambda,gamma,acc,prec,rec,f1\n")
        for row in rows:
            fh.write(
                f"{row.mask_rate!r},{row.edge_drop_rate!r},{row.accuracy!r},"
                f"{row.precision!r},{row.recall!r},{row.f1!r}\n"
            )


def format_metrics_table(result):
    """Aligned mean +/- std table in the style used for reporting runs."""
    lines = [f"{'metric':<10}{'mean':>10}{'std':>10}"]
    for name in METRIC_FIELDS:
        lines.append(f"{name:<10}{result.mean[name]:>10.4f}{result.std[name]:>10.4f}")
    return "\n".join(lines)
