"""Command-line interface: reproducible experiments end to end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
GAMC_LOG in {error, info, debug} controls verbosity.
"""

import argparse
import logging
import os
import sys

import numpy as np

from .errors import ContractError, DataError, GamcError, NumericError, ShapeError
from .evaluation import (
    format_metrics_table,
    multi_run,
    sweep,
    train_svm,
    write_metrics_csv,
    write_sweep_csv,
)
from .graphs import dataset_stats, load_dataset, save_dataset
from .model import embed_clean
from .synth import default_config, generate
from .training import TrainConfig, load_checkpoint, save_checkpoint, train, write_trace

log = logging.getLogger("gamc")

DEFAULT_RATES = tuple(round(0.1 * k, 1) for k in range(1, 10))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors exit 1; argparse's default of 2 is reserved for data errors
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_train_flags(p):
    p.add_argument("--epochs", type=int, default=80)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--mask-rate", type=float, default=0.5)
    p.add_argument("--edge-drop-rate", type=float, default=0.2)
    p.add_argument("--hidden-dim", type=int, default=512)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--ablation", choices=["full", "no-aug", "no-rec", "no-con"], default="full")
    p.add_argument("--static-views", action="store_true",
                   help="sample augmented views once per run instead of per epoch")
    p.add_argument("--rec-scope", choices=["all-nodes", "masked-only"], default="all-nodes")
    p.add_argument("--cosine", choices=["matrix", "row-mean"], default="matrix")
    p.add_argument("--decoder-layers", type=int, default=1)


def _train_config(args):
    return TrainConfig(
        epochs=args.epochs,
        lr=args.lr,
        alpha=args.alpha,
        mask_rate=args.mask_rate,
        edge_drop_rate=args.edge_drop_rate,
        hidden_dim=args.hidden_dim,
        seed=args.seed,
        batch_size=args.batch_size,
        ablation=args.ablation.replace("-", "_"),
        static_views=args.static_views,
        rec_scope=args.rec_scope.replace("-", "_"),
        cosine=args.cosine.replace("-", "_"),
        decoder_layers=args.decoder_layers,
    ).validate()


def _parse_rates(text):
    try:
        rates = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ContractError(f"bad rate list {text!r}") from exc
    if not rates:
        raise ContractError("rate list is empty")
    return rates


def build_parser():
    parser = _Parser(prog="gamc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[], help="generate a labeled synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--num-graphs", type=int, default=200)
    p.add_argument("--feature-dim", type=int, default=32)
    p.add_argument("--delta", type=float, default=3.0,
                   help="regime center separation in units of sigma")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--balance", type=float, default=0.5)
    p.add_argument("--graph-noise-frac", type=float, default=0.0)
    p.add_argument("--fake-branching", type=float, default=2.2)
    p.add_argument("--real-branching", type=float, default=1.8)
    p.add_argument("--fake-depth", type=float, default=2.5)
    p.add_argument("--real-depth", type=float, default=2.5)
    p.add_argument("--name", default="synth")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("train", help="train the autoencoder and write a checkpoint")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--trace", help="per-epoch loss CSV path")
    p.add_argument("--seed", type=int, default=0)
    _add_train_flags(p)

    p = sub.add_parser("embed", help="write graph embeddings from a checkpoint")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("classify", help="fit the probe on labeled graphs, predict all")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--train-frac", type=float, default=0.75)
    p.add_argument("--svm-c", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("eval", help="multi-run train + probe evaluation")
    p.add_argument("--data", required=True)
    p.add_argument("--out", help="per-run metrics CSV path")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--train-frac", type=float, default=0.75)
    p.add_argument("--svm-c", type=float, default=1.0)
    p.add_argument("--untrained", action="store_true",
                   help="score a random-weights encoder instead of training")
    p.add_argument("--threads", type=int, default=1, help="worker process cap")
    p.add_argument("--seed", type=int, default=0)
    _add_train_flags(p)

    p = sub.add_parser("sweep", help="grid over mask and edge-drop rates")
    p.add_argument("--data", required=True)
    p.add_argument("--eval-data", help="dataset for the probe (defaults to --data)")
    p.add_argument("--out", required=True)
    p.add_argument("--mask-rates", default=",".join(str(r) for r in DEFAULT_RATES))
    p.add_argument("--edge-drop-rates", default=",".join(str(r) for r in DEFAULT_RATES))
    p.add_argument("--train-frac", type=float, default=0.75)
    p.add_argument("--svm-c", type=float, default=1.0)
    p.add_argument("--threads", type=int, default=1, help="worker process cap")
    p.add_argument("--seed", type=int, default=0)
    _add_train_flags(p)

    p = sub.add_parser("stats", help="dataset summary")
    p.add_argument("--data", required=True)

    return parser


def _cmd_synth(args):
    cfg = default_config(
        num_graphs=args.num_graphs,
        feature_dim=args.feature_dim,
        delta=args.delta,
        sigma=args.sigma,
        seed=args.seed,
        branching=(args.fake_branching, args.real_branching),
        depth=(args.fake_depth, args.real_depth),
        class_balance=args.balance,
        graph_noise_frac=args.graph_noise_frac,
        name=args.name,
    )
    ds = generate(cfg)
    save_dataset(ds, args.out)
    log.info("wrote %d graphs to %s", len(ds), args.out)


def _cmd_train(args):
    cfg = _train_config(args)
    ds = load_dataset(args.data)
    params, report = train(cfg, ds)
    save_checkpoint(params, args.out)
    report.checkpoint_path = args.out
    if args.trace:
        write_trace(report, args.trace)
    last = report.epoch_losses[-1]
    log.info("trained %d epochs in %.1fs, final loss %.6f", cfg.epochs,
             report.wall_time, last.l_total)


def _cmd_embed(args):
    ds = load_dataset(args.data)
    params = load_checkpoint(args.model)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id," + ",".join(f"f{i}" for i in range(params.hidden_dim)) + "\n")
        for g in ds.graphs:
            vec = embed_clean(params, g)
            fh.write(g.id + "," + ",".join(repr(x) for x in vec) + "\n")


def _cmd_classify(args):
    ds = load_dataset(args.data)
    params = load_checkpoint(args.model)
    labeled = ds.labeled()
    if not labeled:
        raise DataError("classify needs at least some labeled graphs to fit the probe")
    emb = np.stack([embed_clean(params, g) for g in labeled])
    svm = train_svm(emb, [g.label for g in labeled], c=args.svm_c)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id,pred,margin\n")
        for g in ds.graphs:
            margin = float(svm.decision(embed_clean(params, g)[None, :])[0])
            pred = "fake" if margin > 0 else "real"
            fh.write(f"{g.id},{pred},{margin!r}\n")


def _cmd_eval(args):
    cfg = _train_config(args)
    ds = load_dataset(args.data)
    result = multi_run(cfg, ds, runs=args.runs, train_frac=args.train_frac,
                       svm_c=args.svm_c, untrained=args.untrained,
                       workers=max(1, args.threads))
    print(format_metrics_table(result))
    if args.out:
        write_metrics_csv(result.runs, args.out)


def _cmd_sweep(args):
    cfg = _train_config(args)
    ds = load_dataset(args.data)
    eval_ds = load_dataset(args.eval_data) if args.eval_data else None
    rows = sweep(_parse_rates(args.mask_rates), _parse_rates(args.edge_drop_rates),
                 cfg, ds, eval_dataset=eval_ds, train_frac=args.train_frac,
                 svm_c=args.svm_c, workers=max(1, args.threads))
    write_sweep_csv(rows, args.out)
    log.info("wrote %d sweep rows to %s", len(rows), args.out)


def _cmd_stats(args):
    ds = load_dataset(args.data)
    s = dataset_stats(ds)
    name = ds.name or os.path.basename(args.data)
    print(f"dataset    {name}")
    print(f"news       {s.num_news}")
    print(f"fake       {s.num_fake}")
    print(f"real       {s.num_real}")
    print(f"nodes      {s.num_nodes}")
    print(f"edges      {s.num_edges}")
    print(f"feature_dim {ds.feature_dim}")


_COMMANDS = {
    "synth": _cmd_synth,
    "train": _cmd_train,
    "embed": _cmd_embed,
    "classify": _cmd_classify,
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "stats": _cmd_stats,
}


def _setup_logging():
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("GAMC_LOG", "error").lower(), logging.ERROR
    )
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        _COMMANDS[args.command](args)
    except (DataError, ShapeError, ContractError, FileNotFoundError) as exc:
        print(f"gamc {args.command}: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"gamc {args.command}: {exc}", file=sys.stderr)
        return 3
    except GamcError as exc:
        print(f"gamc {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
