"""Command-line front end: train, eval, compare, gradcheck, spec-validate.

Exit codes: 0 success, 1 domain error (message on stderr), 2 usage error
(argparse prints usage). Flag values override config-file values, which
override built-in defaults; every training run writes a manifest that can be
fed back through --config to reproduce the run byte for byte.
"""

import argparse
import hashlib
import os
import sys
from pathlib import Path

import numpy as np

from . import baseline, graph, modelspec, report
from .data import load_csv, prepare_split, train_test_split, transform, Normalizer
from .errors import MldnnError
from .metrics import EvalPair, metrics_report
from .train import TrainConfig, evaluate, grad_check, train_loop

CHECKPOINT_NAME = "checkpoint.mldnn"
HISTORY_NAME = "history.csv"
MANIFEST_NAME = "manifest.txt"

_DEFAULTS = {
    "seed": None,  # resolved via MLDNN_SEED, then 0
    "epochs": 1000,
    "learning_rate": 0.001,
    "batch_size": 32,
    "validation_fraction": 0.2,
    "shuffle_each_epoch": True,
    "spec": None,
    "data": None,
}

_TYPES = {
    "seed": int,
    "epochs": int,
    "learning_rate": float,
    "batch_size": int,
    "validation_fraction": float,
}


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_config(path) -> dict:
    """Flat key=value file ('#' comments); unknown keys are ignored so a
    manifest doubles as a config file."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise MldnnError(f"{path}: line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _resolve(args, config_values) -> dict:
    resolved = dict(_DEFAULTS)
    for key in resolved:
        if key in config_values:
            raw = config_values[key]
            if key == "shuffle_each_epoch":
                resolved[key] = raw.lower() == "true"
            elif key in _TYPES:
                resolved[key] = _TYPES[key](raw)
            elif raw != "default":
                resolved[key] = raw
    flag_map = {
        "seed": args.seed,
        "epochs": args.epochs,
        "learning_rate": args.lr,
        "batch_size": args.batch_size,
        "validation_fraction": args.validation_fraction,
        "spec": args.spec,
        "data": args.data,
    }
    for key, value in flag_map.items():
        if value is not None:
            resolved[key] = value
    if resolved["seed"] is None:
        resolved["seed"] = int(os.environ.get("MLDNN_SEED", "0"))
    return resolved


def _load_architecture(spec_path):
    if spec_path is None:
        return modelspec.default_spec()
    return modelspec.parse_spec(Path(spec_path).read_text(encoding="utf-8"))


def _cmd_train(args) -> int:
    config_values = read_config(args.config) if args.config else {}
    cfg = _resolve(args, config_values)
    if cfg["data"] is None:
        raise MldnnError("train: no dataset given (use --data or a config file)")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = _load_architecture(cfg["spec"])
    spec_text = modelspec.render_spec(spec)

    dataset = load_csv(cfg["data"])
    split, nz = prepare_split(
        dataset, seed=cfg["seed"], validation_fraction=cfg["validation_fraction"]
    )
    g = graph.build_from_spec(spec, seed=cfg["seed"])
    train_cfg = TrainConfig(
        epochs=cfg["epochs"],
        learning_rate=cfg["learning_rate"],
        batch_size=cfg["batch_size"],
        validation_fraction=cfg["validation_fraction"],
        seed=cfg["seed"],
        shuffle_each_epoch=cfg["shuffle_each_epoch"],
    )
    train_cfg.validate()

    g, history = train_loop(g, split, train_cfg)

    checkpoint_path = out_dir / CHECKPOINT_NAME
    history_path = out_dir / HISTORY_NAME
    n_train = split.train.n + split.validation.n
    extras = {
        "normalizer.mu": nz.mu,
        "normalizer.sigma": nz.sigma,
        "split.meta": np.array(
            [[float(cfg["seed"]), float(n_train), cfg["validation_fraction"]]]
        ),
    }
    graph.checkpoint_save(g, checkpoint_path, extras=extras)
    history.to_csv(history_path)

    manifest_path = out_dir / MANIFEST_NAME
    lines = [
        f"data={cfg['data']}",
        f"data_sha256={_sha256(cfg['data'])}",
        f"spec={cfg['spec'] or 'default'}",
        f"spec_sha256={hashlib.sha256(spec_text.encode()).hexdigest()}",
        f"seed={cfg['seed']}",
        f"epochs={cfg['epochs']}",
        f"learning_rate={cfg['learning_rate']!r}",
        f"batch_size={cfg['batch_size']}",
        f"validation_fraction={cfg['validation_fraction']!r}",
        f"shuffle_each_epoch={'true' if cfg['shuffle_each_epoch'] else 'false'}",
        f"checkpoint={checkpoint_path}",
        f"history={history_path}",
    ]
    manifest_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    last = history.records[-1]
    print(
        f"trained {cfg['epochs']} epochs in {history.duration_seconds:.1f}s: "
        f"train mse {last.train_mse:.3f}, val mse {last.val_mse:.3f}"
    )
    print(f"wrote {checkpoint_path}, {history_path}, {manifest_path}")
    return 0


def _restore(checkpoint_path, data_path):
    """Rebuild (graph, normalized split) from a checkpoint and a dataset."""
    g, extras = graph.checkpoint_load(checkpoint_path)
    for key in ("normalizer.mu", "normalizer.sigma", "split.meta"):
        if key not in extras:
            raise MldnnError(f"checkpoint has no {key!r}; was it written by train?")
    nz = Normalizer(mu=extras["normalizer.mu"], sigma=extras["normalizer.sigma"])
    seed = int(extras["split.meta"][0, 0])
    n_train = int(extras["split.meta"][0, 1])
    dataset = load_csv(data_path)
    train, test = train_test_split(dataset, seed=seed, n_train=n_train)
    test = test.with_features(transform(nz, test.features))
    train = train.with_features(transform(nz, train.features))
    return g, train, test


def _cmd_eval(args) -> int:
    g, train, test = _restore(args.checkpoint, args.data)
    rep = evaluate(g, test.features, test.targets)
    print(f"test: {rep}")
    if args.report_dir:
        out = Path(args.report_dir)
        out.mkdir(parents=True, exist_ok=True)
        pair = EvalPair(test.targets, g.forward(test.features, mode="infer"))
        report.regression_scatter(pair, out / "regression.csv", out / "regression.svg")
        report.error_histogram(pair, out / "error_hist.csv", out / "error_hist.svg")
        report.true_vs_predicted_table(pair, out / "true_vs_predicted.csv")
        print(f"wrote report artifacts to {out}")
    return 0


def _cmd_compare(args) -> int:
    g, train, test = _restore(args.checkpoint, args.data)
    nn_report = evaluate(g, test.features, test.targets)
    _, ols_pred = baseline.ols_fit_predict(train.features, train.targets, test.features)
    ols_report = metrics_report(test.targets, ols_pred)
    rows = [
        report.ComparisonRow(
            "Multi-level dense NN", nn_report.r2, nn_report.mse,
            nn_report.rmse, nn_report.mae, "computed",
        ),
        report.ComparisonRow(
            "Linear Regression", ols_report.r2, ols_report.mse,
            ols_report.rmse, ols_report.mae, "computed",
        ),
    ]
    report.comparison_table(rows, args.out)
    print(f"wrote comparison table to {args.out}")
    return 0


def _cmd_gradcheck(args) -> int:
    seed = args.seed if args.seed is not None else int(os.environ.get("MLDNN_SEED", "0"))
    spec = _load_architecture(args.spec)
    g = graph.build_from_spec(spec, seed=seed)
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(4, g.input_width))
    y = rng.normal(size=(4, g.output_width))
    result = grad_check(g, x, y)
    status = "pass" if result.passed else "FAIL"
    print(
        f"gradcheck {status}: max relative error {result.max_relative_error:.3e}"
        + (f" (worst: {result.worst_tensor})" if result.worst_tensor else "")
    )
    return 0 if result.passed else 1


def _cmd_spec_validate(args) -> int:
    modelspec.parse_spec(Path(args.file).read_text(encoding="utf-8"))
    print(f"{args.file}: ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mldnn",
        description="Train and evaluate the multi-level dense-layer network.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model and write run artifacts")
    p.add_argument("--data", help="dataset CSV")
    p.add_argument("--spec", help="architecture spec file (default: built-in)")
    p.add_argument("--config", help="key=value config file (a manifest works)")
    p.add_argument("--seed", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--lr", type=float)
    p.add_argument("--validation-fraction", type=float, dest="validation_fraction")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on the test split")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report-dir", dest="report_dir")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("compare", help="write the algorithm comparison table")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("gradcheck", help="finite-difference gradient check")
    p.add_argument("--spec")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_gradcheck)

    p = sub.add_parser("spec-validate", help="parse and validate a spec file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_spec_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MldnnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
