"""Command-line entry point: ``nfvr {prone,featurize,train-eval,sweep,synth}``.

Exit codes: 0 ok, 1 usage error, 2 data error, 3 internal error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .experiment import ExperimentConfig, SplitError, run_experiment, sweep, write_sweep_csv
from .featurize import FeatureConfig, Mode, featurize_all
from .graph import GraphFormatError, SchemaOptions, discretize_all, load_graph, write_graph
from .proclivity import GenerativeFunction, export_heatmap, export_json, prone_matrix
from .synth import planted_partition

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
DEFAULT_SEED = 42

logger = logging.getLogger("nfvr")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _names(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("PROCLIVITY_THREADS")
    return int(env) if env else 1


def _add_graph_args(p, required=True):
    p.add_argument("--edges", required=required, help="edge list: two node tokens per line")
    p.add_argument("--attributes", required=required,
                   help="attribute CSV with header node,<attr1>,...; '?' marks missing")
    p.add_argument("--nominal", type=_names, default=None,
                   help="comma-separated columns to treat as nominal even if numeric")
    p.add_argument("--all-nominal", action="store_true", default=None,
                   help="treat every column as nominal")
    p.add_argument("--bins", type=int, default=None, help="bins for numeric columns (default 5)")
    p.add_argument("--binning", choices=["width", "quantile"], default=None,
                   help="equal-width (default) or equal-frequency bins")


def _add_feature_args(p):
    p.add_argument("--target", default=None, help="attribute to predict")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=None,
                   help="feature map (default nfvr)")
    p.add_argument("--h", type=int, default=None, help="hop depth (default 1)")
    p.add_argument("--w", type=_floats, default=None,
                   help="comma-separated hop weights, one per hop (default 1,0.5,0.25...)")
    p.add_argument("--f", choices=[g.value for g in GenerativeFunction], default=None,
                   help="generative function for proclivity (default xlogx)")
    p.add_argument("--exclude-missing", action="store_true", default=None,
                   help="drop the missing level from mixing matrices")
    p.add_argument("--no-deg-norm", dest="degree_normalize", action="store_false", default=None,
                   help="skip the final division by node degree")
    p.add_argument("--threads", type=int, default=None,
                   help="worker cap (fallback: PROCLIVITY_THREADS, else 1)")


def _add_experiment_args(p):
    _add_graph_args(p, required=False)
    _add_feature_args(p)
    p.add_argument("--config", help="ExperimentConfig JSON; explicit flags override its fields")
    p.add_argument("--model", choices=["knn", "nb", "dt", "svm", "lr", "wvrn", "majority"],
                   default=None, help="learner (default knn)")
    p.add_argument("--k", type=int, default=None, help="KNN neighbours (default 10)")
    p.add_argument("--svm-c", type=float, default=None, help="SVM C (default 1)")
    p.add_argument("--nb-smoothing", type=float, default=None, help="NB variance smoothing (default 0)")
    p.add_argument("--train-fraction", type=float, default=None, help="default 0.7")
    p.add_argument("--repetitions", type=int, default=None, help="default 1")
    p.add_argument("--seed", type=int, default=None, help=f"default {DEFAULT_SEED}")
    p.add_argument("--out", help="write the JSON report (train-eval) or CSV table (sweep)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nfvr", description="Attribute proclivity and neighbourhood features "
                     "for predicting node attributes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("prone", help="proclivity matrix between all attribute pairs")
    _add_graph_args(p)
    p.add_argument("--f", choices=[g.value for g in GenerativeFunction], default="xlogx",
                   help="generative function (default xlogx)")
    p.add_argument("--exclude-missing", action="store_true", help="drop the missing level")
    p.add_argument("--out", help="write the matrix as CSV")
    p.add_argument("--json", dest="json_out", help="write the matrix as JSON")

    p = sub.add_parser("featurize", help="write feature vectors for every node")
    _add_graph_args(p)
    _add_feature_args(p)
    p.add_argument("--out", required=True, help="feature CSV path")
    p.add_argument("--layout", help="layout JSON path (default <out>.layout.json)")

    p = sub.add_parser("train-eval", help="split, featurize, fit, predict and score")
    _add_experiment_args(p)
    p.add_argument("--predictions",
                   help="write node,predicted,actual CSV (suffix .repN per repetition when several)")

    p = sub.add_parser("sweep", help="repeat train-eval over values of k or h")
    _add_experiment_args(p)
    p.add_argument("--param", choices=["k", "h"], required=True, help="parameter to vary")
    p.add_argument("--values", type=_floats, required=True, help="comma-separated values")

    p = sub.add_parser("synth", help="write a planted-partition test graph")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--blocks", type=int, default=2)
    p.add_argument("--p-in", type=float, required=True, help="within-block edge probability")
    p.add_argument("--p-out", type=float, required=True, help="cross-block edge probability")
    p.add_argument("--noise-attrs", type=int, default=0, help="uniform random nominal attributes")
    p.add_argument("--noise-levels", type=int, default=3)
    p.add_argument("--seed", type=int, default=None, help=f"default {DEFAULT_SEED}")
    p.add_argument("--out-prefix", required=True,
                   help="writes <prefix>.edges and <prefix>.attrs.csv")
    return parser


def _schema(args) -> SchemaOptions:
    return SchemaOptions(frozenset(args.nominal or ()), bool(args.all_nominal))


def _load(args):
    g = load_graph(args.edges, args.attributes, _schema(args))
    return discretize_all(g, args.bins or 5, args.binning or "width")


def _resolve_target(g, name):
    if name is None:
        raise UsageError(f"--target is required; choose one of: {', '.join(g.attribute_names)}")
    try:
        return g.attribute_index(name)
    except KeyError:
        raise UsageError(f"unknown attribute {name!r}; candidates: {', '.join(g.attribute_names)}")


def _seed(value):
    if value is None:
        print(f"using default seed {DEFAULT_SEED}", file=sys.stderr)
        return DEFAULT_SEED
    return value


def cmd_prone(args) -> int:
    g = _load(args)
    P = prone_matrix(g, GenerativeFunction.parse(args.f), args.exclude_missing)
    print(P.format_table())
    if args.out:
        export_heatmap(P, args.out)
    if args.json_out:
        export_json(P, args.json_out)
    return EXIT_OK


def cmd_featurize(args) -> int:
    g = _load(args)
    target = _resolve_target(g, args.target)
    try:
        cfg = FeatureConfig(target, args.h or 1, args.w, Mode.parse(args.mode or "nfvr"),
                            GenerativeFunction.parse(args.f or "xlogx"),
                            degree_normalize=args.degree_normalize is not False)
    except ValueError as exc:
        raise UsageError(str(exc))
    if cfg.mode is not Mode.NNS:
        cfg.proclivity = prone_matrix(g, cfg.generative, bool(args.exclude_missing))
    F = featurize_all(g, cfg, workers=_threads(args))
    F.write(args.out, args.layout or f"{args.out}.layout.json")
    print(f"wrote {g.n} rows x {F.dim} features to {args.out}")
    return EXIT_OK


_FLAG_TO_FIELD = {
    "edges": "edges", "attributes": "attributes", "target": "target", "mode": "mode", "h": "h",
    "w": "hop_weights", "f": "generative", "train_fraction": "train_fraction", "seed": "seed",
    "repetitions": "repetitions", "bins": "bins", "binning": "binning",
    "exclude_missing": "exclude_missing", "degree_normalize": "degree_normalize",
    "nominal": "nominal", "all_nominal": "all_nominal",
}
_FLAG_TO_MODEL = {"model": "kind", "k": "knn_k", "svm_c": "svm_c", "nb_smoothing": "nb_smoothing"}


def experiment_config(args) -> ExperimentConfig:
    """Merge ``--config`` JSON with explicitly given flags (flags win)."""
    d = {}
    if args.config:
        d = json.loads(Path(args.config).read_text(encoding="utf-8"))
    model = dict(d.get("model") or {})
    for flag, name in _FLAG_TO_FIELD.items():
        val = getattr(args, flag)
        if val is not None:
            d[name] = val
    for flag, name in _FLAG_TO_MODEL.items():
        val = getattr(args, flag)
        if val is not None:
            model[name] = val
    d["model"] = model
    if "seed" not in d:
        d["seed"] = _seed(None)
    for required in ("edges", "attributes", "target"):
        if not d.get(required):
            raise UsageError(f"missing {required!r} (flag or config field)")
    try:
        return ExperimentConfig.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc))


def _load_for(cfg: ExperimentConfig):
    g = load_graph(cfg.edges, cfg.attributes, cfg.schema_options())
    _resolve_target(g, cfg.target)
    return g


def cmd_train_eval(args) -> int:
    cfg = experiment_config(args)
    report = run_experiment(cfg, _load_for(cfg), _threads(args))
    print(report.summary())
    if len(report.per_repetition) > 1:
        for r, m in enumerate(report.per_repetition):
            print(f"  rep {r}: " + ", ".join(f"{k}={v:.4f}" for k, v in m.items()))
    if args.out:
        report.write_json(args.out)
    if args.predictions:
        report.write_predictions(args.predictions)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = experiment_config(args)
    values = [int(v) for v in args.values]
    results = sweep(cfg, args.param, values, _load_for(cfg), _threads(args))
    metric = "accuracy" if cfg.task == "classification" else "rmse"
    print(f"{args.param:>6} {metric + '_mean':>14} {metric + '_std':>14}")
    for v, rep in results:
        print(f"{v:>6} {rep.metrics[metric]:>14.4f} {rep.std(metric):>14.4f}")
    if args.out:
        write_sweep_csv(results, args.out)
    return EXIT_OK


def cmd_synth(args) -> int:
    seed = _seed(args.seed)
    try:
        g = planted_partition(args.nodes, args.blocks, args.p_in, args.p_out, args.noise_attrs,
                              seed, args.noise_levels)
    except ValueError as exc:
        raise UsageError(str(exc))
    prefix = args.out_prefix
    write_graph(g, f"{prefix}.edges", f"{prefix}.attrs.csv")
    print(f"wrote {g.n} nodes, {g.m} edges to {prefix}.edges and {prefix}.attrs.csv")
    return EXIT_OK


COMMANDS = {"prone": cmd_prone, "featurize": cmd_featurize, "train-eval": cmd_train_eval,
            "sweep": cmd_sweep, "synth": cmd_synth}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"nfvr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphFormatError, SplitError, OSError, ValueError, KeyError) as exc:
        print(f"nfvr {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        logger.exception("internal error")
        print(f"nfvr {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
