"""Train/test protocol: split, mask, featurize, fit, predict, score, repeat."""
from __future__ import annotations

import csv
import json
import logging
import time
from pathlib import Path
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Sequence

import numpy as np

from .featurize import FeatureConfig, FeatureMatrix, Mode, featurize_all
from .graph import AttributedGraph, SchemaOptions, discretize_all, load_graph
from .metrics import classification_metrics, regression_metrics
from .models import ModelKind, ModelSpec, build_model, Majority, WVRN
from .proclivity import GenerativeFunction, prone_matrix

logger = logging.getLogger(__name__)


class SplitError(ValueError):
    pass


def labeled_nodes(g: AttributedGraph, target: int) -> np.ndarray:
    a = g.attributes[target]
    if a.discrete:
        ok = g.columns[target] != a.missing_index
        if target in g.raw:
            ok &= ~np.isnan(g.raw[target])
    else:
        ok = ~np.isnan(g.columns[target])
    return np.nonzero(ok)[0]


def split(g: AttributedGraph, target: int | str, train_fraction: float, seed: int):
    """Uniform random train/test split over nodes whose target is known.

    Returns two sorted id arrays. Nodes with a missing target are in neither.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    target = g.attribute_index(target)
    nodes = labeled_nodes(g, target)
    if len(nodes) < 2:
        raise SplitError(f"only {len(nodes)} labelled node(s); need at least 2")
    n_train = min(max(int(round(train_fraction * len(nodes))), 1), len(nodes) - 1)
    shuffled = np.random.default_rng(seed).permutation(nodes)
    return np.sort(shuffled[:n_train]), np.sort(shuffled[n_train:])


@dataclass
class ExperimentConfig:
    edges: str = ""
    attributes: str = ""
    target: str = ""
    mode: str = "nfvr"
    h: int = 1
    hop_weights: list[float] | None = None
    generative: str = "xlogx"
    model: ModelSpec = field(default_factory=ModelSpec)
    train_fraction: float = 0.7
    seed: int = 42
    repetitions: int = 1
    bins: int = 5
    binning: str = "width"
    exclude_missing: bool = False
    degree_normalize: bool = True
    nominal: list[str] = field(default_factory=list)
    all_nominal: bool = False

    def __post_init__(self):
        if isinstance(self.model, dict):
            self.model = ModelSpec(**self.model)
        self.mode = Mode.parse(self.mode).value
        self.generative = GenerativeFunction.parse(self.generative).value
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.hop_weights is not None:
            self.hop_weights = [float(w) for w in self.hop_weights]

    @property
    def task(self) -> str:
        return "regression" if self.model.kind.regression else "classification"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model"] = self.model.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config field(s): {sorted(unknown)}")
        return cls(**d)

    def schema_options(self) -> SchemaOptions:
        return SchemaOptions(frozenset(self.nominal), self.all_nominal)


@dataclass
class MetricsReport:
    task: str
    metrics: dict[str, float]
    per_repetition: list[dict[str, float]]
    config: dict
    timings: dict[str, float] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    # per repetition: rows of (node id, predicted, actual) as strings
    predictions: list[list[tuple[str, str, str]]] = field(default_factory=list, repr=False)

    def std(self, name: str) -> float:
        vals = [r[name] for r in self.per_repetition]
        return float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0

    def comparable(self) -> dict:
        """Everything except wall-clock timings."""
        return {"task": self.task, "metrics": self.metrics,
                "per_repetition": self.per_repetition, "config": self.config, "meta": self.meta}

    def to_dict(self) -> dict:
        return {**self.comparable(), "timings": self.timings}

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    def write_predictions(self, path) -> list[Path]:
        """CSV ``node,predicted,actual``; one file per repetition when there are several."""
        path = Path(path)
        if len(self.predictions) == 1:
            paths = [path]
        else:
            paths = [path.with_name(f"{path.stem}.rep{r}{path.suffix}") for r in range(len(self.predictions))]
        for out, rows in zip(paths, self.predictions):
            with open(out, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["node", "predicted", "actual"])
                w.writerows(rows)
        return paths

    def summary(self) -> str:
        parts = [f"{k}={v:.4f}" for k, v in self.metrics.items()]
        return f"{self.task} over {len(self.per_repetition)} repetition(s): " + ", ".join(parts)


def prepare_graph(cfg: ExperimentConfig, g: AttributedGraph | None = None) -> AttributedGraph:
    if g is None:
        g = load_graph(cfg.edges, cfg.attributes or None, cfg.schema_options())
    return discretize_all(g, cfg.bins, cfg.binning)


def build_features(g: AttributedGraph, cfg: ExperimentConfig, test_ids) -> FeatureMatrix:
    """Features for every node with the test nodes' target hidden.

    The target is set to the missing level on ``test_ids`` before proclivity
    and neighbourhood aggregation, so no feature depends on a test label.
    """
    target = g.attribute_index(cfg.target)
    masked = g.mask_nodes(target, test_ids)
    mode = Mode.parse(cfg.mode)
    gen = GenerativeFunction.parse(cfg.generative)
    P = None if mode is Mode.NNS else prone_matrix(masked, gen, cfg.exclude_missing)
    fc = FeatureConfig(target, cfg.h, cfg.hop_weights, mode, gen, P, cfg.degree_normalize)
    F = featurize_all(masked, fc)
    # labels come from the unmasked graph; callers only read the train rows
    F.labels = np.array(g.raw[target]) if cfg.task == "regression" else np.array(g.columns[target])
    return F


def _one_repetition(g: AttributedGraph, cfg: ExperimentConfig, rep: int):
    seed = cfg.seed + rep
    target = g.attribute_index(cfg.target)
    train, test = split(g, target, cfg.train_fraction, seed)
    spec = replace(cfg.model, seed=seed)
    t0 = time.perf_counter()
    if spec.kind.relational:
        masked = g.mask_nodes(target, test)
        cls = WVRN if spec.kind is ModelKind.WVRN else Majority
        model = cls(masked, target).fit(train, g.columns[target][train])
        t1 = time.perf_counter()
        pred = model.predict(test)
        actual = g.columns[target][test]
    else:
        F = build_features(g, cfg, test)
        t1 = time.perf_counter()
        model = build_model(spec).fit(F.values[train], F.labels[train])
        pred = model.predict(F.values[test])
        actual = F.labels[test]
    t2 = time.perf_counter()
    if cfg.task == "regression":
        m = regression_metrics(pred, actual)
        fmt = lambda x: repr(float(x))
    else:
        m = classification_metrics(pred, actual)
        levels = g.attributes[target].levels
        fmt = lambda c: levels[int(c)]
    rows = [(g.node_ids[v], fmt(p), fmt(a)) for v, p, a in zip(test, pred, actual)]
    return m, {"featurize": t1 - t0, "fit_predict": t2 - t1}, rows


def run_experiment(cfg: ExperimentConfig, graph: AttributedGraph | None = None,
                   threads: int = 1) -> MetricsReport:
    """Run ``cfg.repetitions`` independent splits (seeds ``seed + r``) and average."""
    t0 = time.perf_counter()
    g = prepare_graph(cfg, graph)
    target = g.attribute_index(cfg.target)
    if cfg.task == "regression" and target not in g.raw:
        raise ValueError(f"regression needs a numeric target; {cfg.target!r} is nominal")
    t_load = time.perf_counter() - t0
    reps = range(cfg.repetitions)
    if threads > 1 and cfg.repetitions > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda r: _one_repetition(g, cfg, r), reps))
    else:
        results = [_one_repetition(g, cfg, r) for r in reps]
    per_rep = [m for m, _, _ in results]
    means = {k: float(np.mean([m[k] for m in per_rep])) for k in per_rep[0]}
    timings = {"load": t_load,
               "featurize": sum(t["featurize"] for _, t, _ in results),
               "fit_predict": sum(t["fit_predict"] for _, t, _ in results),
               "total": time.perf_counter() - t0}
    meta = {"repetition_seeds": [cfg.seed + r for r in reps]}
    if cfg.model.kind is ModelKind.WVRN:
        meta["wvrn_similarity"] = "1/(1+euclidean(nns(v), nns(u)))"
    return MetricsReport(cfg.task, means, per_rep, cfg.to_dict(), timings, meta,
                         [rows for _, _, rows in results])


SWEEPABLE = ("k", "h")


def sweep(cfg: ExperimentConfig, parameter: str, values: Sequence, graph: AttributedGraph | None = None,
          threads: int = 1) -> list[tuple[object, MetricsReport]]:
    """One experiment per value of ``k`` (KNN neighbours) or ``h`` (hop depth).

    Every point reuses ``cfg.seed``, so all points see the same splits.
    """
    if parameter not in SWEEPABLE:
        raise ValueError(f"can only sweep over {SWEEPABLE}, not {parameter!r}")
    if not len(values):
        raise ValueError("sweep needs at least one value")
    g = prepare_graph(cfg, graph)
    out = []
    for v in values:
        if parameter == "k":
            point = replace(cfg, model=replace(cfg.model, knn_k=int(v)))
        else:
            weights = None
            if cfg.hop_weights is not None and len(cfg.hop_weights) >= int(v):
                weights = cfg.hop_weights[:int(v)]
            point = replace(cfg, h=int(v), hop_weights=weights)
        out.append((v, run_experiment(point, g, threads)))
    return out


def write_sweep_csv(results, path) -> None:
    task = results[0][1].task
    metric = "accuracy" if task == "classification" else "rmse"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["param", f"{metric}_mean", f"{metric}_std"])
        for v, rep in results:
            w.writerow([v, repr(rep.metrics[metric]), repr(rep.std(metric))])
