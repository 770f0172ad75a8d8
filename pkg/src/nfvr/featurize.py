"""Node feature vectors: NNS, N-FVR and NN-FVR.

The per-node functions (:func:`aggregate_set`, :func:`hop_aggregate`,
:func:`nfvr_vector`, ...) follow the definitions one node at a time and are
used for inspection and testing. :func:`featurize_all` computes the same
vectors for every node with array operations.
"""
from __future__ import annotations

import csv
import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import AttributedGraph
from .proclivity import DEFAULT_GENERATIVE, GenerativeFunction, ProclivityMatrix, prone_matrix


class Mode(str, enum.Enum):
    NNS = "nns"
    NFVR = "nfvr"
    NNFVR = "nnfvr"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower().replace("-", "").replace("_", ""))


def default_hop_weights(h: int) -> tuple[float, ...]:
    return tuple(0.5 ** i for i in range(h))


@dataclass
class FeatureConfig:
    target: int
    max_hop: int = 1
    hop_weights: Sequence[float] | None = None
    mode: Mode = Mode.NFVR
    generative: GenerativeFunction = DEFAULT_GENERATIVE
    proclivity: ProclivityMatrix | None = None
    degree_normalize: bool = True

    def __post_init__(self):
        self.mode = Mode.parse(self.mode)
        self.generative = GenerativeFunction.parse(self.generative)
        if self.max_hop < 1:
            raise ValueError("max_hop must be >= 1")
        if self.hop_weights is None:
            self.hop_weights = default_hop_weights(self.max_hop)
        self.hop_weights = tuple(float(w) for w in self.hop_weights)
        if len(self.hop_weights) != self.max_hop:
            raise ValueError(
                f"{len(self.hop_weights)} hop weight(s) given for max_hop={self.max_hop}")
        if any(not 0.0 < w <= 1.0 for w in self.hop_weights):
            raise ValueError("hop weights must lie in (0, 1]")
        if self.proclivity is not None and self.proclivity.generative is not self.generative:
            raise ValueError("proclivity matrix was computed with a different generative function")

    def resolve(self, g: AttributedGraph) -> "FeatureConfig":
        """Fill in the proclivity matrix from ``g`` when none was supplied."""
        if self.proclivity is not None:
            return self
        return FeatureConfig(self.target, self.max_hop, self.hop_weights, self.mode,
                             self.generative, prone_matrix(g, self.generative),
                             self.degree_normalize)


@dataclass(frozen=True)
class Block:
    kind: str          # "nns" or "nfvr"
    attribute: int
    name: str
    levels: tuple[str, ...]
    weight: float = 1.0

    @property
    def width(self) -> int:
        return len(self.levels)

    @property
    def label(self) -> str:
        return f"{self.kind}.{self.name}"


def _check_discrete(g: AttributedGraph, j: int):
    if not g.attributes[j].discrete:
        raise ValueError(f"attribute {g.attributes[j].name!r} is continuous; discretize it first")


def layout_for(g: AttributedGraph, cfg: FeatureConfig) -> list[Block]:
    blocks = []
    if cfg.mode in (Mode.NNS, Mode.NNFVR):
        blocks += [Block("nns", j, a.name, a.levels) for j, a in enumerate(g.attributes)
                   if j != cfg.target]
    if cfg.mode in (Mode.NFVR, Mode.NNFVR):
        rho = cfg.proclivity.row(cfg.target) if cfg.proclivity is not None else np.ones(g.t)
        blocks += [Block("nfvr", j, a.name, a.levels, float(rho[j]))
                   for j, a in enumerate(g.attributes)]
    return blocks


# -- per-node definitions ----------------------------------------------------

def aggregate_set(g: AttributedGraph, S, j: int) -> np.ndarray:
    """Distribution of attribute ``j`` over node set ``S`` (zero vector when ``S`` is empty)."""
    _check_discrete(g, j)
    S = np.asarray(list(S) if not isinstance(S, np.ndarray) else S, dtype=np.int64)
    n_j = g.attributes[j].n_levels
    if len(S) == 0:
        return np.zeros(n_j)
    return np.bincount(g.columns[j][S], minlength=n_j) / len(S)


def hop_aggregate(g: AttributedGraph, v: int, j: int, cfg: FeatureConfig) -> np.ndarray:
    """Hop-weighted sum of shell distributions of attribute ``j`` around ``v``."""
    shells = g.hop_shells(v, cfg.max_hop)
    out = np.zeros(g.attributes[j].n_levels)
    for w, shell in zip(cfg.hop_weights, shells[1:]):
        out += w * aggregate_set(g, shell, j)
    return out


def nns_vector(g: AttributedGraph, v: int, cfg: FeatureConfig) -> np.ndarray:
    """One-hot encoding of ``v``'s own values for every non-target attribute."""
    parts = []
    for j, a in enumerate(g.attributes):
        if j == cfg.target:
            continue
        _check_discrete(g, j)
        one_hot = np.zeros(a.n_levels)
        one_hot[g.columns[j][v]] = 1.0
        parts.append(one_hot)
    return np.concatenate(parts) if parts else np.zeros(0)


def nfvr_vector(g: AttributedGraph, v: int, cfg: FeatureConfig) -> np.ndarray:
    cfg = cfg.resolve(g)
    rho = cfg.proclivity.row(cfg.target)
    y = np.concatenate([rho[j] * hop_aggregate(g, v, j, cfg) for j in range(g.t)])
    if cfg.degree_normalize:
        deg = g.degree(v)
        return y / deg if deg else np.zeros_like(y)
    return y


def nnfvr_vector(g: AttributedGraph, v: int, cfg: FeatureConfig) -> np.ndarray:
    return np.concatenate([nns_vector(g, v, cfg), nfvr_vector(g, v, cfg)])


# -- whole-graph featurization -----------------------------------------------

@dataclass
class FeatureMatrix:
    values: np.ndarray
    layout: list[Block]
    labels: np.ndarray
    node_ids: list[str]
    target: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def block_slice(self, kind: str) -> slice:
        pos, start, stop = 0, None, 0
        for b in self.layout:
            if b.kind == kind:
                if start is None:
                    start = pos
                stop = pos + b.width
            pos += b.width
        return slice(start or 0, stop)

    def column_names(self) -> list[str]:
        return [f"{b.label}:{lvl}" for b in self.layout for lvl in b.levels]

    def layout_dict(self) -> dict:
        return {
            "target": self.target,
            "blocks": [{"kind": b.kind, "attribute": b.name, "width": b.width,
                        "weight": b.weight, "levels": list(b.levels)} for b in self.layout],
            **self.meta,
        }

    def write(self, csv_path, layout_path=None) -> None:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["node", *self.column_names(), "label"])
            for node, row, lab in zip(self.node_ids, self.values, self.labels):
                w.writerow([node, *(repr(float(x)) for x in row), _fmt_label(lab)])
        if layout_path is not None:
            with open(layout_path, "w", encoding="utf-8") as fh:
                json.dump(self.layout_dict(), fh, indent=2)


def _fmt_label(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def read_feature_csv(csv_path, layout_path) -> FeatureMatrix:
    with open(layout_path, encoding="utf-8") as fh:
        meta = json.load(fh)
    with open(csv_path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    layout = [Block(b["kind"], -1, b["attribute"], tuple(b["levels"]), b["weight"])
              for b in meta.pop("blocks")]
    body = rows[1:]
    values = np.array([[float(x) for x in r[1:-1]] for r in body]).reshape(len(body), -1)
    raw_labels = [r[-1] for r in body]
    try:
        labels = np.array([int(x) for x in raw_labels], dtype=np.int64)
    except ValueError:
        labels = np.array([float(x) for x in raw_labels])
    return FeatureMatrix(values, layout, labels, [r[0] for r in body], meta.pop("target"), meta)


def _nns_block(g: AttributedGraph, j: int) -> np.ndarray:
    n_j = g.attributes[j].n_levels
    return np.eye(n_j)[g.columns[j]]


def _hop_pairs(g: AttributedGraph, nodes: np.ndarray, h: int):
    """For each hop i, the (row, member) pairs of shells N^i(v) for v in ``nodes``."""
    rows = [[] for _ in range(h)]
    members = [[] for _ in range(h)]
    for r, v in enumerate(nodes):
        for i, shell in enumerate(g.hop_shells(int(v), h)[1:]):
            rows[i].append(np.full(len(shell), r, dtype=np.int64))
            members[i].append(shell)
    cat = lambda parts: np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    return [(cat(rows[i]), cat(members[i])) for i in range(h)]


def _code_matrix(g: AttributedGraph) -> np.ndarray:
    """Row-major (n, t) level codes, so one neighbour lookup fetches every attribute."""
    for j in range(g.t):
        _check_discrete(g, j)
    width = max((a.n_levels for a in g.attributes), default=1)
    dtype = np.min_scalar_type(width - 1)  # small codes keep the gather cache-resident
    if not g.t:
        return np.zeros((g.n, 0), dtype=dtype)
    return np.ascontiguousarray(np.column_stack(g.columns), dtype=dtype)


def _nfvr_rows(g: AttributedGraph, cfg: FeatureConfig, nodes: np.ndarray,
               codes: np.ndarray | None = None) -> np.ndarray:
    if codes is None:
        codes = _code_matrix(g)
    rho = cfg.proclivity.row(cfg.target)
    k = len(nodes)
    if cfg.max_hop == 1:
        # N^1(v) is the CSR row, so no traversal is needed
        starts, ends = g.indptr[nodes], g.indptr[nodes + 1]
        lens = ends - starts
        rows = np.repeat(np.arange(k, dtype=np.int64), lens)
        shift = np.repeat(starts - (np.cumsum(lens) - lens), lens)
        pairs = [(rows, g.indices[shift + np.arange(int(lens.sum()))])]
    else:
        pairs = _hop_pairs(g, nodes, cfg.max_hop)
    gathered = [(rows, codes[members], np.bincount(rows, minlength=k).astype(np.float64))
                for rows, members in pairs]
    blocks = []
    for j, a in enumerate(g.attributes):
        n_j = a.n_levels
        acc = np.zeros((k, n_j))
        for w, (rows, member_codes, sizes) in zip(cfg.hop_weights, gathered):
            counts = np.bincount(rows * n_j + member_codes[:, j].astype(np.int64),
                                 minlength=k * n_j).reshape(k, n_j)
            with np.errstate(invalid="ignore", divide="ignore"):
                dist = np.where(sizes[:, None] > 0, counts / sizes[:, None], 0.0)
            acc += w * dist
        blocks.append(rho[j] * acc)
    y = np.concatenate(blocks, axis=1) if blocks else np.zeros((k, 0))
    if cfg.degree_normalize:
        deg = g.degrees[nodes].astype(np.float64)
        with np.errstate(invalid="ignore", divide="ignore"):
            y = np.where(deg[:, None] > 0, y / deg[:, None], 0.0)
    return y


def featurize_all(g: AttributedGraph, cfg: FeatureConfig, regression: bool = False,
                  workers: int = 1, chunk_size: int = 4096) -> FeatureMatrix:
    """Feature vectors for every node in dense-id order.

    Labels are target level indices, or the raw real values of a discretized
    target when ``regression`` is set. Rows are computed in node chunks; with
    ``workers > 1`` the chunks are spread over threads, which only changes
    scheduling, never the result.
    """
    cfg = cfg.resolve(g) if cfg.mode is not Mode.NNS else cfg
    target = cfg.target
    layout = layout_for(g, cfg)
    # one output buffer; chunks write straight into it instead of being concatenated
    values = np.empty((g.n, sum(b.width for b in layout)))
    col = 0
    if cfg.mode in (Mode.NNS, Mode.NNFVR):
        for j in range(g.t):
            if j != target:
                block = _nns_block(g, j)
                values[:, col:col + block.shape[1]] = block
                col += block.shape[1]
    if cfg.mode in (Mode.NFVR, Mode.NNFVR):
        out = values[:, col:]
        codes = _code_matrix(g)

        def fill(start):
            nodes = np.arange(start, min(start + chunk_size, g.n), dtype=np.int64)
            out[start:start + len(nodes)] = _nfvr_rows(g, cfg, nodes, codes)

        starts = range(0, g.n, chunk_size)
        if workers > 1 and len(starts) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(fill, starts))
        else:
            for start in starts:
                fill(start)

    if regression:
        if target not in g.raw:
            raise ValueError("regression needs the raw values of a numeric target")
        labels = np.array(g.raw[target])
    else:
        labels = np.array(g.columns[target])
    meta = {
        "mode": cfg.mode.value,
        "h": cfg.max_hop,
        "hop_weights": list(cfg.hop_weights),
        "generative": cfg.generative.value,
        "degree_normalize": cfg.degree_normalize,
    }
    if cfg.proclivity is not None:
        meta["proclivity_row"] = cfg.proclivity.row(target).tolist()
    return FeatureMatrix(values, layout, labels, list(g.node_ids),
                         g.attributes[target].name, meta)
