"""Attributed graph storage: CSR adjacency plus a per-node attribute table.

Node ids in files are arbitrary strings. They are densified to ``0..n-1`` in
sorted order (numeric order when every id is an integer), so a graph written
with :func:`write_graph` loads back with identical dense indices.
"""
from __future__ import annotations

import csv
import enum
import io
import logging
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

MISSING = "?"


class GraphFormatError(ValueError):
    """Raised for malformed edge-list or attribute files."""


class Kind(str, enum.Enum):
    NOMINAL = "nominal"
    DISCRETIZED = "numeric-discretized"
    CONTINUOUS = "numeric-continuous"


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: Kind
    levels: tuple[str, ...] = ()
    missing_index: int | None = None

    def __post_init__(self):
        if self.kind is Kind.CONTINUOUS:
            return
        if len(set(self.levels)) != len(self.levels):
            raise ValueError(f"duplicate level tokens in attribute {self.name!r}")
        if len(self.levels) < 2:
            raise ValueError(f"attribute {self.name!r} needs at least 2 levels")
        if self.missing_index is None or not 0 <= self.missing_index < len(self.levels):
            raise ValueError(f"attribute {self.name!r} has no missing level")

    @property
    def discrete(self) -> bool:
        return self.kind is not Kind.CONTINUOUS

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    def level_index(self, token: str) -> int:
        return self.levels.index(token)


@dataclass(frozen=True)
class SchemaOptions:
    """How to interpret attribute columns while loading.

    ``nominal`` lists column names forced nominal even if every value parses as
    a number; ``all_nominal`` disables numeric detection entirely.
    """

    nominal: frozenset[str] = frozenset()
    all_nominal: bool = False
    missing_token: str = MISSING


@dataclass(frozen=True)
class LoadStats:
    self_loops: int = 0
    duplicate_edges: int = 0
    isolated_nodes: int = 0


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class AttributedGraph:
    """Immutable undirected simple graph with node attributes.

    ``columns[j]`` holds int64 level indices for discrete attributes and
    float64 values (NaN for missing) for continuous ones. ``raw`` keeps the
    original real values of discretized attributes so they can be re-binned.
    """

    def __init__(
        self,
        node_ids: Sequence[str],
        indptr: np.ndarray,
        indices: np.ndarray,
        attributes: Sequence[Attribute] = (),
        columns: Sequence[np.ndarray] = (),
        raw: dict[int, np.ndarray] | None = None,
        load_stats: LoadStats | None = None,
    ):
        self.node_ids = tuple(node_ids)
        self.indptr = _readonly(np.asarray(indptr, dtype=np.int64))
        self.indices = _readonly(np.asarray(indices, dtype=np.int64))
        self._degrees = _readonly(np.diff(self.indptr))
        self.attributes = tuple(attributes)
        self.columns = tuple(
            _readonly(np.asarray(c, dtype=np.int64 if a.discrete else np.float64))
            for a, c in zip(self.attributes, columns)
        )
        self.raw = {k: _readonly(np.asarray(v, dtype=np.float64)) for k, v in (raw or {}).items()}
        self.load_stats = load_stats
        self._local = threading.local()
        self._validate()

    def _validate(self):
        n = self.n
        if self.indptr.shape != (n + 1,) or self.indptr[0] != 0 or self.indptr[-1] != len(self.indices):
            raise ValueError("malformed CSR index pointer")
        if len(self.columns) != len(self.attributes):
            raise ValueError("attribute count mismatch")
        for a, col in zip(self.attributes, self.columns):
            if col.shape != (n,):
                raise ValueError(f"column {a.name!r} has {len(col)} rows, expected {n}")
            if a.discrete and n and (col.min() < 0 or col.max() >= a.n_levels):
                raise ValueError(f"column {a.name!r} holds an out-of-range level index")

    # -- basic structure -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @property
    def t(self) -> int:
        return len(self.attributes)

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def degree(self, v: int) -> int:
        self._check_node(v)
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor ids of ``v`` (a read-only view into the CSR array)."""
        self._check_node(v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self) -> np.ndarray:
        """Undirected edges as an ``(m, 2)`` array with ``u < v``, sorted."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])

    def _check_node(self, v):
        if not 0 <= v < self.n:
            raise IndexError(f"node {v} out of range for graph with {self.n} nodes")

    # -- attributes --------------------------------------------------------

    def attribute_index(self, name_or_index: str | int) -> int:
        if isinstance(name_or_index, (int, np.integer)):
            if not 0 <= name_or_index < self.t:
                raise IndexError(f"attribute index {name_or_index} out of range")
            return int(name_or_index)
        for k, a in enumerate(self.attributes):
            if a.name == name_or_index:
                return k
        raise KeyError(name_or_index)

    @property
    def attribute_names(self) -> list[str]:
        return [a.name for a in self.attributes]

    def with_column(self, j: int, attribute: Attribute, column: np.ndarray,
                    raw: np.ndarray | None = None) -> "AttributedGraph":
        """Copy of the graph with attribute ``j`` replaced. Adjacency is shared."""
        attrs = list(self.attributes)
        cols = list(self.columns)
        attrs[j] = attribute
        cols[j] = column
        raws = dict(self.raw)
        raws.pop(j, None)
        if raw is not None:
            raws[j] = raw
        return AttributedGraph(self.node_ids, self.indptr, self.indices, attrs, cols, raws,
                               self.load_stats)

    def mask_nodes(self, j: int, nodes: Iterable[int]) -> "AttributedGraph":
        """Copy with attribute ``j`` set to missing on ``nodes``."""
        a = self.attributes[j]
        col = np.array(self.columns[j])
        idx = np.fromiter(nodes, dtype=np.int64)
        if a.discrete:
            col[idx] = a.missing_index
        else:
            col[idx] = np.nan
        raw = self.raw.get(j)
        if raw is not None:
            raw = np.array(raw)
            raw[idx] = np.nan
        return self.with_column(j, a, col, raw)

    def relabel(self, perm: Sequence[int]) -> "AttributedGraph":
        """Graph with node ``v`` renamed to ``perm[v]``. Node id strings follow their nodes."""
        perm = np.asarray(perm, dtype=np.int64)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(self.n)
        e = self.edges()
        new = from_edge_array(self.n, perm[e]) if len(e) else from_edge_array(self.n, e)
        node_ids = [self.node_ids[inv[k]] for k in range(self.n)]
        cols = [np.asarray(c)[inv] for c in self.columns]
        raw = {k: np.asarray(r)[inv] for k, r in self.raw.items()}
        return AttributedGraph(node_ids, new.indptr, new.indices, self.attributes, cols, raw)

    # -- traversal ---------------------------------------------------------

    def _stamp(self):
        # per-thread visited marks so concurrent readers never share scratch space
        st = getattr(self._local, "stamp", None)
        if st is None:
            st = self._local.stamp = [np.full(self.n, -1, dtype=np.int64), 0]
        st[1] += 1
        return st[0], st[1]

    def hop_shells(self, v: int, h: int) -> list[np.ndarray]:
        """Exact-distance shells ``[N^0(v), ..., N^h(v)]`` via BFS truncated at depth h.

        Cost is proportional to the edges touched within distance ``h`` of ``v``.
        Each shell is a sorted int64 array.
        """
        self._check_node(v)
        if h < 0:
            raise ValueError("h must be >= 0")
        shells = [np.array([v], dtype=np.int64)]
        if h == 0:
            return shells
        marks, s = self._stamp()
        marks[v] = s
        frontier = shells[0]
        for _ in range(h):
            cand = _gather(self.indptr, self.indices, frontier)
            cand = cand[marks[cand] != s]
            frontier = np.unique(cand)
            marks[frontier] = s
            shells.append(frontier)
            if not len(frontier):
                shells.extend(np.empty(0, dtype=np.int64) for _ in range(h + 1 - len(shells)))
                break
        return shells

    def hop_shell(self, v: int, h: int) -> np.ndarray:
        """Nodes at shortest-path distance exactly ``h`` from ``v``."""
        if h == 1:
            return np.array(self.neighbors(v))
        return self.hop_shells(v, h)[h]

    def __repr__(self):
        return f"AttributedGraph(n={self.n}, m={self.m}, attributes={self.attribute_names})"


def _gather(indptr: np.ndarray, indices: np.ndarray, frontier: np.ndarray) -> np.ndarray:
    """Concatenated neighbor lists of all frontier nodes, without a Python loop."""
    starts = indptr[frontier]
    lens = indptr[frontier + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    shift = np.repeat(starts - (np.cumsum(lens) - lens), lens)
    return indices[shift + np.arange(total)]


def from_edge_array(n: int, edges, attributes: Sequence[Attribute] = (),
                    columns: Sequence[np.ndarray] = (), node_ids: Sequence[str] | None = None,
                    raw: dict[int, np.ndarray] | None = None) -> AttributedGraph:
    """Build a graph from an ``(k, 2)`` array of dense endpoints.

    Self-loops and duplicate edges (in either orientation) are dropped and
    counted in ``load_stats``.
    """
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(e) and (e.min() < 0 or e.max() >= n):
        raise ValueError("edge endpoint out of range")
    loops = e[:, 0] == e[:, 1]
    e = e[~loops]
    lo = np.minimum(e[:, 0], e[:, 1])
    hi = np.maximum(e[:, 0], e[:, 1])
    keys = np.unique(lo * n + hi)
    dups = len(e) - len(keys)
    u, w = keys // n, keys % n
    src = np.concatenate([u, w])
    dst = np.concatenate([w, u])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    if node_ids is None:
        node_ids = [str(k) for k in range(n)]
    stats = LoadStats(int(loops.sum()), int(dups), int(np.sum(np.diff(indptr) == 0)))
    return AttributedGraph(node_ids, indptr, dst, attributes, columns, raw, stats)


# -- file formats -------------------------------------------------------------

def _node_sort_key(tokens: Iterable[str]):
    tokens = list(tokens)
    try:
        [int(x) for x in tokens]
    except ValueError:
        return sorted(tokens)
    return sorted(tokens, key=int)


def _read_text(source) -> str:
    if isinstance(source, (str, os.PathLike)):
        return Path(source).read_text(encoding="utf-8")
    return source.read()


def read_edge_list(source) -> list[tuple[str, str]]:
    pairs = []
    for lineno, line in enumerate(_read_text(source).splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if len(parts) != 2:
            raise GraphFormatError(f"edge list line {lineno}: expected 2 node tokens, got {len(parts)}")
        pairs.append((parts[0], parts[1]))
    return pairs


def read_attribute_table(source) -> tuple[list[str], dict[str, list[str]]]:
    """Parse the ``node,<attr1>,...`` CSV into (attribute names, node -> tokens)."""
    reader = csv.reader(io.StringIO(_read_text(source)))
    rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows:
        raise GraphFormatError("attribute file is empty")
    header = [c.strip() for c in rows[0]]
    if len(header) < 1 or header[0] != "node":
        raise GraphFormatError("attribute header must start with 'node'")
    names = header[1:]
    if len(set(names)) != len(names):
        raise GraphFormatError("duplicate attribute names in header")
    table: dict[str, list[str]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise GraphFormatError(
                f"attribute file line {lineno}: expected {len(header)} fields, got {len(row)}")
        node = row[0].strip()
        if node in table:
            raise GraphFormatError(f"attribute file line {lineno}: duplicate node {node!r}")
        table[node] = [c.strip() for c in row[1:]]
    return names, table


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def _build_column(name: str, tokens: list[str], opts: SchemaOptions):
    # an empty cell is missing too
    tokens = [opts.missing_token if x == "" else x for x in tokens]
    present = [x for x in tokens if x != opts.missing_token]
    if not present:
        raise GraphFormatError(f"attribute {name!r} has no non-missing values")
    numeric = (not opts.all_nominal and name not in opts.nominal and present
               and all(_is_number(x) for x in present))
    if numeric:
        vals = np.array([np.nan if x == opts.missing_token else float(x) for x in tokens])
        return Attribute(name, Kind.CONTINUOUS), vals
    levels: dict[str, int] = {}
    for x in present:
        levels.setdefault(x, len(levels))
    missing = len(levels)
    col = np.array([levels[x] if x != opts.missing_token else missing for x in tokens],
                   dtype=np.int64)
    return Attribute(name, Kind.NOMINAL, tuple(levels) + (MISSING,), missing), col


def load_graph(edge_source, attribute_source=None,
               schema_options: SchemaOptions | None = None) -> AttributedGraph:
    """Load an edge list plus optional attribute CSV into an :class:`AttributedGraph`.

    Every node appearing in the edge list must have an attribute row. Nodes
    present only in the attribute file become isolated nodes. Level order is
    first appearance in the attribute file, with the missing level last.
    """
    opts = schema_options or SchemaOptions()
    pairs = read_edge_list(edge_source)
    edge_nodes = {x for p in pairs for x in p}
    names: list[str] = []
    table: dict[str, list[str]] = {}
    if attribute_source is not None:
        names, table = read_attribute_table(attribute_source)
        absent = edge_nodes - table.keys()
        if absent:
            sample = ", ".join(sorted(absent)[:5])
            raise GraphFormatError(f"{len(absent)} edge-list node(s) lack attribute rows: {sample}")
    node_ids = _node_sort_key(edge_nodes | table.keys())
    index = {x: k for k, x in enumerate(node_ids)}
    e = np.array([(index[a], index[b]) for a, b in pairs], dtype=np.int64).reshape(-1, 2)

    attrs, cols = [], []
    file_order = list(table)
    for j, name in enumerate(names):
        tokens_file = [table[x][j] for x in file_order]
        attr, col_file = _build_column(name, tokens_file, opts)
        col = np.empty(len(node_ids), dtype=col_file.dtype)
        col[[index[x] for x in file_order]] = col_file
        attrs.append(attr)
        cols.append(col)

    g = from_edge_array(len(node_ids), e, attrs, cols, node_ids)
    st = g.load_stats
    if st.self_loops or st.duplicate_edges:
        logger.info("dropped %d self-loop(s) and %d duplicate edge(s)", st.self_loops,
                    st.duplicate_edges)
    return g


def write_graph(g: AttributedGraph, edge_path, attribute_path=None) -> None:
    """Write the two-file representation, ordered by dense node index."""
    ids = g.node_ids
    with open(edge_path, "w", encoding="utf-8") as fh:
        for u, v in g.edges():
            fh.write(f"{ids[u]} {ids[v]}\n")
    if attribute_path is None:
        return
    with open(attribute_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", *g.attribute_names])
        for v in range(g.n):
            row = [ids[v]]
            for a, col in zip(g.attributes, g.columns):
                if a.discrete:
                    row.append(a.levels[col[v]])
                else:
                    row.append(MISSING if np.isnan(col[v]) else repr(float(col[v])))
            w.writerow(row)


# -- discretization -------------------------------------------------------------

def discretize(g: AttributedGraph, attribute: int | str, bins: int = 5,
               method: str = "width") -> AttributedGraph:
    """Bin a numeric attribute into ``bins`` levels plus the missing level.

    ``method="width"`` uses equal-width bins over ``[min, max]`` with the max
    value in the top bin; a constant column lands entirely in bin 0.
    ``method="quantile"`` uses equal-frequency edges instead.
    Re-binning an already discretized attribute starts from its raw values.
    """
    j = g.attribute_index(attribute)
    a = g.attributes[j]
    if a.kind is Kind.CONTINUOUS:
        x = np.asarray(g.columns[j], dtype=np.float64)
    elif a.kind is Kind.DISCRETIZED and j in g.raw:
        x = np.asarray(g.raw[j])
    else:
        raise ValueError(f"attribute {a.name!r} is nominal; only numeric attributes can be binned")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    ok = ~np.isnan(x)
    if not ok.any():
        raise ValueError(f"attribute {a.name!r} has no non-missing values")
    codes = np.full(len(x), bins, dtype=np.int64)
    codes[ok] = bin_values(x[ok], bins, method)
    attr = Attribute(a.name, Kind.DISCRETIZED, tuple(f"bin{k}" for k in range(bins)) + (MISSING,),
                     bins)
    return g.with_column(j, attr, codes, raw=x)


def bin_values(x: np.ndarray, bins: int, method: str = "width") -> np.ndarray:
    lo, hi = float(x.min()), float(x.max())
    if method == "width":
        if hi == lo:
            return np.zeros(len(x), dtype=np.int64)
        codes = np.floor((x - lo) / (hi - lo) * bins).astype(np.int64)
        return np.clip(codes, 0, bins - 1)
    if method == "quantile":
        edges = np.quantile(x, np.linspace(0.0, 1.0, bins + 1))
        return np.clip(np.searchsorted(edges[1:-1], x, side="right"), 0, bins - 1)
    raise ValueError(f"unknown binning method {method!r}")


def discretize_all(g: AttributedGraph, bins: int = 5, method: str = "width") -> AttributedGraph:
    for j, a in enumerate(g.attributes):
        if a.kind is Kind.CONTINUOUS:
            g = discretize(g, j, bins, method)
    return g
