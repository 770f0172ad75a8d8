"""Mixing matrices and the PRONE proclivity index between attribute pairs.

A mixing matrix counts, for every edge ``{u, v}``, the level pair
``(a_i(u), a_j(v))`` in both orientations. The divergence of that matrix under
a generative function ``f`` measures how far it is from the independence
product of its margins; PRONE is ``1 - divergence``.
"""
from __future__ import annotations

import csv
import enum
import json
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .graph import AttributedGraph

logger = logging.getLogger(__name__)


class UndefinedDivergence(ArithmeticError):
    """The divergence denominator vanished (e.g. a single-level mixing matrix)."""


class UndefinedDivergenceWarning(RuntimeWarning):
    pass


class GenerativeFunction(str, enum.Enum):
    SQUARE = "square"
    CUBE = "cube"
    XLOGX = "xlogx"

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self is GenerativeFunction.SQUARE:
            return x * x
        if self is GenerativeFunction.CUBE:
            return x * x * x
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = x[pos] * np.log(x[pos])
        return out

    @classmethod
    def parse(cls, value) -> "GenerativeFunction":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


DEFAULT_GENERATIVE = GenerativeFunction.XLOGX


@dataclass(frozen=True)
class MixingMatrix:
    counts: np.ndarray
    attribute_pair: tuple[int, int] = (0, 0)

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self):
        return self.counts.sum()

    def without_level(self, row: int | None, col: int | None) -> "MixingMatrix":
        c = np.array(self.counts)
        if row is not None:
            c[row, :] = 0
        if col is not None:
            c[:, col] = 0
        return MixingMatrix(c, self.attribute_pair)


def mixing_matrix(g: AttributedGraph, i: int | str, j: int | str) -> MixingMatrix:
    """Level-pair edge counts between attributes ``i`` and ``j``.

    One pass over the CSR arrays; each undirected edge is seen once from each
    endpoint, which is exactly the both-orientation count.
    """
    i, j = g.attribute_index(i), g.attribute_index(j)
    ai, aj = g.attributes[i], g.attributes[j]
    for a in (ai, aj):
        if not a.discrete:
            raise ValueError(f"attribute {a.name!r} is continuous; discretize it first")
    src_code = np.repeat(g.columns[i], g.degrees)
    dst_code = g.columns[j][g.indices]
    flat = np.bincount(src_code * aj.n_levels + dst_code,
                       minlength=ai.n_levels * aj.n_levels)
    return MixingMatrix(flat.reshape(ai.n_levels, aj.n_levels), (i, j))


def _fsum(a) -> float:
    return math.fsum(np.ravel(a).tolist())


def divergence(M: MixingMatrix | np.ndarray, f: GenerativeFunction = DEFAULT_GENERATIVE) -> float:
    """Divergence of a nonnegative matrix with respect to generative function ``f``.

    Sums are accumulated with ``math.fsum`` since numerator and denominator
    are both differences of comparable magnitudes.
    """
    f = GenerativeFunction.parse(f)
    e = np.asarray(M.counts if isinstance(M, MixingMatrix) else M, dtype=np.float64)
    total = e.sum()
    if total <= 0:
        raise UndefinedDivergence("mixing matrix has no entries")
    rows = e.sum(axis=1)
    cols = e.sum(axis=0)
    f_rows, f_cols = f(rows), f(cols)
    f_cells = f(e)
    f_indep = f(np.outer(rows, cols) / total)
    num = _fsum([_fsum(f_rows), _fsum(f_cols), -2.0 * _fsum(f_cells)])
    den = _fsum([_fsum(f_rows), _fsum(f_cols), -2.0 * _fsum(f_indep)])
    scale = abs(_fsum(f_rows)) + abs(_fsum(f_cols)) + 2.0 * abs(_fsum(f_indep))
    if den == 0.0 or abs(den) <= 1e-13 * scale:
        raise UndefinedDivergence("divergence denominator is zero")
    return num / den


def prone(M: MixingMatrix | np.ndarray, f: GenerativeFunction = DEFAULT_GENERATIVE) -> float:
    """Proclivity index ``1 - D_f``; 0 (with a warning) when the divergence is undefined."""
    try:
        return 1.0 - divergence(M, f)
    except UndefinedDivergence as exc:
        warnings.warn(f"{exc}; using proclivity 0", UndefinedDivergenceWarning, stacklevel=2)
        return 0.0


@dataclass
class ProclivityMatrix:
    values: np.ndarray
    names: list[str]
    generative: GenerativeFunction = DEFAULT_GENERATIVE
    undefined: np.ndarray = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.undefined is None:
            self.undefined = np.zeros(self.values.shape, dtype=bool)

    def row(self, target: int) -> np.ndarray:
        return self.values[target]

    def to_dict(self) -> dict:
        return {
            "attributes": list(self.names),
            "generative": self.generative.value,
            "values": self.values.tolist(),
            "undefined": self.undefined.tolist(),
        }

    def format_table(self, digits: int = 4) -> str:
        width = max([len(x) for x in self.names] + [digits + 4])
        lines = [" " * width + "".join(f" {x:>{width}}" for x in self.names)]
        for name, row in zip(self.names, self.values):
            lines.append(f"{name:<{width}}" + "".join(f" {v:>{width}.{digits}f}" for v in row))
        return "\n".join(lines)


def prone_matrix(g: AttributedGraph, f: GenerativeFunction = DEFAULT_GENERATIVE,
                 exclude_missing: bool = False) -> ProclivityMatrix:
    """PRONE for every ordered attribute pair of ``g``.

    With ``exclude_missing`` the missing-level row and column are zeroed before
    the divergence is taken.
    """
    f = GenerativeFunction.parse(f)
    t = g.t
    vals = np.zeros((t, t))
    undefined = np.zeros((t, t), dtype=bool)
    for i in range(t):
        for j in range(t):
            M = mixing_matrix(g, i, j)
            if exclude_missing:
                M = M.without_level(g.attributes[i].missing_index, g.attributes[j].missing_index)
            try:
                vals[i, j] = 1.0 - divergence(M, f)
            except UndefinedDivergence:
                undefined[i, j] = True
    if undefined.any():
        pairs = [(g.attributes[i].name, g.attributes[j].name) for i, j in zip(*np.nonzero(undefined))]
        logger.warning("undefined divergence for %d pair(s), proclivity set to 0: %s",
                       len(pairs), pairs)
    return ProclivityMatrix(vals, g.attribute_names, f, undefined)


def export_heatmap(P: ProclivityMatrix, path) -> None:
    """CSV with attribute names as header row and first column, 6 decimals."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["attribute", *P.names])
        for name, row in zip(P.names, P.values):
            w.writerow([name, *(f"{v:.6f}" for v in row)])


def read_heatmap(path, generative: GenerativeFunction = DEFAULT_GENERATIVE) -> ProclivityMatrix:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    names = rows[0][1:]
    if [r[0] for r in rows[1:]] != names:
        raise ValueError("heatmap row labels do not match the header")
    return ProclivityMatrix(np.array([[float(x) for x in r[1:]] for r in rows[1:]]), names,
                            GenerativeFunction.parse(generative))


def export_json(P: ProclivityMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(P.to_dict(), fh, indent=2)
