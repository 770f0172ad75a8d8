"""Planted-partition graphs with a homophilic block attribute and random noise attributes."""
from __future__ import annotations

import numpy as np

from .graph import MISSING, Attribute, AttributedGraph, Kind, from_edge_array


def _triangle_pairs(k: np.ndarray, s: int):
    """Decode linear indices into the strict upper triangle of an ``s x s`` block."""
    k = k.astype(np.int64)
    i = s - 2 - np.floor(np.sqrt(-8.0 * k + 4.0 * s * (s - 1) - 7) / 2.0 - 0.5).astype(np.int64)
    j = k + i + 1 - s * (s - 1) // 2 + (s - i) * (s - i - 1) // 2
    return i, j


def _sample(rng, population: int, p: float) -> np.ndarray:
    count = rng.binomial(population, p)
    return rng.choice(population, size=count, replace=False) if count else np.empty(0, np.int64)


def planted_partition(nodes: int, blocks: int, p_in: float, p_out: float,
                      noise_attrs: int = 0, seed: int = 42, noise_levels: int = 3
                      ) -> AttributedGraph:
    """Undirected planted-partition graph.

    Nodes are split into ``blocks`` near-equal groups assigned in random
    order. Each same-block pair is an edge with probability ``p_in`` and each
    cross-block pair with ``p_out``. Attribute ``block`` holds the group;
    ``noise1..`` are independent uniform nominal attributes.
    """
    for name, p in (("p_in", p_in), ("p_out", p_out)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {p}")
    if blocks < 1 or nodes < blocks:
        raise ValueError("need at least one node per block")
    rng = np.random.default_rng(seed)
    block_of = rng.permutation(np.arange(nodes) % blocks)
    members = [np.nonzero(block_of == b)[0] for b in range(blocks)]

    edges = []
    for a in range(blocks):
        ma = members[a]
        s = len(ma)
        if s > 1:
            i, j = _triangle_pairs(_sample(rng, s * (s - 1) // 2, p_in), s)
            edges.append(np.column_stack([ma[i], ma[j]]))
        for b in range(a + 1, blocks):
            mb = members[b]
            k = _sample(rng, s * len(mb), p_out)
            edges.append(np.column_stack([ma[k // len(mb)], mb[k % len(mb)]]))
    e = np.concatenate(edges) if edges else np.empty((0, 2), dtype=np.int64)

    attrs = [Attribute("block", Kind.NOMINAL, tuple(f"B{b}" for b in range(blocks)) + (MISSING,),
                       blocks)]
    cols = [block_of.astype(np.int64)]
    for q in range(noise_attrs):
        attrs.append(Attribute(f"noise{q + 1}", Kind.NOMINAL,
                               tuple(f"x{k}" for k in range(noise_levels)) + (MISSING,),
                               noise_levels))
        cols.append(rng.integers(0, noise_levels, size=nodes))
    return from_edge_array(nodes, e, attrs, cols)
