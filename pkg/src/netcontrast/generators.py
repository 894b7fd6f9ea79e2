"""Seeded synthetic network generators: Gilbert and Price models."""

from __future__ import annotations

import numpy as np

from .graph import Graph

__all__ = ["gilbert", "price", "generate", "price_edge_count"]


def gilbert(n: int, p: float, seed: int = 0) -> Graph:
    """Undirected G(n, p): each unordered pair is an edge with probability p."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(len(iu)) < p
    edges = np.column_stack([iu[mask], ju[mask]]).astype(np.int64)
    return Graph(
        directed=False,
        labels=tuple(str(i) for i in range(n)),
        edges=edges,
        weights=np.ones(len(edges), dtype=np.float64),
    )


def price_edge_count(n: int, c: int) -> int:
    """Total links: the (c+1)-clique seed plus c per later node."""
    return c * (c + 1) // 2 + c * (n - c - 1)


def price(n: int, c: int = 3, a: float = 1.0, seed: int = 0) -> Graph:
    """Directed preferential-attachment growth (Price model).

    Starts from a (c+1)-clique whose edges point from higher to lower index.
    Each new node adds exactly c out-links to distinct existing nodes drawn
    with probability proportional to in-degree + a.
    """
    if c < 1:
        raise ValueError("c must be >= 1")
    if n <= c:
        raise ValueError("n must exceed c")
    if a <= 0:
        raise ValueError("attractiveness a must be positive")
    rng = np.random.default_rng(seed)
    seed_size = c + 1
    src: list[int] = []
    dst: list[int] = []
    indeg = np.zeros(n, dtype=np.float64)
    for i in range(seed_size):
        for j in range(i):
            src.append(i)
            dst.append(j)
            indeg[j] += 1
    for v in range(seed_size, n):
        weights = indeg[:v] + a
        targets = rng.choice(v, size=c, replace=False, p=weights / weights.sum())
        for t in targets:
            src.append(v)
            dst.append(int(t))
            indeg[t] += 1
    edges = np.column_stack([src, dst]).astype(np.int64)
    return Graph(
        directed=True,
        labels=tuple(str(i) for i in range(n)),
        edges=edges,
        weights=np.ones(len(edges), dtype=np.float64),
    )


def generate(spec: dict) -> Graph:
    """Build a graph from a generator spec dict.

    gilbert: {"kind": "gilbert", "n", "p", "seed"};
    price: {"kind": "price", "n", "c", "a", "seed"}.
    """
    kind = spec.get("kind")
    if kind == "gilbert":
        return gilbert(int(spec["n"]), float(spec["p"]), int(spec.get("seed", 0)))
    if kind == "price":
        return price(
            int(spec["n"]),
            int(spec.get("c", 3)),
            float(spec.get("a", 1.0)),
            int(spec.get("seed", 0)),
        )
    raise ValueError(f"unknown generator kind: {kind!r}")
