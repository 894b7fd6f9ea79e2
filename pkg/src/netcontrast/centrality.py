"""Per-node centrality measures used as base features.

All functions take an immutable Graph and return a NodeVector aligned to its
node indices. Directed graphs respect edge direction: closeness/betweenness
follow edges, eigenvector centrality is the right eigenvector of A, PageRank
normalizes by out-degree, Katz accumulates along incoming edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .graph import Graph

__all__ = [
    "NodeVector",
    "ConvergenceError",
    "degree",
    "kcore",
    "pagerank",
    "eigenvector_centrality",
    "katz_centrality",
    "spectral_radius_estimate",
    "closeness",
    "betweenness",
]


@dataclass(frozen=True)
class NodeVector:
    """A length-n real vector aligned to a graph's node indices."""

    values: np.ndarray
    name: str

    def __post_init__(self):
        object.__setattr__(
            self, "values", np.asarray(self.values, dtype=np.float64)
        )
        if self.values.ndim != 1:
            raise ValueError("NodeVector values must be one-dimensional")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"NodeVector {self.name!r} has non-finite entries")

    def __len__(self) -> int:
        return len(self.values)

    def to_json_dict(self) -> dict:
        return {"name": self.name, "values": self.values.tolist()}


class ConvergenceError(RuntimeError):
    """Iteration failed to converge; carries the last iterate."""

    def __init__(self, message: str, last_iterate: np.ndarray | None = None):
        super().__init__(message)
        self.last_iterate = last_iterate


def degree(graph: Graph, mode: str = "total") -> NodeVector:
    """Neighbor counts: mode one of in, out, total.

    total counts distinct in-or-out neighbors (the size of the `all`
    neighbor set), so it equals what relational sum over `all` neighbors of
    the ones vector produces. Self-loops never count.
    """
    if mode not in ("in", "out", "total"):
        raise ValueError(f"unknown degree mode: {mode!r}")
    adj = graph.adjacency("all" if mode == "total" else mode)
    counts = np.diff(adj.indptr).astype(np.float64)
    return NodeVector(counts, f"{mode}-degree")


def kcore(graph: Graph) -> NodeVector:
    """Core numbers via iterative min-degree peeling (total degree)."""
    n = graph.n
    adj = graph.adjacency("all")
    deg = np.diff(adj.indptr).astype(np.int64)
    if n == 0:
        return NodeVector(np.zeros(0), "k-core")
    md = int(deg.max())
    # bucket-sorted peeling; vert is sorted by current degree throughout
    vert = np.argsort(deg, kind="stable")
    pos = np.empty(n, dtype=np.int64)
    pos[vert] = np.arange(n)
    bin_start = np.zeros(md + 2, dtype=np.int64)
    counts = np.bincount(deg, minlength=md + 1)
    bin_start[1 : md + 2] = np.cumsum(counts)
    bin_start = bin_start[: md + 1].copy()
    cur = deg.copy()
    core = np.zeros(n, dtype=np.int64)
    indices, indptr = adj.indices, adj.indptr
    for i in range(n):
        v = vert[i]
        core[v] = cur[v]
        for u in indices[indptr[v] : indptr[v + 1]]:
            if cur[u] > cur[v]:
                du = cur[u]
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    vert[pu], vert[pw] = w, u
                    pos[u], pos[w] = pw, pu
                bin_start[du] += 1
                cur[u] -= 1
    return NodeVector(core.astype(np.float64), "k-core")


def pagerank(
    graph: Graph,
    damping: float = 0.85,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> NodeVector:
    """Power-iteration PageRank; dangling mass spread uniformly.

    Stops when the L1 change drops below tol. Raises ConvergenceError
    (carrying the last iterate) after max_iter.
    """
    n = graph.n
    if n < 1:
        raise ValueError("pagerank needs at least one node")
    out_adj = graph.adjacency("out")
    outdeg = np.diff(out_adj.indptr).astype(np.float64)
    dangling = outdeg == 0
    x = np.full(n, 1.0 / n)
    base = (1.0 - damping) / n
    for _ in range(max_iter):
        contrib = np.where(dangling, 0.0, x / np.where(dangling, 1.0, outdeg))
        x_new = out_adj.T @ contrib
        x_new = damping * (x_new + x[dangling].sum() / n) + base
        if np.abs(x_new - x).sum() < tol:
            return NodeVector(x_new, "pagerank")
        x = x_new
    raise ConvergenceError(
        f"pagerank did not converge in {max_iter} iterations", last_iterate=x
    )


def spectral_radius_estimate(graph: Graph, max_iter: int = 200) -> float:
    """Power-iteration estimate of the adjacency spectral radius.

    Returns 0.0 when the iterate collapses (edgeless or acyclic-directed
    graphs, where the radius is genuinely 0).
    """
    n = graph.n
    if n == 0 or graph.l == 0:
        return 0.0
    A = graph.adjacency("out")
    x = np.full(n, 1.0 / math.sqrt(n))
    est = 0.0
    for _ in range(max_iter):
        y = A @ x
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            return 0.0
        if abs(norm - est) < 1e-10 * max(1.0, norm):
            return norm
        est = norm
        x = y / norm
    return est


def eigenvector_centrality(
    graph: Graph, tol: float = 1e-9, max_iter: int = 1000
) -> NodeVector:
    """Dominant adjacency eigenvector, L2-normalized, non-negative.

    Uses the (I + A) shift so connected bipartite graphs converge instead of
    oscillating. Directed graphs use the right eigenvector of A. Graphs with
    zero spectral radius (DAGs) do not converge; the error advises Katz.
    """
    n = graph.n
    if graph.l == 0:
        raise ValueError("eigenvector centrality needs at least one edge")
    A = graph.adjacency("out")
    x = np.full(n, 1.0 / math.sqrt(n))
    for _ in range(max_iter):
        y = x + A @ x  # shift keeps bipartite graphs from oscillating
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            raise ConvergenceError(
                "eigenvector iterate collapsed to zero", last_iterate=x
            )
        y /= norm
        if float(np.linalg.norm(y - x)) < tol:
            if y.sum() < 0:
                y = -y
            return NodeVector(y, "eigenvector")
        x = y
    raise ConvergenceError(
        f"eigenvector centrality did not converge in {max_iter} iterations "
        "(zero or near-tied spectral radius, e.g. a DAG); "
        "consider katz_centrality instead",
        last_iterate=x,
    )


def katz_centrality(
    graph: Graph,
    attenuation: float | None = None,
    beta: float = 1.0,
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> NodeVector:
    """Katz centrality x = attenuation * A^T x + beta * 1, L2-normalized.

    attenuation defaults to 0.9 / (spectral radius estimate); values at or
    above 1/radius are rejected. A zero radius estimate (edgeless, DAG)
    leaves the series finite, so any attenuation is accepted and the default
    falls back to 0.9.
    """
    n = graph.n
    if n < 1:
        raise ValueError("katz centrality needs at least one node")
    rho = spectral_radius_estimate(graph)
    if attenuation is None:
        attenuation = 0.9 / rho if rho > 0 else 0.9
    elif rho > 0 and attenuation >= 1.0 / rho:
        raise ValueError(
            f"attenuation {attenuation} >= 1/spectral-radius ({1.0 / rho:.6g}); "
            "the Katz series diverges"
        )
    in_adj = graph.adjacency("in")  # row v lists u with u -> v
    x = np.full(n, beta)
    for _ in range(max_iter):
        x_new = attenuation * (in_adj @ x) + beta
        if np.abs(x_new - x).max() < tol:
            norm = float(np.linalg.norm(x_new))
            return NodeVector(x_new / norm, "katz")
        x = x_new
    raise ConvergenceError(
        f"katz centrality did not converge in {max_iter} iterations",
        last_iterate=x,
    )


def _distance_rows(graph: Graph, sources: np.ndarray) -> np.ndarray:
    """BFS distances from each source along edge direction."""
    A = graph.adjacency("out")
    return shortest_path(
        A, method="D", directed=graph.directed, unweighted=True, indices=sources
    )


def closeness(graph: Graph) -> NodeVector:
    """Harmonic closeness: mean of 1/dist(v,u) over u != v.

    Unreachable nodes contribute 0, so disconnected graphs need no special
    casing; an isolated node scores 0. Sums use math.fsum so results are
    exactly rounded.
    """
    n = graph.n
    if n <= 1:
        return NodeVector(np.zeros(n), "closeness")
    out = np.zeros(n)
    block = 512  # cap the distance-matrix slab
    for start in range(0, n, block):
        idx = np.arange(start, min(start + block, n))
        dist = np.atleast_2d(_distance_rows(graph, idx))
        for row, v in enumerate(idx):
            d = dist[row]
            terms = [1.0 / d[u] for u in range(n) if u != v and np.isfinite(d[u])]
            out[v] = math.fsum(terms) / (n - 1)
    return NodeVector(out, "closeness")


def betweenness(graph: Graph) -> NodeVector:
    """Unnormalized shortest-path betweenness (Brandes, unweighted).

    Path counts are exact integers and dependency accumulation uses
    Fractions, converted to float once at the end, so results are exactly
    rounded. Undirected graphs count each node pair once.
    """
    n = graph.n
    adj = graph.adjacency("out")
    indices, indptr = adj.indices, adj.indptr
    acc = [Fraction(0)] * n
    for s in range(n):
        # BFS with path counting
        dist = [-1] * n
        sigma = [0] * n
        preds: list[list[int]] = [[] for _ in range(n)]
        dist[s] = 0
        sigma[s] = 1
        order = [s]
        head = 0
        while head < len(order):
            v = order[head]
            head += 1
            for u in indices[indptr[v] : indptr[v + 1]]:
                u = int(u)
                if dist[u] < 0:
                    dist[u] = dist[v] + 1
                    order.append(u)
                if dist[u] == dist[v] + 1:
                    sigma[u] += sigma[v]
                    preds[u].append(v)
        # dependency accumulation in reverse BFS order
        delta = [Fraction(0)] * n
        for u in reversed(order):
            coeff = (1 + delta[u]) / sigma[u]
            for v in preds[u]:
                delta[v] += sigma[v] * coeff
            if u != s:
                acc[u] += delta[u]
    if not graph.directed:
        acc = [a / 2 for a in acc]
    return NodeVector(np.array([float(a) for a in acc]), "betweenness")
