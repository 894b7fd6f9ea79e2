"""Immutable graph container and edge-list / attribute parsing.

Node identity is a dense integer index assigned in first-appearance order of
the input tokens. The original tokens are kept as labels. Parallel edges are
collapsed (weights summed); self-loops are kept in the edge list but never
appear in neighbor sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Graph",
    "GraphParseError",
    "load_edge_list",
    "load_attributes",
    "neighbors",
]


class GraphParseError(ValueError):
    """Raised for malformed edge-list or attribute input."""


@dataclass(frozen=True)
class Graph:
    """A directed or undirected graph with optional node attributes.

    Treated as immutable: all operations that change a graph return a new one.
    `edges` has shape (l, 2) with dense node indices; undirected edges are
    stored once. `attributes` is an (n, m) float array or None;
    `attribute_names` has length m.
    """

    directed: bool
    labels: tuple[str, ...]
    edges: np.ndarray
    weights: np.ndarray
    attributes: np.ndarray | None = None
    attribute_names: tuple[str, ...] = ()
    # adjacency cache, built lazily; keyed by direction mode
    _adj: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def l(self) -> int:
        return len(self.edges)

    def adjacency(self, mode: str = "all") -> sp.csr_matrix:
        """0/1 neighbor matrix; row v marks the `mode` neighbors of v.

        mode "out": columns are targets of edges leaving v. mode "in":
        sources of edges entering v. mode "all": union of both. Undirected
        graphs return the symmetric matrix for every mode. Self-loops are
        excluded. Entries are 1.0 regardless of input edge weights.
        """
        if mode not in ("in", "out", "all"):
            raise ValueError(f"unknown direction mode: {mode!r}")
        if not self.directed:
            mode = "all"
        cached = self._adj.get(mode)
        if cached is not None:
            return cached
        n = self.n
        if self.l:
            src = self.edges[:, 0]
            dst = self.edges[:, 1]
            keep = src != dst  # self-loops never reach neighbor sets
            src, dst = src[keep], dst[keep]
        else:
            src = dst = np.empty(0, dtype=np.int64)
        if not self.directed:
            rows = np.concatenate([src, dst])
            cols = np.concatenate([dst, src])
        elif mode == "out":
            rows, cols = src, dst
        elif mode == "in":
            rows, cols = dst, src
        else:
            rows = np.concatenate([src, dst])
            cols = np.concatenate([dst, src])
        data = np.ones(len(rows), dtype=np.float64)
        mat = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
        mat.data[:] = 1.0  # collapse duplicates from the union
        mat.sum_duplicates()
        mat.data[:] = 1.0
        self._adj[mode] = mat
        return mat

    def with_attributes(
        self, values: np.ndarray, names: tuple[str, ...]
    ) -> "Graph":
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (self.n, len(names)):
            raise ValueError(
                f"attribute matrix shape {values.shape} does not match "
                f"{self.n} nodes x {len(names)} names"
            )
        return replace(self, attributes=values, attribute_names=tuple(names), _adj={})

    def to_json_dict(self) -> dict:
        """JSON-ready dict; round-trips exactly through from_json_dict."""
        out = {
            "directed": self.directed,
            "labels": list(self.labels),
            "edges": self.edges.tolist(),
            "weights": self.weights.tolist(),
        }
        if self.attributes is None:
            out["attributes"] = None
        else:
            out["attributes"] = {
                "names": list(self.attribute_names),
                "values": self.attributes.tolist(),
            }
        return out

    @staticmethod
    def from_json_dict(obj: dict) -> "Graph":
        edges = np.asarray(obj["edges"], dtype=np.int64).reshape(-1, 2)
        weights = np.asarray(obj["weights"], dtype=np.float64)
        attrs = obj.get("attributes")
        g = Graph(
            directed=bool(obj["directed"]),
            labels=tuple(str(s) for s in obj["labels"]),
            edges=edges,
            weights=weights,
        )
        _validate_edges(g)
        if attrs is not None:
            g = g.with_attributes(
                np.asarray(attrs["values"], dtype=np.float64),
                tuple(attrs["names"]),
            )
        return g


def _validate_edges(g: Graph) -> None:
    if g.l and (g.edges.min() < 0 or g.edges.max() >= g.n):
        raise GraphParseError("edge endpoint out of range")
    if len(g.weights) != g.l:
        raise GraphParseError("weights length does not match edge count")


def load_edge_list(
    text: str,
    directed: bool = False,
    delimiter: str | None = None,
    has_weights: bool = False,
    comment_prefix: str = "#",
) -> Graph:
    """Parse an edge list into a Graph.

    Each non-comment line is `source target` (plus `weight` when
    has_weights). Node tokens are arbitrary strings mapped to dense indices
    in first-appearance order. delimiter None auto-detects comma vs
    whitespace. Duplicate edges are collapsed with summed weights; for
    undirected graphs reversed duplicates collapse too.
    """
    index: dict[str, int] = {}
    labels: list[str] = []
    order: list[tuple[int, int]] = []
    acc: dict[tuple[int, int], float] = {}
    want = 3 if has_weights else 2
    saw_data = False

    def node_id(token: str) -> int:
        i = index.get(token)
        if i is None:
            i = len(labels)
            index[token] = i
            labels.append(token)
        return i

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or (comment_prefix and line.startswith(comment_prefix)):
            continue
        saw_data = True
        if delimiter is None:
            parts = line.split(",") if "," in line else line.split()
        else:
            parts = line.split(delimiter)
        parts = [p.strip() for p in parts if p.strip()]
        if len(parts) != want:
            raise GraphParseError(
                f"line {lineno}: expected {want} fields, got {len(parts)}"
            )
        s = node_id(parts[0])
        t = node_id(parts[1])
        if has_weights:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphParseError(
                    f"line {lineno}: weight {parts[2]!r} is not a number"
                ) from None
            if not np.isfinite(w):
                raise GraphParseError(f"line {lineno}: weight is not finite")
        else:
            w = 1.0
        key = (s, t)
        if not directed and t < s:
            key = (t, s)
        if key not in acc:
            acc[key] = 0.0
            order.append(key)
        acc[key] += w

    if not saw_data:
        raise GraphParseError("edge list contains no data lines")

    edges = np.asarray(order, dtype=np.int64).reshape(-1, 2)
    weights = np.asarray([acc[k] for k in order], dtype=np.float64)
    g = Graph(
        directed=directed,
        labels=tuple(labels),
        edges=edges,
        weights=weights,
    )
    _validate_edges(g)
    return g


def load_attributes(graph: Graph, text: str, delimiter: str = ",") -> Graph:
    """Attach per-node numeric attributes from CSV text.

    First row is a header: the first column holds node labels, remaining
    columns name the attributes. Exactly one row per node is required.
    Returns a new Graph; the input is untouched.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphParseError("attribute table is empty")
    header = [h.strip() for h in lines[0].split(delimiter)]
    if len(header) < 2:
        raise GraphParseError("attribute table needs at least one value column")
    names = tuple(header[1:])
    label_to_idx = {lab: i for i, lab in enumerate(graph.labels)}
    values = np.full((graph.n, len(names)), np.nan, dtype=np.float64)
    seen: set[int] = set()
    for lineno, raw in enumerate(lines[1:], start=2):
        parts = [p.strip() for p in raw.split(delimiter)]
        if len(parts) != len(header):
            raise GraphParseError(
                f"line {lineno}: expected {len(header)} fields, got {len(parts)}"
            )
        idx = label_to_idx.get(parts[0])
        if idx is None:
            raise GraphParseError(f"line {lineno}: unknown node label {parts[0]!r}")
        if idx in seen:
            raise GraphParseError(f"line {lineno}: duplicate row for node {parts[0]!r}")
        seen.add(idx)
        for j, cell in enumerate(parts[1:]):
            try:
                values[idx, j] = float(cell)
            except ValueError:
                raise GraphParseError(
                    f"line {lineno}: value {cell!r} is not a number"
                ) from None
    if len(seen) != graph.n:
        missing = graph.n - len(seen)
        raise GraphParseError(f"attribute table is missing {missing} node rows")
    return graph.with_attributes(values, names)


def neighbors(graph: Graph, v: int, mode: str = "all") -> set[int]:
    """Neighbor set of node v under the given direction mode."""
    if not 0 <= v < graph.n:
        raise IndexError(f"node index {v} out of range for n={graph.n}")
    adj = graph.adjacency(mode)
    return set(adj.indices[adj.indptr[v] : adj.indptr[v + 1]].tolist())
