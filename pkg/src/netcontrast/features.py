"""Interpretable per-node feature learning.

A feature is a base measure (centrality or attribute column) pushed through a
chain of relational operators, each summarizing the previous values over
one-hop neighborhoods. Learning enumerates candidate chains layer by layer on
the target graph and prunes near-duplicates by log-binned agreement; the
surviving definitions are then evaluated unchanged on both graphs so the two
feature matrices share columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import centrality
from .graph import Graph

__all__ = [
    "BASE_KINDS",
    "SUMMARIES",
    "DIRECTIONS",
    "BaseFeature",
    "RelationalOperator",
    "FeatureDefinition",
    "FeatureMatrix",
    "FeatureConfig",
    "default_config",
    "compute_base",
    "apply_rfo",
    "evaluate_feature",
    "log_binning",
    "learn_features",
    "build_feature_matrices",
    "FeatureEvaluator",
]

BASE_KINDS = (
    "in-degree",
    "out-degree",
    "total-degree",
    "k-core",
    "pagerank",
    "eigenvector",
    "katz",
    "closeness",
    "betweenness",
    "attribute",
)
SUMMARIES = ("mean", "sum", "max", "l2norm")
DIRECTIONS = ("in", "out", "all")


@dataclass(frozen=True)
class BaseFeature:
    """A per-node base measure; attribute bases carry a column index."""

    kind: str
    index: int | None = None

    def __post_init__(self):
        if self.kind not in BASE_KINDS:
            raise ValueError(f"unknown base feature kind: {self.kind!r}")
        if self.kind == "attribute":
            if self.index is None or self.index < 0:
                raise ValueError("attribute base needs a column index >= 0")
        elif self.index is not None:
            raise ValueError(f"{self.kind} takes no index")

    def token(self) -> str:
        if self.kind == "attribute":
            return f"attribute:{self.index}"
        return self.kind

    @staticmethod
    def from_token(token: str) -> "BaseFeature":
        if token.startswith("attribute:"):
            return BaseFeature("attribute", int(token.split(":", 1)[1]))
        return BaseFeature(token)


@dataclass(frozen=True)
class RelationalOperator:
    """One neighborhood summarization step."""

    summary: str
    direction: str

    def __post_init__(self):
        if self.summary not in SUMMARIES:
            raise ValueError(f"unknown summary: {self.summary!r}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown direction: {self.direction!r}")

    def token(self) -> str:
        return f"{self.summary}_{self.direction}"


@dataclass(frozen=True)
class FeatureDefinition:
    """A base feature plus a chain of operators in computation order.

    chain[0] is applied to the base values first. The id is stable for the
    lifetime of the learned feature set.
    """

    base: BaseFeature
    chain: tuple[RelationalOperator, ...]
    id: int

    def label(self) -> str:
        """Human-readable nesting, outermost operator last applied."""
        out = self.base.token()
        for op in self.chain:
            out = f"{op.token()}({out})"
        return out

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "base": self.base.token(),
            "chain": [
                {"summary": op.summary, "direction": op.direction}
                for op in self.chain
            ],
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "FeatureDefinition":
        return FeatureDefinition(
            base=BaseFeature.from_token(obj["base"]),
            chain=tuple(
                RelationalOperator(step["summary"], step["direction"])
                for step in obj["chain"]
            ),
            id=int(obj["id"]),
        )


@dataclass(frozen=True)
class FeatureMatrix:
    """n x d matrix of feature values plus the defining list of features."""

    values: np.ndarray
    definitions: tuple[FeatureDefinition, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "values", np.asarray(self.values, dtype=np.float64)
        )
        if self.values.ndim != 2:
            raise ValueError("feature matrix must be two-dimensional")
        if self.values.shape[1] != len(self.definitions):
            raise ValueError("column count does not match definitions")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature matrix has non-finite entries")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def compute_base(graph: Graph, base: BaseFeature) -> centrality.NodeVector:
    """Evaluate one base measure on a graph."""
    kind = base.kind
    if kind == "attribute":
        if graph.attributes is None or base.index >= graph.attributes.shape[1]:
            have = 0 if graph.attributes is None else graph.attributes.shape[1]
            raise ValueError(
                f"attribute column {base.index} out of range (graph has {have})"
            )
        return centrality.NodeVector(
            graph.attributes[:, base.index].copy(), base.token()
        )
    if kind in ("in-degree", "out-degree", "total-degree"):
        return centrality.degree(graph, kind.split("-", 1)[0])
    if kind == "k-core":
        return centrality.kcore(graph)
    if kind == "pagerank":
        return centrality.pagerank(graph)
    if kind == "eigenvector":
        return centrality.eigenvector_centrality(graph)
    if kind == "katz":
        return centrality.katz_centrality(graph)
    if kind == "closeness":
        return centrality.closeness(graph)
    if kind == "betweenness":
        return centrality.betweenness(graph)
    raise ValueError(f"unknown base feature kind: {kind!r}")  # unreachable


def apply_rfo(
    graph: Graph, values: centrality.NodeVector, op: RelationalOperator
) -> centrality.NodeVector:
    """Summarize values over each node's one-hop neighbors.

    Empty neighbor sets yield 0 for every summary so downstream matrices
    stay finite.
    """
    x = values.values
    if len(x) != graph.n:
        raise ValueError("values length does not match graph size")
    adj = graph.adjacency(op.direction)
    counts = np.diff(adj.indptr)
    if op.summary == "sum":
        out = adj @ x
    elif op.summary == "mean":
        out = adj @ x
        nz = counts > 0
        out[nz] /= counts[nz]
        out[~nz] = 0.0
    elif op.summary == "l2norm":
        out = np.sqrt(adj @ (x * x))
    else:  # max
        out = np.zeros(graph.n)
        nz = counts > 0
        if nz.any():
            gathered = x[adj.indices]
            starts = adj.indptr[:-1][nz]
            out[nz] = np.maximum.reduceat(gathered, starts)
    return centrality.NodeVector(out, f"{op.token()}({values.name})")


class FeatureEvaluator:
    """Evaluates definitions on one graph, memoizing shared stage prefixes."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self._stages: dict[tuple, centrality.NodeVector] = {}

    def stages(self, base: BaseFeature, chain: tuple[RelationalOperator, ...]):
        """All stage vectors: base values first, one more per operator."""
        out = []
        key: tuple = (base.token(),)
        vec = self._stages.get(key)
        if vec is None:
            vec = compute_base(self.graph, base)
            self._stages[key] = vec
        out.append(vec)
        for op in chain:
            key = key + (op.token(),)
            nxt = self._stages.get(key)
            if nxt is None:
                nxt = apply_rfo(self.graph, vec, op)
                self._stages[key] = nxt
            out.append(nxt)
            vec = nxt
        return out

    def final(self, base, chain) -> centrality.NodeVector:
        return self.stages(base, chain)[-1]


def evaluate_feature(graph: Graph, definition: FeatureDefinition) -> dict:
    """Compute a definition on a graph.

    Returns {"final": NodeVector, "stages": [NodeVector, ...]} where
    stages[0] holds the base values and each following stage applies the
    next operator in the chain.
    """
    stages = FeatureEvaluator(graph).stages(definition.base, definition.chain)
    return {"final": stages[-1], "stages": stages}


def log_binning(
    values: centrality.NodeVector, bin_fraction: float = 0.5
) -> centrality.NodeVector:
    """Assign integer bins by ascending rank, halving-style.

    The first ceil(bin_fraction * n) ranked nodes get bin 0, the next
    ceil(bin_fraction * remaining) bin 1, and so on. Ties share the bin of
    their first-ranked member.
    """
    if not 0.0 < bin_fraction < 1.0:
        raise ValueError("bin_fraction must be in (0, 1)")
    x = values.values
    n = len(x)
    order = np.argsort(x, kind="stable")
    rank_bin = np.zeros(n, dtype=np.int64)
    pos, remaining, b = 0, n, 0
    while remaining > 0:
        take = math.ceil(bin_fraction * remaining)
        rank_bin[pos : pos + take] = b
        pos += take
        remaining -= take
        b += 1
    # ties share the first member's bin
    for i in range(1, n):
        if x[order[i]] == x[order[i - 1]]:
            rank_bin[i] = rank_bin[i - 1]
    out = np.zeros(n, dtype=np.int64)
    out[order] = rank_bin
    return centrality.NodeVector(out.astype(np.float64), f"bins({values.name})")


@dataclass(frozen=True)
class FeatureConfig:
    """Search space and pruning knobs for learn_features."""

    bases: tuple[BaseFeature, ...]
    summaries: tuple[str, ...] = ("mean", "sum", "max")
    directions: tuple[str, ...] | None = None  # None: derived from the graph
    max_hops: int = 2
    prune_threshold: float = 0.9
    bin_fraction: float = 0.5

    def resolved_directions(self, directed: bool) -> tuple[str, ...]:
        if self.directions is not None:
            return self.directions
        return ("in", "out", "all") if directed else ("all",)

    def to_json_dict(self) -> dict:
        return {
            "bases": [b.token() for b in self.bases],
            "summaries": list(self.summaries),
            "directions": None if self.directions is None else list(self.directions),
            "max_hops": self.max_hops,
            "prune_threshold": self.prune_threshold,
            "bin_fraction": self.bin_fraction,
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "FeatureConfig":
        return FeatureConfig(
            bases=tuple(BaseFeature.from_token(t) for t in obj["bases"]),
            summaries=tuple(obj["summaries"]),
            directions=None
            if obj.get("directions") is None
            else tuple(obj["directions"]),
            max_hops=int(obj["max_hops"]),
            prune_threshold=float(obj["prune_threshold"]),
            bin_fraction=float(obj["bin_fraction"]),
        )


def default_config(directed: bool) -> FeatureConfig:
    """Default search space; out-degree only makes sense when directed."""
    kinds = ["total-degree", "in-degree"]
    if directed:
        kinds.append("out-degree")
    kinds += ["k-core", "pagerank", "eigenvector", "katz"]
    return FeatureConfig(bases=tuple(BaseFeature(k) for k in kinds))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _agreement(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.mean(a == b))


def learn_features(target: Graph, config: FeatureConfig) -> list[FeatureDefinition]:
    """Enumerate and prune relational features on the target graph.

    Layer 0 candidates are the configured bases; layer k applies every
    configured operator to each layer k-1 survivor. After each layer the
    pool of all survivors plus new candidates is pruned: features whose
    log-binned values agree on at least prune_threshold of nodes are linked,
    and each connected component keeps its simplest member (shortest chain,
    then earliest base, then operator enumeration order). Earlier survivors
    are never displaced. Survivors across layers 0..max_hops are returned
    with stable sequential ids.
    """
    if not config.bases:
        raise ValueError("learn_features needs at least one base feature")
    if config.max_hops < 0:
        raise ValueError("max_hops must be >= 0")
    directions = config.resolved_directions(target.directed)
    operators = [
        RelationalOperator(s, d) for s in config.summaries for d in directions
    ]
    evaluator = FeatureEvaluator(target)
    lam = config.prune_threshold

    # survivors: list of (base, chain, bins); enumeration order is already
    # simplicity order (shorter chain first, then base order, then operator
    # order), so "first in component" is "simplest in component".
    survivors: list[tuple[BaseFeature, tuple, np.ndarray]] = []
    last_layer: list[tuple[BaseFeature, tuple]] = []

    for layer in range(config.max_hops + 1):
        if layer == 0:
            candidates = [(b, ()) for b in config.bases]
        else:
            candidates = [
                (base, chain + (op,)) for base, chain in last_layer for op in operators
            ]
        if not candidates:
            break
        cand_bins = [
            log_binning(evaluator.final(b, ch), config.bin_fraction).values
            for b, ch in candidates
        ]
        uf = _UnionFind(len(survivors) + len(candidates))
        pool_bins = [s[2] for s in survivors] + cand_bins
        base_count = len(survivors)
        for i in range(base_count, len(pool_bins)):
            for j in range(i):  # old survivors never agree with each other
                if _agreement(pool_bins[i], pool_bins[j]) >= lam:
                    uf.union(i, j)
        kept_roots = {uf.find(i) for i in range(base_count)}
        new_layer: list[tuple[BaseFeature, tuple]] = []
        for offset, (b, ch) in enumerate(candidates):
            root = uf.find(base_count + offset)
            if root in kept_roots:
                continue
            kept_roots.add(root)
            survivors.append((b, ch, cand_bins[offset]))
            new_layer.append((b, ch))
        last_layer = new_layer
        if not last_layer:
            break

    return [
        FeatureDefinition(base=b, chain=ch, id=i)
        for i, (b, ch, _) in enumerate(survivors)
    ]


def build_feature_matrices(
    defs: list[FeatureDefinition], target: Graph, background: Graph
) -> tuple[FeatureMatrix, FeatureMatrix]:
    """Evaluate the same definitions on both graphs.

    No selection happens here; the definitions list is shared verbatim by
    both outputs. Attribute bases missing on either graph raise with the
    offending definition labels.
    """
    shared = tuple(defs)
    bad = []
    for d in shared:
        if d.base.kind == "attribute":
            for g, tag in ((target, "target"), (background, "background")):
                have = 0 if g.attributes is None else g.attributes.shape[1]
                if d.base.index >= have:
                    bad.append(f"feature {d.id} ({d.label()}) on {tag}")
    if bad:
        raise ValueError("attribute base out of range: " + "; ".join(bad))
    mats = []
    for g in (target, background):
        ev = FeatureEvaluator(g)
        cols = [ev.final(d.base, d.chain).values for d in shared]
        values = (
            np.column_stack(cols) if cols else np.zeros((g.n, 0), dtype=np.float64)
        )
        mats.append(FeatureMatrix(values=values, definitions=shared))
    return mats[0], mats[1]
