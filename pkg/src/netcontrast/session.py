"""Analysis session: full pipeline state plus every interactive mutation.

A Session owns both graphs, the learned feature definitions, the feature
matrices, the fitted contrastive model, the 2-D embedding, and the two
layouts. All steering operations (alpha updates with sign stabilization,
component rotation, feature selection, linked selection) go through it; the
embedding is always re-derived from (matrices, model), never patched.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field

import numpy as np

from . import contrast, features, layout
from .contrast import CpcaModel, Embedding
from .features import FeatureConfig, FeatureDefinition, FeatureMatrix
from .graph import Graph

__all__ = [
    "SessionConfig",
    "Session",
    "PipelineCancelled",
    "run_pipeline",
    "restore_session",
]


class PipelineCancelled(RuntimeError):
    pass


@dataclass(frozen=True)
class SessionConfig:
    """Pipeline knobs; None fields fall back to data-driven defaults."""

    feature: FeatureConfig | None = None
    alpha: float | None = None  # None selects alpha automatically
    alpha_grid: tuple[float, ...] = contrast.DEFAULT_ALPHA_GRID
    standardize: bool = False
    d_prime: int = 2
    screen_bases: bool = True
    layout_iterations: int = 500
    layout_seed: int = 42
    layout_theta: float = 0.9

    def to_json_dict(self) -> dict:
        return {
            "feature": None if self.feature is None else self.feature.to_json_dict(),
            "alpha": self.alpha,
            "alpha_grid": list(self.alpha_grid),
            "standardize": self.standardize,
            "d_prime": self.d_prime,
            "screen_bases": self.screen_bases,
            "layout_iterations": self.layout_iterations,
            "layout_seed": self.layout_seed,
            "layout_theta": self.layout_theta,
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "SessionConfig":
        return SessionConfig(
            feature=None
            if obj.get("feature") is None
            else FeatureConfig.from_json_dict(obj["feature"]),
            alpha=obj.get("alpha"),
            alpha_grid=tuple(obj.get("alpha_grid", contrast.DEFAULT_ALPHA_GRID)),
            standardize=bool(obj.get("standardize", False)),
            d_prime=int(obj.get("d_prime", 2)),
            screen_bases=bool(obj.get("screen_bases", True)),
            layout_iterations=int(obj.get("layout_iterations", 500)),
            layout_seed=int(obj.get("layout_seed", 42)),
            layout_theta=float(obj.get("layout_theta", 0.9)),
        )


@dataclass
class Session:
    id: str
    target: Graph
    background: Graph
    config: SessionConfig
    definitions: tuple[FeatureDefinition, ...]
    X_T: FeatureMatrix
    X_B: FeatureMatrix
    model: CpcaModel
    embedding: Embedding
    layout_target: layout.LayoutPositions
    layout_background: layout.LayoutPositions
    current_feature: int
    selection: set = field(default_factory=set)
    warnings: list = field(default_factory=list)
    notices: list = field(default_factory=list)
    feature_pinned: bool = False
    _evaluators: dict = field(default_factory=dict, repr=False)

    # -- helpers ---------------------------------------------------------

    def _graph(self, which: str) -> Graph:
        if which == "target":
            return self.target
        if which == "background":
            return self.background
        raise ValueError(f"unknown network tag: {which!r}")

    def _evaluator(self, which: str) -> features.FeatureEvaluator:
        ev = self._evaluators.get(which)
        if ev is None:
            ev = features.FeatureEvaluator(self._graph(which))
            self._evaluators[which] = ev
        return ev

    def _definition(self, def_id: int) -> FeatureDefinition:
        for d in self.definitions:
            if d.id == def_id:
                return d
        raise KeyError(f"unknown feature definition id: {def_id}")

    def _default_feature(self) -> int:
        scaled = self.model.scaled_loadings
        return int(self.definitions[int(np.argmax(np.abs(scaled[:, 0])))].id)

    def _refresh_embedding(self) -> None:
        self.embedding = contrast.make_embedding(self.X_T, self.X_B, self.model)

    # -- steering --------------------------------------------------------

    def update_alpha(self, alpha: float) -> "Session":
        """Refit at a new alpha, keeping axis orientations stable.

        The fresh fit is sign-corrected against the previous embedding. A
        user rotation does not survive a refit; when one is discarded a
        'rotation_reset' notice is queued for the caller.
        """
        if not (np.isfinite(alpha) and alpha >= 0):
            raise ValueError("alpha must be a finite non-negative real")
        was_rotated = self.model.rotated
        prev = self.embedding
        model = contrast.fit_cpca(
            self.X_T,
            self.X_B,
            alpha,
            d_prime=self.config.d_prime,
            standardize=self.config.standardize,
        )
        self.model = contrast.stabilize_signs(prev, model, self.X_T, self.X_B)
        self._refresh_embedding()
        if was_rotated:
            self.notices.append("rotation_reset")
        if not self.feature_pinned:
            self.current_feature = self._default_feature()
        return self

    def rotate_embedding(
        self, line: tuple[tuple[float, float], tuple[float, float]]
    ) -> "Session":
        """Rotate cPC1 toward the drawn line's direction."""
        (x1, y1), (x2, y2) = line
        if x1 == x2 and y1 == y2:
            raise ValueError("rotation line needs two distinct points")
        theta = float(np.arctan2(y2 - y1, x2 - x1))
        self.model = contrast.rotate(self.model, theta)
        self._refresh_embedding()
        return self

    def select_feature(self, def_id: int) -> "Session":
        self._definition(def_id)
        self.current_feature = int(def_id)
        self.feature_pinned = True
        return self

    def set_selection(self, items) -> "Session":
        cleaned = set()
        for tag, idx in items:
            g = self._graph(tag)
            idx = int(idx)
            if not 0 <= idx < g.n:
                raise IndexError(f"node {idx} out of range for {tag} (n={g.n})")
            cleaned.add((tag, idx))
        self.selection = cleaned
        return self

    # -- feature inspection ----------------------------------------------

    def _final_values(self, def_id: int, which: str) -> np.ndarray:
        d = self._definition(def_id)
        return self._evaluator(which).final(d.base, d.chain).values

    @staticmethod
    def _union_scale(vectors: list[np.ndarray]) -> list[np.ndarray]:
        lo = min(float(v.min()) for v in vectors if len(v))
        hi = max(float(v.max()) for v in vectors if len(v))
        if hi == lo:  # constant across the union maps to mid-scale
            return [np.full(v.shape, 0.5) for v in vectors]
        return [(v - lo) / (hi - lo) for v in vectors]

    def feature_colors(self, def_id: int) -> dict:
        """Min-max scaled values for coloring, shared scale across networks."""
        vt = self._final_values(def_id, "target")
        vb = self._final_values(def_id, "background")
        st, sb = self._union_scale([vt, vb])
        return {"target": st, "background": sb}

    def feature_stages(self, def_id: int, which: str) -> list[np.ndarray]:
        """Per-stage scaled values; each stage scaled over both networks."""
        d = self._definition(def_id)
        stages_t = self._evaluator("target").stages(d.base, d.chain)
        stages_b = self._evaluator("background").stages(d.base, d.chain)
        pick = 0 if which == "target" else 1
        if which not in ("target", "background"):
            raise ValueError(f"unknown network tag: {which!r}")
        out = []
        for st, sb in zip(stages_t, stages_b):
            scaled = self._union_scale([st.values, sb.values])
            out.append(scaled[pick])
        return out

    def histogram(
        self, def_id: int, bins: int = 30, y_scale: str = "linear"
    ) -> dict:
        """Relative-frequency histograms over shared bin edges."""
        if bins < 1:
            raise ValueError("bins must be >= 1")
        if y_scale not in ("linear", "log"):
            raise ValueError(f"unknown y_scale: {y_scale!r}")
        vt = self._final_values(def_id, "target")
        vb = self._final_values(def_id, "background")
        edges = np.histogram_bin_edges(np.concatenate([vt, vb]), bins=bins)
        centers = (edges[:-1] + edges[1:]) / 2.0
        out = {"y_scale": y_scale}
        for tag, v in (("target", vt), ("background", vb)):
            counts, _ = np.histogram(v, bins=edges)
            freq = counts / max(1, len(v))
            out[tag] = [[float(c), float(f)] for c, f in zip(centers, freq)]
        return out

    # -- serialization -----------------------------------------------------

    def snapshot(self, include_matrices: bool = False) -> dict:
        """JSON-ready full state; restore_session inverts it exactly."""
        model = self.model
        snap = {
            "version": 1,
            "id": self.id,
            "config": self.config.to_json_dict(),
            "graphs": {
                "target": {"n": self.target.n, "l": self.target.l,
                           "directed": self.target.directed},
                "background": {"n": self.background.n, "l": self.background.l,
                               "directed": self.background.directed},
            },
            "definitions": [d.to_json_dict() for d in self.definitions],
            "model": model.to_json_dict(),
            "model_state": {
                "feature_means_target": model.feature_means_target.tolist(),
                "feature_means_background": model.feature_means_background.tolist(),
                "feature_scale": None
                if model.feature_scale is None
                else model.feature_scale.tolist(),
                "cov_target": None
                if model.cov_target is None
                else model.cov_target.tolist(),
            },
            "embedding": self.embedding.to_json_dict(),
            "layouts": {
                "target": self.layout_target.to_json_dict(),
                "background": self.layout_background.to_json_dict(),
            },
            "current_feature": self.current_feature,
            "feature_pinned": self.feature_pinned,
            "selection": sorted([tag, idx] for tag, idx in self.selection),
            "warnings": list(self.warnings),
        }
        if include_matrices:
            snap["matrices"] = {
                "target": self.X_T.values.tolist(),
                "background": self.X_B.values.tolist(),
            }
        return snap


def _screen_bases(
    cfg: FeatureConfig, target: Graph, background: Graph, warnings: list
) -> FeatureConfig:
    """Drop bases that fail on either graph, recording why.

    Some measures are undefined off their domain (eigenvector centrality
    never converges on acyclic digraphs); the interactive pipeline degrades
    gracefully instead of dying, and the warning surfaces in the session.
    """
    kept = []
    for b in cfg.bases:
        try:
            features.compute_base(target, b)
            features.compute_base(background, b)
            kept.append(b)
        except Exception as exc:  # noqa: BLE001 - reason is reported
            warnings.append(f"dropped base {b.token()}: {exc}")
    if not kept:
        raise ValueError("no usable base features: " + "; ".join(warnings))
    return features.FeatureConfig(
        bases=tuple(kept),
        summaries=cfg.summaries,
        directions=cfg.directions,
        max_hops=cfg.max_hops,
        prune_threshold=cfg.prune_threshold,
        bin_fraction=cfg.bin_fraction,
    )


def run_pipeline(
    target: Graph,
    background: Graph,
    config: SessionConfig | None = None,
    progress=None,
    cancel=None,
    session_id: str | None = None,
) -> Session:
    """Full analysis: learn features, embed contrastively, lay out graphs.

    progress(phase, fraction) is called at phase boundaries (and during
    layout). cancel() returning True aborts with PipelineCancelled; nothing
    is mutated on abort since the Session is only assembled at the end.
    """
    config = config or SessionConfig()

    def check_cancel():
        if cancel is not None and cancel():
            raise PipelineCancelled("pipeline cancelled")

    def report(phase: str, fraction: float):
        if progress is not None:
            progress(phase, fraction)

    fc = config.feature or features.default_config(target.directed)
    warnings: list[str] = []

    check_cancel()
    report("screen-bases", 0.0)
    if config.screen_bases:
        fc = _screen_bases(fc, target, background, warnings)
    report("screen-bases", 1.0)

    check_cancel()
    report("learn-features", 0.0)
    defs = features.learn_features(target, fc)
    report("learn-features", 1.0)

    check_cancel()
    report("matrices", 0.0)
    X_T, X_B = features.build_feature_matrices(defs, target, background)
    report("matrices", 1.0)

    check_cancel()
    report("alpha", 0.0)
    if config.alpha is not None:
        alpha = float(config.alpha)
    else:
        alpha = contrast.auto_alpha(
            X_T,
            X_B,
            grid=config.alpha_grid,
            d_prime=config.d_prime,
            standardize=config.standardize,
        )
    report("alpha", 1.0)

    check_cancel()
    report("fit", 0.0)
    model = contrast.fit_cpca(
        X_T, X_B, alpha, d_prime=config.d_prime, standardize=config.standardize
    )
    embedding = contrast.make_embedding(X_T, X_B, model)
    report("fit", 1.0)

    layouts = {}
    for tag, g in (("target", target), ("background", background)):
        check_cancel()
        phase = f"layout-{tag}"
        report(phase, 0.0)

        def on_layout(done, total, _phase=phase):
            check_cancel()
            report(_phase, done / total)

        layouts[tag] = layout.force_layout(
            g,
            iterations=config.layout_iterations,
            seed=config.layout_seed,
            theta=config.layout_theta,
            progress=on_layout,
        )
        report(phase, 1.0)

    session = Session(
        id=session_id or uuid.uuid4().hex,
        target=target,
        background=background,
        config=config,
        definitions=tuple(defs),
        X_T=X_T,
        X_B=X_B,
        model=model,
        embedding=embedding,
        layout_target=layouts["target"],
        layout_background=layouts["background"],
        current_feature=0,
        warnings=warnings,
    )
    session.current_feature = session._default_feature()
    return session


def restore_session(snap: dict, target: Graph, background: Graph) -> Session:
    """Rebuild a Session from snapshot(); graphs are passed by reference.

    Matrices are recomputed deterministically from the stored definitions,
    so snapshot -> restore -> snapshot is byte-stable.
    """
    config = SessionConfig.from_json_dict(snap["config"])
    defs = tuple(
        FeatureDefinition.from_json_dict(d) for d in snap["definitions"]
    )
    X_T, X_B = features.build_feature_matrices(list(defs), target, background)
    m = snap["model"]
    ms = snap["model_state"]
    model = CpcaModel(
        alpha=float(m["alpha"]),
        components=np.asarray(m["components"], dtype=np.float64),
        eigenvalues=np.asarray(m["eigenvalues"], dtype=np.float64),
        feature_means_target=np.asarray(
            ms["feature_means_target"], dtype=np.float64
        ),
        feature_means_background=np.asarray(
            ms["feature_means_background"], dtype=np.float64
        ),
        feature_scale=None
        if ms["feature_scale"] is None
        else np.asarray(ms["feature_scale"], dtype=np.float64),
        cov_target=None
        if ms["cov_target"] is None
        else np.asarray(ms["cov_target"], dtype=np.float64),
        rotated=bool(m["rotated"]),
        degenerate=bool(m["degenerate"]),
    )
    emb = snap["embedding"]
    embedding = Embedding(
        target=np.asarray(emb["target"], dtype=np.float64).reshape(target.n, -1),
        background=np.asarray(emb["background"], dtype=np.float64).reshape(
            background.n, -1
        ),
        axis_labels=tuple(emb["axis_labels"]),
    )
    lt = snap["layouts"]["target"]
    lb = snap["layouts"]["background"]
    session = Session(
        id=snap["id"],
        target=target,
        background=background,
        config=config,
        definitions=defs,
        X_T=X_T,
        X_B=X_B,
        model=model,
        embedding=embedding,
        layout_target=layout.LayoutPositions(
            np.asarray(lt["positions"], dtype=np.float64).reshape(target.n, 2),
            int(lt["seed"]),
            config.layout_iterations,
        ),
        layout_background=layout.LayoutPositions(
            np.asarray(lb["positions"], dtype=np.float64).reshape(background.n, 2),
            int(lb["seed"]),
            config.layout_iterations,
        ),
        current_feature=int(snap["current_feature"]),
        feature_pinned=bool(snap.get("feature_pinned", False)),
        warnings=list(snap.get("warnings", [])),
    )
    session.selection = {
        (tag, int(idx)) for tag, idx in snap.get("selection", [])
    }
    return session
