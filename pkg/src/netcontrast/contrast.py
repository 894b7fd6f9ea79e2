"""Contrastive PCA over a target/background feature-matrix pair.

The components are the top eigenvectors of C_T - alpha * C_B. alpha = 0
recovers ordinary PCA of the target. Includes scaled loadings, automatic
alpha selection over a log grid, sign stabilization against a previous
embedding, and in-plane component rotation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .features import FeatureMatrix

__all__ = [
    "CpcaModel",
    "Embedding",
    "DEFAULT_ALPHA_GRID",
    "covariance",
    "fit_cpca",
    "project",
    "make_embedding",
    "scaled_loadings",
    "auto_alpha",
    "stabilize_signs",
    "rotate",
]

_DEGENERATE_EPS = 1e-12

DEFAULT_ALPHA_GRID = tuple(
    [0.0] + list(np.geomspace(0.1, 1000.0, 40))
)


def _as_array(X) -> np.ndarray:
    if isinstance(X, FeatureMatrix):
        return X.values
    out = np.asarray(X, dtype=np.float64)
    if out.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return out


@dataclass(frozen=True)
class CpcaModel:
    """Fitted contrastive projection.

    components is d x d_prime with orthonormal columns (eigenvectors of the
    symmetric contrast matrix). After rotation the eigenvalues field holds
    per-axis projected target variances instead and rotated is set; the
    columns stay orthonormal because rotations are orthogonal.
    """

    alpha: float
    components: np.ndarray
    eigenvalues: np.ndarray
    feature_means_target: np.ndarray
    feature_means_background: np.ndarray
    feature_scale: np.ndarray | None = None
    cov_target: np.ndarray | None = None
    rotated: bool = False
    degenerate: bool = False

    @property
    def d(self) -> int:
        return self.components.shape[0]

    @property
    def d_prime(self) -> int:
        return self.components.shape[1]

    @property
    def loadings(self) -> np.ndarray:
        return self.components

    @property
    def scaled_loadings(self) -> np.ndarray:
        return scaled_loadings(self)

    def axis_labels(self) -> tuple[str, ...]:
        # alpha = 0 is ordinary PCA, label the axes accordingly
        stem = "PC" if self.alpha == 0.0 else "cPC"
        suffix = " (rotated)" if self.rotated else ""
        return tuple(f"{stem}{j + 1}{suffix}" for j in range(self.d_prime))

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "components": self.components.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "scaled_loadings": self.scaled_loadings.tolist(),
            "rotated": self.rotated,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class Embedding:
    """2-D coordinates of both networks under one model."""

    target: np.ndarray
    background: np.ndarray
    axis_labels: tuple[str, ...] = ("cPC1", "cPC2")

    def to_json_dict(self) -> dict:
        return {
            "target": self.target.tolist(),
            "background": self.background.tolist(),
            "axis_labels": list(self.axis_labels),
        }


def covariance(X) -> np.ndarray:
    """Population covariance of the columns (divisor n)."""
    X = _as_array(X)
    n = X.shape[0]
    if n < 2:
        raise ValueError("covariance needs at least 2 rows")
    Xc = X - X.mean(axis=0)
    return (Xc.T @ Xc) / n


def fit_cpca(
    X_T,
    X_B,
    alpha: float,
    d_prime: int = 2,
    standardize: bool = False,
) -> CpcaModel:
    """Eigendecompose C_T - alpha * C_B and keep the top d_prime directions.

    Columns are ordered by descending eigenvalue with a deterministic sign:
    each column's max-magnitude entry is positive. standardize divides every
    feature by its target standard deviation (features constant on the
    target keep scale 1) before forming either covariance.
    """
    XT = _as_array(X_T)
    XB = _as_array(X_B)
    if XT.shape[1] != XB.shape[1]:
        raise ValueError(
            f"feature counts differ: target {XT.shape[1]}, background {XB.shape[1]}"
        )
    d = XT.shape[1]
    if d < d_prime:
        raise ValueError(f"need at least {d_prime} features, have {d}")
    if not (np.isfinite(alpha) and alpha >= 0):
        raise ValueError("alpha must be a finite non-negative real")
    if not (np.all(np.isfinite(XT)) and np.all(np.isfinite(XB))):
        raise ValueError("feature matrices must be finite")

    means_T = XT.mean(axis=0)
    means_B = XB.mean(axis=0)
    scale = None
    if standardize:
        scale = XT.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
        XT = XT / scale
        XB = XB / scale
    C_T = covariance(XT)
    C_B = covariance(XB)
    C = C_T - alpha * C_B
    C = (C + C.T) / 2.0  # guard symmetry against rounding

    magnitude = max(1.0, float(np.abs(C_T).max()), alpha * float(np.abs(C_B).max()))
    if float(np.abs(C).max()) <= _DEGENERATE_EPS * magnitude:
        W = np.eye(d, dtype=np.float64)[:, :d_prime]
        return CpcaModel(
            alpha=float(alpha),
            components=W,
            eigenvalues=np.zeros(d_prime),
            feature_means_target=means_T,
            feature_means_background=means_B,
            feature_scale=scale,
            cov_target=C_T,
            degenerate=True,
        )

    eigvals, eigvecs = np.linalg.eigh(C)
    order = np.argsort(eigvals)[::-1][:d_prime]
    W = eigvecs[:, order].copy()
    for j in range(W.shape[1]):
        col = W[:, j]
        if col[int(np.argmax(np.abs(col)))] < 0:
            W[:, j] = -col
    return CpcaModel(
        alpha=float(alpha),
        components=W,
        eigenvalues=eigvals[order].copy(),
        feature_means_target=means_T,
        feature_means_background=means_B,
        feature_scale=scale,
        cov_target=C_T,
    )


def project(X, model: CpcaModel) -> np.ndarray:
    """Project rows into the component plane.

    Both networks are centered by the target means so their clouds share an
    origin.
    """
    X = _as_array(X)
    if X.shape[1] != model.d:
        raise ValueError(
            f"matrix has {X.shape[1]} features, model expects {model.d}"
        )
    Xc = X - model.feature_means_target
    if model.feature_scale is not None:
        Xc = Xc / model.feature_scale
    return Xc @ model.components


def make_embedding(X_T, X_B, model: CpcaModel) -> Embedding:
    return Embedding(
        target=project(X_T, model),
        background=project(X_B, model),
        axis_labels=model.axis_labels(),
    )


def scaled_loadings(model: CpcaModel) -> np.ndarray:
    """Each component's loadings divided by their max magnitude.

    Entries land in [-1, 1] and each non-zero column attains +-1 exactly at
    its max-magnitude entry. All-zero columns stay zero.
    """
    W = model.components
    out = np.zeros_like(W)
    for j in range(W.shape[1]):
        peak = float(np.abs(W[:, j]).max())
        if peak > 0:
            out[:, j] = W[:, j] / peak
    return out


def _trace_variance(Y: np.ndarray) -> float:
    return float(Y.var(axis=0).sum())


def auto_alpha(
    X_T,
    X_B,
    grid=None,
    d_prime: int = 2,
    standardize: bool = False,
) -> float:
    """Pick the grid alpha that most contrasts target against background.

    Score is trace-variance of the projected target divided by (1e-12 +
    trace-variance of the projected background). Scanning ascends the grid
    keeping strict improvements, so ties resolve to the smaller alpha.
    """
    if grid is None:
        grid = DEFAULT_ALPHA_GRID
    grid = [float(a) for a in grid]
    if not grid:
        raise ValueError("alpha grid must be non-empty")
    best_alpha = None
    best_score = -np.inf
    for alpha in sorted(grid):
        model = fit_cpca(X_T, X_B, alpha, d_prime=d_prime, standardize=standardize)
        score = _trace_variance(project(X_T, model)) / (
            1e-12 + _trace_variance(project(X_B, model))
        )
        if np.isfinite(score) and score > best_score:
            best_score = score
            best_alpha = alpha
    if best_alpha is None:
        raise ValueError("no finite contrast score on the alpha grid")
    return best_alpha


def stabilize_signs(prev: Embedding, model: CpcaModel, X_T, X_B) -> CpcaModel:
    """Flip components whose new coordinates anti-correlate with prev.

    For each axis the previous and new coordinates of all nodes (target and
    background concatenated) are compared by cosine similarity; a negative
    cosine flips that component. Zero-norm axes are left alone. Idempotent.
    """
    new = make_embedding(X_T, X_B, model)
    prev_all = np.vstack([prev.target, prev.background])
    new_all = np.vstack([new.target, new.background])
    if prev_all.shape != new_all.shape:
        raise ValueError(
            f"embedding shapes differ: prev {prev_all.shape}, new {new_all.shape}"
        )
    W = model.components.copy()
    flipped = False
    for j in range(W.shape[1]):
        u = prev_all[:, j]
        v = new_all[:, j]
        if np.linalg.norm(u) == 0.0 or np.linalg.norm(v) == 0.0:
            continue
        if float(u @ v) < 0.0:  # cosine sign only needs the dot product
            W[:, j] = -W[:, j]
            flipped = True
    if not flipped:
        return model
    return replace(model, components=W)


def rotate(model: CpcaModel, theta: float) -> CpcaModel:
    """Rotate the 2-D component plane by theta radians.

    New components are W @ R(theta); projections rotate identically, so
    pairwise distances are untouched. Eigenvalue semantics no longer apply:
    the eigenvalues field is replaced by per-axis projected target variance
    and the model is flagged rotated.
    """
    if model.d_prime != 2:
        raise ValueError("rotation is defined for 2-D models only")
    c, s = float(np.cos(theta)), float(np.sin(theta))
    if c == 1.0 and s == 0.0:
        return model
    R = np.array([[c, -s], [s, c]])
    W = model.components @ R
    if model.cov_target is not None:
        axis_var = np.array([W[:, j] @ model.cov_target @ W[:, j] for j in range(2)])
    else:
        axis_var = model.eigenvalues.copy()
    return replace(model, components=W, eigenvalues=axis_var, rotated=True)
