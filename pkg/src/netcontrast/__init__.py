"""Contrastive analysis of two networks.

Learn interpretable per-node features on a target graph, evaluate them on
both the target and a background graph (no node correspondence needed),
embed both with contrastive PCA so target-unique structure stands out, and
steer the result interactively: contrast strength, component rotation,
feature inspection, linked selection.
"""

from .centrality import (
    ConvergenceError,
    NodeVector,
    betweenness,
    closeness,
    degree,
    eigenvector_centrality,
    katz_centrality,
    kcore,
    pagerank,
)
from .contrast import (
    CpcaModel,
    Embedding,
    auto_alpha,
    covariance,
    fit_cpca,
    make_embedding,
    project,
    rotate,
    scaled_loadings,
    stabilize_signs,
)
from .features import (
    BaseFeature,
    FeatureConfig,
    FeatureDefinition,
    FeatureMatrix,
    RelationalOperator,
    apply_rfo,
    build_feature_matrices,
    compute_base,
    default_config,
    evaluate_feature,
    learn_features,
    log_binning,
)
from .generators import gilbert, price
from .graph import Graph, GraphParseError, load_attributes, load_edge_list, neighbors
from .layout import LayoutPositions, force_layout
from .session import (
    PipelineCancelled,
    Session,
    SessionConfig,
    restore_session,
    run_pipeline,
)

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "GraphParseError",
    "load_edge_list",
    "load_attributes",
    "neighbors",
    "NodeVector",
    "ConvergenceError",
    "degree",
    "kcore",
    "pagerank",
    "eigenvector_centrality",
    "katz_centrality",
    "closeness",
    "betweenness",
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
    "CpcaModel",
    "Embedding",
    "covariance",
    "fit_cpca",
    "project",
    "make_embedding",
    "scaled_loadings",
    "auto_alpha",
    "stabilize_signs",
    "rotate",
    "LayoutPositions",
    "force_layout",
    "gilbert",
    "price",
    "Session",
    "SessionConfig",
    "PipelineCancelled",
    "run_pipeline",
    "restore_session",
    "__version__",
]
