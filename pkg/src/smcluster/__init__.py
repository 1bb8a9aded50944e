"""Scalable multi-view clustering with low-pass graph filtering and anchors."""

from .anchors import (
    AnchorSet,
    SamplerConfig,
    anchors_by_kmeans,
    build_anchor_matrices,
    importance_probabilities,
    sample_without_replacement,
)
from .clustering import KMeansResult, kmeans
from .dataset_io import (
    DatasetError,
    MultiViewDataset,
    SyntheticSpec,
    generate_synthetic,
    load_dataset,
    save_dataset,
)
from .embedding import SpectralEmbedding, cluster_embedding, spectral_embed
from .graph_core import (
    NormalizedOperator,
    SparseGraph,
    apply_laplacian,
    build_probabilistic_neighbor_graph,
    degrees,
    normalize,
)
from .graph_filter import FilterConfig, apply_filter, exact_filter, filter_all_views
from .metrics import MetricsReport, accuracy, ari, evaluate, nmi, pairwise_f1, purity
from .pipeline import PipelineConfig, RunReport, bench_scaling, run_pipeline, sweep
from .subspace import concat_views, solve_view

__version__ = "0.1.0"
