"""labellink: discover and evaluate relations between class labels across datasets.

Given per-instance prediction scores (or embeddings) of each dataset's
instances under the other dataset's label space, the pipeline aggregates them
into directional score matrices, discovers related label pairs, types the
relations (identity / parent / child / overlap), optionally folds in taxonomy
and word-embedding evidence, and evaluates everything against derived ground
truth.
"""

__version__ = "0.1.0"

from .model import (
    BACKGROUND_LABEL,
    DirectionalScoreMatrix,
    EmbeddingRecord,
    InputError,
    InstanceScoreRecord,
    LabelLinkError,
    LabelSpace,
    LinkScoreMatrix,
    PipelineConfig,
    RelationEdge,
    RelationGraph,
    RelationType,
    mirror_type,
    validate_inputs,
)
from .aggregation import AggregationRequest, aggregate_directional, nn_classify
from .discovery import binarize, link_scores, rank_pairs
from .type_inference import (
    asymmetry_types,
    calibrate,
    combine_strengths,
    combine_types,
    set_theory_types,
)
from .taxonomy import (
    TaxonomyGraph,
    WordEmbeddingTable,
    embedding_similarity,
    path_similarity,
    taxonomy_relation,
    taxonomy_strength,
)
from .groundtruth import apply_overrides, compose, derive_candidates
from .evaluation import confusion_matrix, pr_curve, type_accuracy
from .applications import (
    cluster_embeddings,
    group_gains,
    link_strength,
    refine_labels,
)
from .synthworld import LatentWorld, generate_instances, true_relations

__all__ = [
    "__version__",
    "BACKGROUND_LABEL",
    "AggregationRequest",
    "DirectionalScoreMatrix",
    "EmbeddingRecord",
    "InputError",
    "InstanceScoreRecord",
    "LabelLinkError",
    "LabelSpace",
    "LatentWorld",
    "LinkScoreMatrix",
    "PipelineConfig",
    "RelationEdge",
    "RelationGraph",
    "RelationType",
    "TaxonomyGraph",
    "WordEmbeddingTable",
    "aggregate_directional",
    "apply_overrides",
    "asymmetry_types",
    "binarize",
    "calibrate",
    "cluster_embeddings",
    "combine_strengths",
    "combine_types",
    "compose",
    "confusion_matrix",
    "derive_candidates",
    "embedding_similarity",
    "generate_instances",
    "group_gains",
    "link_scores",
    "link_strength",
    "mirror_type",
    "nn_classify",
    "path_similarity",
    "pr_curve",
    "rank_pairs",
    "refine_labels",
    "set_theory_types",
    "taxonomy_relation",
    "taxonomy_strength",
    "true_relations",
    "type_accuracy",
    "validate_inputs",
]
