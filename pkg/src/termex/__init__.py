"""Comparative corpus analysis through replicated static embeddings."""

from .errors import DataError, TermexError, UsageError
from .ingest import (
    ConceptMetadata,
    EmbeddingReplicate,
    ReplicateSet,
    load_replicate_set,
    parse_embedding_file,
    parse_terminology,
    serialize_embedding_file,
)
from .projection import (
    AlignmentTransform,
    ProjectionFrame,
    align_chain,
    procrustes_align,
    tsne_project,
)
from .similarity import (
    SimilarityPoint,
    SimilaritySeries,
    pairwise_similarity,
    similarity_series,
)
from .stability import (
    ConfidenceRecord,
    NeighborList,
    NeighborTable,
    aggregate_neighbors,
    cosine_similarity,
    embedding_confidence,
    high_confidence_set,
    knn,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentTransform",
    "ConceptMetadata",
    "ConfidenceRecord",
    "DataError",
    "EmbeddingReplicate",
    "NeighborList",
    "NeighborTable",
    "ProjectionFrame",
    "ReplicateSet",
    "SimilarityPoint",
    "SimilaritySeries",
    "TermexError",
    "UsageError",
    "aggregate_neighbors",
    "align_chain",
    "cosine_similarity",
    "embedding_confidence",
    "high_confidence_set",
    "knn",
    "load_replicate_set",
    "pairwise_similarity",
    "parse_embedding_file",
    "parse_terminology",
    "procrustes_align",
    "serialize_embedding_file",
    "similarity_series",
    "tsne_project",
]
