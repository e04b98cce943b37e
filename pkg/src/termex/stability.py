"""Neighborhood stability: per-replicate kNN, confidence scores, aggregate neighbors.

The confidence of a concept is the mean overlap of its top-k cosine
neighborhoods across all ordered pairs of replicates, normalized by k so the
value lies in [0, 1]. Neighborhoods are always computed over the corpus's
shared vocabulary; the high-confidence filter is applied afterwards, never
while measuring confidence itself.

All similarity rankings break ties by ascending concept id (byte order), so
results are bit-identical across runs and evaluation orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Iterable, NamedTuple

import numpy as np

from .errors import ConceptAbsentError, UsageError, ZeroVectorError
from .ingest import EmbeddingReplicate, ReplicateSet


@dataclass(frozen=True)
class NeighborList:
    """Top-k neighbors of one concept in one replicate, best first."""

    target: str
    entries: tuple[tuple[str, float], ...]
    k: int


@dataclass(frozen=True)
class ConfidenceRecord:
    """Confidence of one concept in one corpus."""

    corpus_id: str
    concept: str
    ec: float
    k: int
    high_confidence: bool


class NeighborRow(NamedTuple):
    neighbor: str
    mean_sim: float
    std_sim: float


@dataclass(frozen=True)
class NeighborTable:
    """Aggregate neighbors of one concept in one corpus, best first."""

    corpus_id: str
    concept: str
    rows: tuple[NeighborRow, ...]
    n: int


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine of the angle between u and v, clamped to [-1, 1].

    The same array object compared with itself is exactly 1.0 by definition,
    independent of rounding in the norm computation.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise UsageError(f"vector lengths differ: {u.shape} vs {v.shape}")
    if u is v:
        if np.linalg.norm(u) == 0.0:
            raise ZeroVectorError("cosine similarity undefined for a zero vector")
        return 1.0
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine similarity undefined for a zero vector")
    return float(min(1.0, max(-1.0, float(np.dot(u, v) / (nu * nv)))))


def _normalized_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return matrix / norms


def _ranked_indices(scores: np.ndarray, exclude: int | None) -> np.ndarray:
    """Indices by descending score; ties resolved by ascending position.

    Rows are ordered by ascending concept id everywhere in this module, so
    positional tie-break equals byte-order tie-break.
    """
    s = scores.copy()
    if exclude is not None:
        s[exclude] = -np.inf
    order = np.argsort(-s, kind="stable")
    if exclude is not None:
        order = order[: len(s) - 1]
    return order


def knn(
    replicate: EmbeddingReplicate,
    concept: str,
    k: int,
    candidates: Iterable[str],
) -> NeighborList:
    """Top-k candidates by cosine similarity to ``concept``, excluding itself."""
    if k < 1:
        raise UsageError(f"k must be >= 1, got {k}")
    if concept not in replicate:
        raise ConceptAbsentError(
            f"{concept!r} not in replicate {replicate.replicate_index} "
            f"of corpus {replicate.corpus_id!r}"
        )
    pool = sorted(set(candidates))
    missing = [c for c in pool if c not in replicate]
    if missing:
        raise ConceptAbsentError(f"candidates not in replicate vocabulary: {missing[:5]}")
    rows = np.array([replicate.row[c] for c in pool], dtype=np.intp)
    X = _normalized_rows(replicate.matrix[rows])
    target = replicate.vector(concept)
    scores = X @ (target / np.linalg.norm(target))
    try:
        exclude = pool.index(concept)
    except ValueError:
        exclude = None
    order = _ranked_indices(scores, exclude)[:k]
    entries = tuple(
        (pool[i], float(min(1.0, max(-1.0, scores[i])))) for i in order
    )
    return NeighborList(target=concept, entries=entries, k=k)


def _shared_normalized(rset: ReplicateSet) -> list[np.ndarray]:
    """Per-replicate row-normalized matrices over the shared vocabulary.

    Row order is ``rset.shared_ids`` (ascending), identical for every
    replicate.
    """
    mats = []
    for rep in rset.replicates:
        rows = np.array([rep.row[c] for c in rset.shared_ids], dtype=np.intp)
        mats.append(_normalized_rows(rep.matrix[rows]))
    return mats


def _neighborhoods_at(mats: list[np.ndarray], idx: int, k: int) -> list[np.ndarray]:
    """Top-k index sets of the concept at shared-vocab position idx, one per replicate."""
    sets = []
    for X in mats:
        scores = X @ X[idx]
        sets.append(_ranked_indices(scores, idx)[:k])
    return sets


def _overlap_confidence(neigh: list[np.ndarray], m: int, k: int) -> float:
    total = 0
    sets = [frozenset(a.tolist()) for a in neigh]
    for i in range(m):
        for j in range(m):
            if i != j:
                total += len(sets[i] & sets[j])
    return total / (m * (m - 1)) / k


def embedding_confidence(rset: ReplicateSet, concept: str, k: int) -> float:
    """Mean top-k neighborhood overlap of ``concept`` across ordered replicate pairs, / k."""
    if k < 1:
        raise UsageError(f"k must be >= 1, got {k}")
    try:
        idx = rset.shared_ids.index(concept)
    except ValueError:
        raise ConceptAbsentError(
            f"{concept!r} not in the shared vocabulary of corpus {rset.corpus_id!r}"
        ) from None
    mats = _shared_normalized(rset)
    neigh = _neighborhoods_at(mats, idx, k)
    return _overlap_confidence(neigh, rset.m, k)


def high_confidence_set(
    rset: ReplicateSet, k: int, threshold: float
) -> tuple[set[str], list[ConfidenceRecord]]:
    """Confidence for every shared-vocabulary concept plus the passing subset.

    Records come back sorted by concept id. Scores every concept through the
    same per-concept path as :func:`embedding_confidence` (not one batched
    matrix product), so the two entry points agree bit-for-bit; full-matrix
    scoring can round differently in the last ulp and flip near-ties.
    """
    if not 0.0 <= threshold <= 1.0:
        raise UsageError(f"threshold must be in [0, 1], got {threshold}")
    if k < 1:
        raise UsageError(f"k must be >= 1, got {k}")
    mats = _shared_normalized(rset)
    records = []
    passing: set[str] = set()
    for idx, concept in enumerate(rset.shared_ids):
        ec = _overlap_confidence(_neighborhoods_at(mats, idx, k), rset.m, k)
        ok = ec >= threshold
        records.append(
            ConfidenceRecord(
                corpus_id=rset.corpus_id,
                concept=concept,
                ec=ec,
                k=k,
                high_confidence=ok,
            )
        )
        if ok:
            passing.add(concept)
    return passing, records


def aggregate_neighbors(
    rset: ReplicateSet,
    concept: str,
    n: int,
    hiconf: AbstractSet[str],
) -> NeighborTable:
    """Top-n high-confidence concepts by mean-over-replicates cosine to ``concept``.

    The target itself need not be high-confidence, but must occur in every
    replicate. ``std_sim`` is the population standard deviation over the m
    per-replicate cosines. An empty candidate pool yields an empty table.
    """
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}")
    shared = set(rset.shared_ids)
    if concept not in shared:
        raise ConceptAbsentError(
            f"{concept!r} not in the shared vocabulary of corpus {rset.corpus_id!r}"
        )
    stray = [c for c in hiconf if c not in shared]
    if stray:
        raise ConceptAbsentError(
            f"high-confidence candidates outside shared vocabulary: {sorted(stray)[:5]}"
        )
    pool = sorted(c for c in hiconf if c != concept)
    if not pool:
        return NeighborTable(corpus_id=rset.corpus_id, concept=concept, rows=(), n=n)

    sims = np.empty((rset.m, len(pool)), dtype=np.float64)
    for r, rep in enumerate(rset.replicates):
        rows = np.array([rep.row[c] for c in pool], dtype=np.intp)
        X = _normalized_rows(rep.matrix[rows])
        target = rep.vector(concept)
        sims[r] = X @ (target / np.linalg.norm(target))
    np.clip(sims, -1.0, 1.0, out=sims)
    means = sims.mean(axis=0)
    stds = sims.std(axis=0)
    order = _ranked_indices(means, None)[:n]
    rows_out = tuple(
        NeighborRow(pool[i], float(means[i]), float(stds[i])) for i in order
    )
    return NeighborTable(corpus_id=rset.corpus_id, concept=concept, rows=rows_out, n=n)
