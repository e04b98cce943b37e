"""Cross-corpus pairwise similarity series between concepts.

For one corpus, the similarity of two concepts is the mean (and population
standard deviation) of their cosine similarity in each replicate. A series
strings these per-corpus values together in corpus order. Values are always
computed, even where a concept is low-confidence; the flags on each point
let a client decide what to omit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Mapping, Sequence

import numpy as np

from .errors import ConceptAbsentError, NotSelectableError, TooManyComparisonsError
from .ingest import ReplicateSet
from .stability import cosine_similarity

MAX_COMPARISONS = 8


@dataclass(frozen=True)
class SimilarityPoint:
    """Similarity of one concept pair in one corpus.

    ``mean`` and ``std`` are None when either concept is absent from the
    corpus's shared vocabulary (``present`` False).
    """

    corpus_id: str
    mean: float | None
    std: float | None
    ref_high_conf: bool
    cmp_high_conf: bool
    present: bool


@dataclass(frozen=True)
class SimilaritySeries:
    """Per-corpus similarity of one comparison concept to the reference."""

    reference: str
    comparison: str
    points: tuple[SimilarityPoint, ...]


def replicate_cosines(
    vectors_a: Sequence[np.ndarray], vectors_b: Sequence[np.ndarray]
) -> np.ndarray:
    """Per-replicate cosine similarities for two aligned vector sequences."""
    return np.array(
        [cosine_similarity(a, b) for a, b in zip(vectors_a, vectors_b)],
        dtype=np.float64,
    )


def pairwise_similarity(rset: ReplicateSet, a: str, b: str) -> tuple[float, float]:
    """Mean and population std of the per-replicate cosines of a and b."""
    shared = set(rset.shared_ids)
    for c in (a, b):
        if c not in shared:
            raise ConceptAbsentError(
                f"{c!r} not in the shared vocabulary of corpus {rset.corpus_id!r}"
            )
    if a == b:
        return 1.0, 0.0
    cos = replicate_cosines(
        [rep.vector(a) for rep in rset.replicates],
        [rep.vector(b) for rep in rset.replicates],
    )
    return float(cos.mean()), float(cos.std())


def similarity_series(
    corpora: Sequence[ReplicateSet],
    hiconf_by_corpus: Mapping[str, AbstractSet[str]],
    ref: str,
    cmps: Sequence[str],
) -> list[SimilaritySeries]:
    """One series per comparison concept, points ordered by corpus order_index.

    ``ref`` and every comparison must be high-confidence in at least one
    corpus. Corpora where a pair member is absent yield present=False points;
    low confidence only clears the corresponding flag.
    """
    if not cmps:
        raise TooManyComparisonsError("at least one comparison concept is required")
    if len(cmps) > MAX_COMPARISONS:
        raise TooManyComparisonsError(
            f"{len(cmps)} comparison concepts requested, cap is {MAX_COMPARISONS}"
        )
    selectable: set[str] = set()
    for ids in hiconf_by_corpus.values():
        selectable |= set(ids)
    for c in (ref, *cmps):
        if c not in selectable:
            raise NotSelectableError(f"{c!r} is not high-confidence in any corpus")

    ordered = sorted(corpora, key=lambda s: s.order_index)
    out = []
    for cmp_id in cmps:
        points = []
        for rset in ordered:
            shared = set(rset.shared_ids)
            hiconf = hiconf_by_corpus.get(rset.corpus_id, frozenset())
            if ref not in shared or cmp_id not in shared:
                points.append(
                    SimilarityPoint(
                        corpus_id=rset.corpus_id,
                        mean=None,
                        std=None,
                        ref_high_conf=ref in hiconf,
                        cmp_high_conf=cmp_id in hiconf,
                        present=False,
                    )
                )
                continue
            mean, std = pairwise_similarity(rset, ref, cmp_id)
            points.append(
                SimilarityPoint(
                    corpus_id=rset.corpus_id,
                    mean=mean,
                    std=std,
                    ref_high_conf=ref in hiconf,
                    cmp_high_conf=cmp_id in hiconf,
                    present=True,
                )
            )
        out.append(
            SimilaritySeries(reference=ref, comparison=cmp_id, points=tuple(points))
        )
    return out
