"""End-to-end computation: replicate sets in, validated snapshot out.

Order of operations per corpus: confidence for every shared-vocabulary
concept, aggregate neighbor tables for every selectable concept present in
the corpus, a t-SNE frame over the high-confidence mean vectors, and the
per-replicate float32 vectors needed for on-demand pairwise similarity.
Frames are then chained with Procrustes alignment in corpus order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .ingest import ConceptMetadata, ReplicateSet, synthesize_metadata
from .projection import align_chain, tsne_project
from .snapshot import CorpusDescriptor, CorpusPayload, Snapshot, VectorBlock, FORMAT_VERSION
from .stability import aggregate_neighbors, high_confidence_set


@dataclass(frozen=True)
class ComputeParams:
    """Analysis knobs; defaults follow the recommended operating point."""

    k: int = 5
    threshold: float = 0.5
    n_neighbors: int = 10
    perplexity: float = 30.0
    iterations: int = 1000
    seed: int = 42


def _mean_vectors(rset: ReplicateSet, concepts: Iterable[str]) -> dict[str, np.ndarray]:
    out = {}
    for cid in concepts:
        out[cid] = np.mean([rep.vector(cid) for rep in rset.replicates], axis=0)
    return out


def build_snapshot(
    corpora: Sequence[ReplicateSet],
    terminology: Mapping[str, ConceptMetadata],
    params: ComputeParams = ComputeParams(),
    progress: Callable[[str], None] | None = None,
) -> Snapshot:
    """Run the full analysis over ``corpora`` and assemble a snapshot."""
    say = progress or (lambda _msg: None)
    ordered = sorted(corpora, key=lambda s: (s.order_index, s.corpus_id))

    hiconf_by_corpus: dict[str, set[str]] = {}
    records_by_corpus = {}
    for rset in ordered:
        say(f"{rset.corpus_id}: scoring confidence over {len(rset.shared_ids)} concepts")
        hiconf, records = high_confidence_set(rset, params.k, params.threshold)
        hiconf_by_corpus[rset.corpus_id] = hiconf
        records_by_corpus[rset.corpus_id] = tuple(records)

    selectable: set[str] = set()
    for ids in hiconf_by_corpus.values():
        selectable |= ids

    concepts: dict[str, ConceptMetadata] = dict(terminology)
    for rset in ordered:
        for cid in rset.shared_ids:
            if cid not in concepts:
                concepts[cid] = synthesize_metadata(cid)

    frames = []
    tables_by_corpus = {}
    vectors_by_corpus = {}
    for position, rset in enumerate(ordered):
        hiconf = hiconf_by_corpus[rset.corpus_id]
        stored_ids = tuple(sorted(selectable & set(rset.shared_ids)))

        say(f"{rset.corpus_id}: neighbor tables for {len(stored_ids)} selectable concepts")
        tables_by_corpus[rset.corpus_id] = {
            cid: aggregate_neighbors(rset, cid, params.n_neighbors, hiconf)
            for cid in stored_ids
        }

        say(f"{rset.corpus_id}: projecting {len(hiconf)} high-confidence concepts")
        frame = tsne_project(
            _mean_vectors(rset, sorted(hiconf)),
            perplexity=params.perplexity,
            iterations=params.iterations,
            seed=params.seed + position,
            corpus_id=rset.corpus_id,
        )
        frames.append(frame)

        block = np.empty((rset.m, len(stored_ids), rset.dim), dtype=np.float32)
        for r, rep in enumerate(rset.replicates):
            for pos, cid in enumerate(stored_ids):
                block[r, pos] = rep.vector(cid)
        vectors_by_corpus[rset.corpus_id] = VectorBlock(ids=stored_ids, array=block)

    say("aligning projection frames")
    aligned = align_chain(frames)

    payloads = []
    for position, (rset, frame) in enumerate(zip(ordered, aligned)):
        records = records_by_corpus[rset.corpus_id]
        descriptor = CorpusDescriptor(
            id=rset.corpus_id,
            label=rset.label,
            order_index=rset.order_index,
            vocab_size=len(records),
            high_conf_count=len(hiconf_by_corpus[rset.corpus_id]),
            m=rset.m,
            dim=rset.dim,
            k=params.k,
            threshold=params.threshold,
            n_neighbors=params.n_neighbors,
            perplexity=params.perplexity,
            iterations=params.iterations,
            seed=params.seed,
        )
        payloads.append(
            CorpusPayload(
                descriptor=descriptor,
                confidence=records,
                tables=tables_by_corpus[rset.corpus_id],
                frame=frame,
                vectors=vectors_by_corpus[rset.corpus_id],
            )
        )

    return Snapshot(
        format_version=FORMAT_VERSION, concepts=concepts, corpora=tuple(payloads)
    )
