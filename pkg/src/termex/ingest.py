"""Parsing of embedding replicate files and terminology metadata.

Embedding files use the word2vec text layout: a header line ``<count> <dim>``
followed by ``count`` lines of ``<token> <v1> ... <vdim>``. Tokens are any
non-whitespace bytes; vectors must be finite and not all-zero (cosine
similarity is undefined for the zero vector). Terminology files are 5-column
TSV without a header row: concept_id, preferred_term, pipe-separated
synonyms, semantic_group, definition.

All models produced here are immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CountMismatchError,
    DataError,
    DimensionMismatchError,
    DimMismatchAcrossReplicatesError,
    DuplicateTokenError,
    EmptySharedVocabularyError,
    HeaderMalformedError,
    MalformedTerminologyError,
    NonFiniteValueError,
    TooFewReplicatesError,
    ZeroVectorError,
)

DEFAULT_SEMANTIC_GROUP = "Unknown"


class MalformedRowWarning(UserWarning):
    """A terminology row was skipped; carries the line number and reason."""


@dataclass(frozen=True, eq=False)
class EmbeddingReplicate:
    """One embedding matrix for one corpus.

    ``ids`` is sorted ascending (byte order), ``matrix`` holds one row per
    id, and ``row`` maps id -> row index. The matrix is read-only.
    """

    corpus_id: str
    replicate_index: int
    dim: int
    ids: tuple[str, ...]
    matrix: np.ndarray
    row: Mapping[str, int] = field(repr=False)

    @classmethod
    def from_mapping(
        cls,
        corpus_id: str,
        replicate_index: int,
        vectors: Mapping[str, Sequence[float]],
    ) -> "EmbeddingReplicate":
        """Build a replicate from an id -> vector mapping, validating invariants."""
        if not vectors:
            raise DataError("replicate has no vectors")
        ids = tuple(sorted(vectors))
        dims = {len(vectors[c]) for c in ids}
        if len(dims) != 1:
            raise DimensionMismatchError(f"inconsistent vector lengths: {sorted(dims)}")
        dim = dims.pop()
        if dim < 1:
            raise DimensionMismatchError("vector dimension must be positive")
        matrix = np.asarray([vectors[c] for c in ids], dtype=np.float64)
        if not np.isfinite(matrix).all():
            bad = ids[int(np.argwhere(~np.isfinite(matrix))[0][0])]
            raise NonFiniteValueError(f"non-finite component in vector for {bad!r}")
        norms = np.linalg.norm(matrix, axis=1)
        if (norms == 0.0).any():
            bad = ids[int(np.argmin(norms))]
            raise ZeroVectorError(f"all-zero vector for {bad!r}")
        matrix.flags.writeable = False
        row = {c: i for i, c in enumerate(ids)}
        return cls(corpus_id, replicate_index, dim, ids, matrix, row)

    def vector(self, concept: str) -> np.ndarray:
        return self.matrix[self.row[concept]]

    def __contains__(self, concept: str) -> bool:
        return concept in self.row

    def __len__(self) -> int:
        return len(self.ids)

    def allclose(self, other: "EmbeddingReplicate", atol: float = 1e-5) -> bool:
        """Same vocabulary and per-component vector agreement within atol."""
        return (
            self.ids == other.ids
            and self.dim == other.dim
            and np.allclose(self.matrix, other.matrix, rtol=0.0, atol=atol)
        )


@dataclass(frozen=True)
class VocabReport:
    """Vocabulary sizes observed while assembling a replicate set."""

    per_replicate: tuple[int, ...]
    shared: int


@dataclass(frozen=True, eq=False)
class ReplicateSet:
    """All m replicates of one corpus; the unit confidence is computed over."""

    corpus_id: str
    label: str
    order_index: int
    replicates: tuple[EmbeddingReplicate, ...]
    shared_ids: tuple[str, ...]
    vocab_report: VocabReport

    @classmethod
    def build(
        cls,
        corpus_id: str,
        label: str,
        order_index: int,
        replicates: Sequence[EmbeddingReplicate],
    ) -> "ReplicateSet":
        if len(replicates) < 2:
            raise TooFewReplicatesError(
                f"corpus {corpus_id!r}: got {len(replicates)} replicate(s), need at least 2"
            )
        dims = {r.dim for r in replicates}
        if len(dims) != 1:
            raise DimMismatchAcrossReplicatesError(
                f"corpus {corpus_id!r}: replicate dimensions differ: {sorted(dims)}"
            )
        for r in replicates:
            if r.corpus_id != corpus_id:
                raise DataError(
                    f"replicate {r.replicate_index} belongs to corpus {r.corpus_id!r}, "
                    f"not {corpus_id!r}"
                )
        shared: set[str] = set(replicates[0].ids)
        for r in replicates[1:]:
            shared &= set(r.ids)
        if not shared:
            raise EmptySharedVocabularyError(
                f"corpus {corpus_id!r}: no token occurs in every replicate"
            )
        report = VocabReport(tuple(len(r) for r in replicates), len(shared))
        return cls(
            corpus_id,
            label,
            order_index,
            tuple(replicates),
            tuple(sorted(shared)),
            report,
        )

    @property
    def m(self) -> int:
        return len(self.replicates)

    @property
    def dim(self) -> int:
        return self.replicates[0].dim


@dataclass(frozen=True)
class ConceptMetadata:
    """Display metadata for one concept."""

    id: str
    preferred_term: str
    synonyms: tuple[str, ...] = ()
    semantic_group: str = DEFAULT_SEMANTIC_GROUP
    definitions: tuple[str, ...] = ()


def synthesize_metadata(concept_id: str) -> ConceptMetadata:
    """Fallback metadata for concepts that appear in embeddings only."""
    return ConceptMetadata(id=concept_id, preferred_term=concept_id)


def parse_embedding_file(
    source: BinaryIO,
    expected_dim: int | None = None,
    *,
    corpus_id: str = "",
    replicate_index: int = 0,
    name: str = "<stream>",
) -> EmbeddingReplicate:
    """Parse one word2vec-text embedding file into a replicate.

    ``name`` is used in error messages only. Blank lines are ignored.
    """
    text = source.read().decode("utf-8")
    lines = [(i + 1, ln) for i, ln in enumerate(text.split("\n")) if ln.strip()]
    if not lines:
        raise HeaderMalformedError(f"{name}: empty file")
    header_no, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise HeaderMalformedError(
            f"{name}:{header_no}: header must be '<count> <dim>', got {header!r}"
        )
    try:
        count, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise HeaderMalformedError(
            f"{name}:{header_no}: header fields must be integers, got {header!r}"
        ) from None
    if count < 0 or dim < 1:
        raise HeaderMalformedError(f"{name}:{header_no}: bad header values {header!r}")
    if expected_dim is not None and dim != expected_dim:
        raise DimensionMismatchError(
            f"{name}: header dim {dim} != expected {expected_dim}"
        )

    body = lines[1:]
    if len(body) != count:
        raise CountMismatchError(
            f"{name}: header promises {count} vectors, found {len(body)}"
        )

    vectors: dict[str, list[float]] = {}
    for line_no, line in body:
        fields = line.split()
        token = fields[0]
        values = fields[1:]
        if len(values) != dim:
            raise DimensionMismatchError(
                f"{name}:{line_no}: {len(values)} components for {token!r}, expected {dim}"
            )
        if token in vectors:
            raise DuplicateTokenError(f"{name}:{line_no}: duplicate token {token!r}")
        try:
            vec = [float(v) for v in values]
        except ValueError:
            raise NonFiniteValueError(
                f"{name}:{line_no}: unparseable component for {token!r}"
            ) from None
        if not all(math.isfinite(v) for v in vec):
            raise NonFiniteValueError(
                f"{name}:{line_no}: non-finite component for {token!r}"
            )
        if not any(v != 0.0 for v in vec):
            raise ZeroVectorError(f"{name}:{line_no}: all-zero vector for {token!r}")
        vectors[token] = vec

    return EmbeddingReplicate.from_mapping(corpus_id, replicate_index, vectors)


def serialize_embedding_file(replicate: EmbeddingReplicate, path: Path) -> None:
    """Write a replicate back out as word2vec text (6 significant digits, LF)."""
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        out.write(f"{len(replicate.ids)} {replicate.dim}\n")
        for cid in replicate.ids:
            vec = replicate.matrix[replicate.row[cid]]
            out.write(cid + " " + " ".join(f"{v:.6g}" for v in vec) + "\n")


def load_replicate_set(
    paths: Sequence[Path | str],
    corpus_id: str,
    label: str,
    order_index: int,
) -> ReplicateSet:
    """Load and validate one corpus's replicate files (index i <- paths[i])."""
    if len(paths) < 2:
        raise TooFewReplicatesError(
            f"corpus {corpus_id!r}: {len(paths)} file(s) given; "
            "neighborhood overlap needs at least 2 replicates"
        )
    replicates = []
    for i, p in enumerate(paths):
        p = Path(p)
        with open(p, "rb") as fh:
            replicates.append(
                parse_embedding_file(
                    fh, corpus_id=corpus_id, replicate_index=i, name=str(p)
                )
            )
    return ReplicateSet.build(corpus_id, label, order_index, replicates)


def _merge_terms(existing: Iterable[str], new: Iterable[str]) -> tuple[str, ...]:
    seen: dict[str, None] = dict.fromkeys(existing)
    for term in new:
        seen.setdefault(term)
    return tuple(seen)


def parse_terminology(source: BinaryIO, *, name: str = "<stream>") -> dict[str, ConceptMetadata]:
    """Parse a terminology TSV into concept metadata, merging repeated ids.

    Malformed rows are skipped with a MalformedRowWarning carrying the line
    number; if more than half of the non-empty rows are malformed the whole
    parse fails.
    """
    text = source.read().decode("utf-8")
    entries: dict[str, ConceptMetadata] = {}
    total = 0
    bad = 0
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        total += 1
        cols = line.rstrip("\r").split("\t")
        if len(cols) != 5:
            bad += 1
            warnings.warn(
                MalformedRowWarning(
                    f"{name}:{line_no}: expected 5 columns, got {len(cols)}; row skipped"
                )
            )
            continue
        concept_id, preferred, syn_field, group, definition = (c.strip() for c in cols)
        if not concept_id or any(ch.isspace() for ch in concept_id) or not preferred:
            bad += 1
            warnings.warn(
                MalformedRowWarning(
                    f"{name}:{line_no}: empty or whitespace id/term; row skipped"
                )
            )
            continue
        synonyms = tuple(s.strip() for s in syn_field.split("|") if s.strip())
        definitions = (definition,) if definition else ()
        group = group or DEFAULT_SEMANTIC_GROUP
        prior = entries.get(concept_id)
        if prior is None:
            entries[concept_id] = ConceptMetadata(
                id=concept_id,
                preferred_term=preferred,
                synonyms=_merge_terms((), synonyms),
                semantic_group=group,
                definitions=definitions,
            )
        else:
            entries[concept_id] = ConceptMetadata(
                id=concept_id,
                preferred_term=prior.preferred_term,
                synonyms=_merge_terms(prior.synonyms, synonyms),
                semantic_group=(
                    prior.semantic_group
                    if prior.semantic_group != DEFAULT_SEMANTIC_GROUP
                    else group
                ),
                definitions=_merge_terms(prior.definitions, definitions),
            )
    if total and bad * 2 > total:
        raise MalformedTerminologyError(
            f"{name}: {bad} of {total} rows malformed; refusing to continue"
        )
    return entries
