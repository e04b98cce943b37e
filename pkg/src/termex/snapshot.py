"""Versioned on-disk persistence of computed corpus analyses.

Layout under the snapshot root:

    manifest.json                 format version, corpus descriptors,
                                  per-file sha256 digests, creation time
    concepts.json                 concept metadata
    corpora/<id>/confidence.json  one record per shared-vocabulary concept
    corpora/<id>/neighbors.json   aggregate neighbor tables
    corpora/<id>/projection.json  aligned 2-D coordinates
    corpora/<id>/vectors.idx.json byte offsets into vectors.f32
    corpora/<id>/vectors.f32      little-endian float32, replicate-major,
                                  then concept, then component

JSON files are UTF-8 with sorted keys and shortest round-trip float
representation, so identical inputs always serialize to identical bytes.
Writes go to a temporary sibling directory and are renamed into place.
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import (
    ConsistencyViolationError,
    DigestMismatchError,
    MissingFileError,
    SnapshotError,
    SnapshotIoError,
    UnsupportedVersionError,
)
from .ingest import ConceptMetadata
from .projection import ProjectionFrame
from .stability import ConfidenceRecord, NeighborRow, NeighborTable

FORMAT_VERSION = 1
_F32 = np.dtype("<f4")


@dataclass(frozen=True)
class CorpusDescriptor:
    """Identity, sizes, and computation parameters of one corpus."""

    id: str
    label: str
    order_index: int
    vocab_size: int
    high_conf_count: int
    m: int
    dim: int
    k: int
    threshold: float
    n_neighbors: int
    perplexity: float
    iterations: int
    seed: int


@dataclass(frozen=True, eq=False)
class VectorBlock:
    """Per-replicate float32 vectors for a corpus's selectable concepts."""

    ids: tuple[str, ...]
    array: np.ndarray  # shape (m, len(ids), dim), dtype <f4

    def __post_init__(self) -> None:
        if self.array.dtype != _F32:
            object.__setattr__(self, "array", self.array.astype(_F32))
        if self.array.ndim != 3 or self.array.shape[1] != len(self.ids):
            raise ConsistencyViolationError(
                f"vector block shape {self.array.shape} does not match {len(self.ids)} ids"
            )

    def position(self, concept: str) -> int | None:
        try:
            return self.ids.index(concept)
        except ValueError:
            return None


@dataclass(frozen=True, eq=False)
class CorpusPayload:
    descriptor: CorpusDescriptor
    confidence: tuple[ConfidenceRecord, ...]
    tables: Mapping[str, NeighborTable]
    frame: ProjectionFrame
    vectors: VectorBlock


@dataclass(frozen=True, eq=False)
class Snapshot:
    """Everything the service needs, decoupled from the raw embedding files."""

    format_version: int
    concepts: Mapping[str, ConceptMetadata]
    corpora: tuple[CorpusPayload, ...]

    def selectable(self) -> set[str]:
        out: set[str] = set()
        for corpus in self.corpora:
            out |= {r.concept for r in corpus.confidence if r.high_confidence}
        return out


def validate_snapshot(snapshot: Snapshot) -> None:
    """Check the cross-payload invariants; raise ConsistencyViolationError."""
    ids = [c.descriptor.id for c in snapshot.corpora]
    if len(set(ids)) != len(ids):
        raise ConsistencyViolationError(f"duplicate corpus ids: {ids}")
    orders = [c.descriptor.order_index for c in snapshot.corpora]
    if orders != sorted(orders):
        raise ConsistencyViolationError("corpora are not ordered by order_index")

    selectable = snapshot.selectable()
    for corpus in snapshot.corpora:
        d = corpus.descriptor
        hiconf = {r.concept for r in corpus.confidence if r.high_confidence}
        shared = {r.concept for r in corpus.confidence}

        def _resolve(concept: str, where: str) -> None:
            if concept not in snapshot.concepts:
                raise ConsistencyViolationError(
                    f"corpus {d.id!r}: {where} references {concept!r} "
                    "which has no concept metadata"
                )

        for rec in corpus.confidence:
            _resolve(rec.concept, "confidence")
            if not 0.0 <= rec.ec <= 1.0:
                raise ConsistencyViolationError(
                    f"corpus {d.id!r}: confidence of {rec.concept!r} is {rec.ec}"
                )
        if d.vocab_size != len(corpus.confidence):
            raise ConsistencyViolationError(
                f"corpus {d.id!r}: vocab_size {d.vocab_size} != "
                f"{len(corpus.confidence)} confidence records"
            )
        if d.high_conf_count != len(hiconf):
            raise ConsistencyViolationError(
                f"corpus {d.id!r}: high_conf_count {d.high_conf_count} != {len(hiconf)}"
            )

        if set(corpus.frame.points) != hiconf:
            raise ConsistencyViolationError(
                f"corpus {d.id!r}: projection points do not cover exactly "
                "the high-confidence set"
            )
        for concept, (x, y) in corpus.frame.points.items():
            _resolve(concept, "projection")
            if not (np.isfinite(x) and np.isfinite(y)):
                raise ConsistencyViolationError(
                    f"corpus {d.id!r}: non-finite coordinates for {concept!r}"
                )

        vec_ids = set(corpus.vectors.ids)
        expected_vec = selectable & shared
        if vec_ids != expected_vec:
            raise ConsistencyViolationError(
                f"corpus {d.id!r}: stored vectors must cover exactly the "
                f"selectable concepts in the shared vocabulary "
                f"({len(vec_ids)} stored, {len(expected_vec)} expected)"
            )
        if set(corpus.tables) != vec_ids:
            raise ConsistencyViolationError(
                f"corpus {d.id!r}: neighbor tables must cover exactly the "
                "stored-vector concepts"
            )
        if corpus.vectors.array.shape[0] != d.m or corpus.vectors.array.shape[2] != d.dim:
            raise ConsistencyViolationError(
                f"corpus {d.id!r}: vector block shape {corpus.vectors.array.shape} "
                f"inconsistent with m={d.m}, dim={d.dim}"
            )
        for concept, table in corpus.tables.items():
            _resolve(concept, "neighbor table")
            for row in table.rows:
                _resolve(row.neighbor, "neighbor table")
                if row.neighbor not in hiconf:
                    raise ConsistencyViolationError(
                        f"corpus {d.id!r}: neighbor {row.neighbor!r} of "
                        f"{concept!r} is not high-confidence"
                    )


def _dump_json(obj: object) -> bytes:
    return json.dumps(obj, sort_keys=True, indent=1).encode("utf-8")


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _confidence_payload(corpus: CorpusPayload) -> dict:
    return {
        "corpus_id": corpus.descriptor.id,
        "k": corpus.descriptor.k,
        "threshold": corpus.descriptor.threshold,
        "records": [
            {"concept": r.concept, "ec": r.ec, "high_confidence": r.high_confidence}
            for r in sorted(corpus.confidence, key=lambda r: r.concept)
        ],
    }


def _neighbors_payload(corpus: CorpusPayload) -> dict:
    return {
        "corpus_id": corpus.descriptor.id,
        "n": corpus.descriptor.n_neighbors,
        "tables": {
            concept: [[row.neighbor, row.mean_sim, row.std_sim] for row in table.rows]
            for concept, table in corpus.tables.items()
        },
    }


def _projection_payload(corpus: CorpusPayload) -> dict:
    frame = corpus.frame
    return {
        "corpus_id": corpus.descriptor.id,
        "aligned": frame.aligned,
        "seed": frame.seed,
        "perplexity": frame.perplexity,
        "kl_final": frame.kl_final,
        "kl_after_exaggeration": frame.kl_after_exaggeration,
        "points": {c: [x, y] for c, (x, y) in sorted(frame.points.items())},
    }


def _vector_files(corpus: CorpusPayload) -> tuple[dict, bytes]:
    block = corpus.vectors
    m, count, dim = block.array.shape
    stride = dim * _F32.itemsize
    index = {
        "m": m,
        "dim": dim,
        "count": count,
        "concepts": {
            cid: [(r * count + pos) * stride for r in range(m)]
            for pos, cid in enumerate(block.ids)
        },
    }
    return index, block.array.astype(_F32).tobytes(order="C")


def _concepts_payload(snapshot: Snapshot) -> dict:
    return {
        cid: {
            "preferred_term": meta.preferred_term,
            "synonyms": list(meta.synonyms),
            "semantic_group": meta.semantic_group,
            "definitions": list(meta.definitions),
        }
        for cid, meta in snapshot.concepts.items()
    }


def _descriptor_payload(d: CorpusDescriptor) -> dict:
    return {
        "id": d.id,
        "label": d.label,
        "order_index": d.order_index,
        "vocab_size": d.vocab_size,
        "high_conf_count": d.high_conf_count,
        "m": d.m,
        "dim": d.dim,
        "k": d.k,
        "threshold": d.threshold,
        "n_neighbors": d.n_neighbors,
        "perplexity": d.perplexity,
        "iterations": d.iterations,
        "seed": d.seed,
    }


def write_snapshot(root: Path | str, snapshot: Snapshot) -> str:
    """Validate, serialize, and atomically publish a snapshot directory.

    Returns the sha256 hex digest of the manifest. An existing directory at
    ``root`` is replaced only after the new tree is fully written.
    """
    validate_snapshot(snapshot)
    root = Path(root)

    files: dict[str, bytes] = {"concepts.json": _dump_json(_concepts_payload(snapshot))}
    for corpus in snapshot.corpora:
        base = f"corpora/{corpus.descriptor.id}"
        files[f"{base}/confidence.json"] = _dump_json(_confidence_payload(corpus))
        files[f"{base}/neighbors.json"] = _dump_json(_neighbors_payload(corpus))
        files[f"{base}/projection.json"] = _dump_json(_projection_payload(corpus))
        index, blob = _vector_files(corpus)
        files[f"{base}/vectors.idx.json"] = _dump_json(index)
        files[f"{base}/vectors.f32"] = blob

    manifest = {
        "format_version": snapshot.format_version,
        "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "corpora": [_descriptor_payload(c.descriptor) for c in snapshot.corpora],
        "files": {rel: _digest(data) for rel, data in files.items()},
    }
    manifest_bytes = _dump_json(manifest)

    try:
        root.parent.mkdir(parents=True, exist_ok=True)
        tmp = Path(tempfile.mkdtemp(prefix=root.name + ".tmp.", dir=root.parent))
        for rel, data in files.items():
            path = tmp / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
        (tmp / "manifest.json").write_bytes(manifest_bytes)
        if root.exists():
            old = Path(tempfile.mkdtemp(prefix=root.name + ".old.", dir=root.parent))
            os.rename(root, old / "snapshot")
            os.rename(tmp, root)
            shutil.rmtree(old, ignore_errors=True)
        else:
            os.rename(tmp, root)
    except OSError as exc:
        raise SnapshotIoError(f"cannot write snapshot at {root}: {exc}") from exc
    return _digest(manifest_bytes)


def _read_file(root: Path, rel: str, expected_digest: str | None) -> bytes:
    path = root / rel
    if not path.is_file():
        raise MissingFileError(f"snapshot file missing: {rel}")
    data = path.read_bytes()
    if expected_digest is not None and _digest(data) != expected_digest:
        raise DigestMismatchError(f"digest mismatch for {rel}")
    return data


def read_snapshot(root: Path | str) -> Snapshot:
    """Load, digest-check, and fully validate a snapshot directory."""
    root = Path(root)
    manifest_bytes = _read_file(root, "manifest.json", None)
    try:
        manifest = json.loads(manifest_bytes)
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"manifest.json is not valid JSON: {exc}") from exc
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"snapshot format_version {version!r} unsupported (this build reads {FORMAT_VERSION})"
        )

    raw: dict[str, bytes] = {}
    for rel, expected in sorted(manifest.get("files", {}).items()):
        raw[rel] = _read_file(root, rel, expected)

    concepts_doc = json.loads(raw["concepts.json"])
    concepts = {
        cid: ConceptMetadata(
            id=cid,
            preferred_term=doc["preferred_term"],
            synonyms=tuple(doc["synonyms"]),
            semantic_group=doc["semantic_group"],
            definitions=tuple(doc["definitions"]),
        )
        for cid, doc in concepts_doc.items()
    }

    corpora = []
    for desc_doc in manifest.get("corpora", []):
        descriptor = CorpusDescriptor(**desc_doc)
        base = f"corpora/{descriptor.id}"
        conf_doc = json.loads(raw[f"{base}/confidence.json"])
        confidence = tuple(
            ConfidenceRecord(
                corpus_id=descriptor.id,
                concept=r["concept"],
                ec=r["ec"],
                k=conf_doc["k"],
                high_confidence=r["high_confidence"],
            )
            for r in conf_doc["records"]
        )
        neigh_doc = json.loads(raw[f"{base}/neighbors.json"])
        tables = {
            concept: NeighborTable(
                corpus_id=descriptor.id,
                concept=concept,
                rows=tuple(NeighborRow(n, ms, ss) for n, ms, ss in rows),
                n=neigh_doc["n"],
            )
            for concept, rows in neigh_doc["tables"].items()
        }
        proj_doc = json.loads(raw[f"{base}/projection.json"])
        frame = ProjectionFrame(
            corpus_id=descriptor.id,
            points={c: (x, y) for c, (x, y) in proj_doc["points"].items()},
            aligned=proj_doc["aligned"],
            seed=proj_doc["seed"],
            perplexity=proj_doc["perplexity"],
            kl_final=proj_doc["kl_final"],
            kl_after_exaggeration=proj_doc["kl_after_exaggeration"],
        )
        idx_doc = json.loads(raw[f"{base}/vectors.idx.json"])
        m, dim, count = idx_doc["m"], idx_doc["dim"], idx_doc["count"]
        blob = raw[f"{base}/vectors.f32"]
        expected_len = m * count * dim * _F32.itemsize
        if len(blob) != expected_len:
            raise ConsistencyViolationError(
                f"{base}/vectors.f32 is {len(blob)} bytes, expected {expected_len}"
            )
        array = np.frombuffer(blob, dtype=_F32).reshape(m, count, dim)
        stride = dim * _F32.itemsize
        ids = [""] * count
        for cid, offsets in idx_doc["concepts"].items():
            if len(offsets) != m:
                raise ConsistencyViolationError(
                    f"{base}: {cid!r} has {len(offsets)} offsets, expected {m}"
                )
            pos, rem = divmod(offsets[0], stride)
            if rem or pos >= count or ids[pos]:
                raise ConsistencyViolationError(f"{base}: bad offset table for {cid!r}")
            if offsets != [(r * count + pos) * stride for r in range(m)]:
                raise ConsistencyViolationError(f"{base}: bad offset table for {cid!r}")
            ids[pos] = cid
        if any(not cid for cid in ids):
            raise ConsistencyViolationError(f"{base}: offset table does not cover all rows")
        vectors = VectorBlock(ids=tuple(ids), array=array)
        corpora.append(
            CorpusPayload(
                descriptor=descriptor,
                confidence=confidence,
                tables=tables,
                frame=frame,
                vectors=vectors,
            )
        )

    snapshot = Snapshot(
        format_version=version, concepts=concepts, corpora=tuple(corpora)
    )
    validate_snapshot(snapshot)
    return snapshot
