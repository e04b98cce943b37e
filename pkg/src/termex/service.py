"""Read-only JSON API over a loaded snapshot.

Five GET routes power the three client views: corpus descriptors, per-corpus
projections, concept search, concept detail (neighbors across every corpus,
with warnings where the concept is present but low-confidence), and
on-demand pairwise similarity series computed from the stored per-replicate
vectors. Errors are ``{"code", "message"}`` bodies with conventional HTTP
statuses. The service never mutates the snapshot.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .similarity import MAX_COMPARISONS
from .snapshot import CorpusPayload, Snapshot

DEFAULT_CORS_ORIGINS = [
    "http://localhost:3000",
    "http://localhost:5173",
    "http://localhost:8080",
    "http://127.0.0.1:3000",
    "http://127.0.0.1:5173",
    "http://127.0.0.1:8080",
]
MAX_SEARCH_RESULTS = 50
MIN_QUERY_LENGTH = 2


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class CorpusModel(BaseModel):
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


class ProjectionPointModel(BaseModel):
    id: str
    term: str
    group: str
    x: float
    y: float


class ProjectionModel(BaseModel):
    corpus_id: str
    aligned: bool
    points: list[ProjectionPointModel]


class SearchResultModel(BaseModel):
    id: str
    preferred_term: str
    semantic_group: str
    matched_term: str
    match_kind: str


class SearchModel(BaseModel):
    query: str
    results: list[SearchResultModel]


class NeighborModel(BaseModel):
    id: str
    preferred_term: str
    mean_sim: float
    std_sim: float


class CorpusBlockModel(BaseModel):
    corpus_id: str
    label: str
    present: bool
    ec: float | None
    high_confidence: bool
    warning: bool
    neighbors: list[NeighborModel]


class ConceptDetailModel(BaseModel):
    id: str
    preferred_term: str
    synonyms: list[str]
    semantic_group: str
    definitions: list[str]
    corpora: list[CorpusBlockModel]


class SimilarityPointModel(BaseModel):
    corpus_id: str
    mean: float | None
    std: float | None
    ref_high_conf: bool
    cmp_high_conf: bool
    present: bool


class SimilaritySeriesModel(BaseModel):
    reference: str
    comparison: str
    points: list[SimilarityPointModel]


class SimilarityModel(BaseModel):
    series: list[SimilaritySeriesModel]


class _Index:
    """Search and lookup structures derived once from an immutable snapshot."""

    def __init__(self, snapshot: Snapshot):
        self.snapshot = snapshot
        self.by_corpus: dict[str, CorpusPayload] = {
            c.descriptor.id: c for c in snapshot.corpora
        }
        self.hiconf: dict[str, set[str]] = {
            c.descriptor.id: {r.concept for r in c.confidence if r.high_confidence}
            for c in snapshot.corpora
        }
        self.records: dict[str, dict[str, float]] = {}
        for c in snapshot.corpora:
            self.records[c.descriptor.id] = {r.concept: r.ec for r in c.confidence}
        self.selectable = snapshot.selectable()
        # (lowercased term, original term, is_preferred, concept id)
        self.terms: list[tuple[str, str, bool, str]] = []
        for cid in sorted(self.selectable):
            meta = snapshot.concepts[cid]
            self.terms.append((meta.preferred_term.lower(), meta.preferred_term, True, cid))
            for syn in meta.synonyms:
                self.terms.append((syn.lower(), syn, False, cid))


def _match_rank(term_lower: str, q: str) -> int | None:
    if term_lower == q:
        return 0
    if term_lower.startswith(q):
        return 1
    if q in term_lower:
        return 2
    return None


_KIND_NAMES = {0: "exact", 1: "prefix", 2: "substring"}


def search_concepts(index: _Index, q: str) -> list[SearchResultModel]:
    """Case-insensitive substring search over selectable concepts' terms."""
    q = q.lower()
    best: dict[str, tuple[int, int, str, str]] = {}
    for term_lower, term, _preferred, cid in index.terms:
        rank = _match_rank(term_lower, q)
        if rank is None:
            continue
        key = (rank, len(term), term_lower, term)
        if cid not in best or key < best[cid]:
            best[cid] = key
    ranked = sorted(best.items(), key=lambda kv: (kv[1], kv[0]))
    out = []
    for cid, (rank, _length, _tl, term) in ranked[:MAX_SEARCH_RESULTS]:
        meta = index.snapshot.concepts[cid]
        out.append(
            SearchResultModel(
                id=cid,
                preferred_term=meta.preferred_term,
                semantic_group=meta.semantic_group,
                matched_term=term,
                match_kind=_KIND_NAMES[rank],
            )
        )
    return out


def _replicate_cosines_from_block(
    corpus: CorpusPayload, ref: str, cmp_id: str
) -> np.ndarray | None:
    block = corpus.vectors
    i = block.position(ref)
    j = block.position(cmp_id)
    if i is None or j is None:
        return None
    m = block.array.shape[0]
    if i == j:
        return np.ones(m)
    out = np.empty(m)
    for r in range(m):
        u = block.array[r, i].astype(np.float64)
        v = block.array[r, j].astype(np.float64)
        out[r] = min(1.0, max(-1.0, float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))))
    return out


def similarity_from_snapshot(
    snapshot: Snapshot, index: _Index, ref: str, cmps: list[str]
) -> SimilarityModel:
    series = []
    for cmp_id in cmps:
        points = []
        for corpus in snapshot.corpora:
            corpus_id = corpus.descriptor.id
            hiconf = index.hiconf[corpus_id]
            cos = _replicate_cosines_from_block(corpus, ref, cmp_id)
            if cos is None:
                points.append(
                    SimilarityPointModel(
                        corpus_id=corpus_id,
                        mean=None,
                        std=None,
                        ref_high_conf=ref in hiconf,
                        cmp_high_conf=cmp_id in hiconf,
                        present=False,
                    )
                )
                continue
            points.append(
                SimilarityPointModel(
                    corpus_id=corpus_id,
                    mean=float(cos.mean()),
                    std=float(cos.std()),
                    ref_high_conf=ref in hiconf,
                    cmp_high_conf=cmp_id in hiconf,
                    present=True,
                )
            )
        series.append(
            SimilaritySeriesModel(reference=ref, comparison=cmp_id, points=points)
        )
    return SimilarityModel(series=series)


def create_app(
    snapshot: Snapshot | None,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    """Build the API application over one immutable snapshot (or none)."""
    app = FastAPI(title="termex", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins if cors_origins is not None else DEFAULT_CORS_ORIGINS,
        allow_methods=["GET"],
        allow_headers=["*"],
    )
    index = _Index(snapshot) if snapshot is not None else None

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(
        _request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"code": "bad_request", "message": str(exc)}
        )

    def need_index() -> _Index:
        if index is None:
            raise ApiError(503, "no_snapshot", "no snapshot is loaded")
        return index

    def need_selectable(idx: _Index, concept: str) -> None:
        if concept not in idx.snapshot.concepts:
            raise ApiError(404, "unknown_concept", f"unknown concept {concept!r}")
        if concept not in idx.selectable:
            raise ApiError(
                409,
                "not_selectable",
                f"{concept!r} is not high-confidence in any corpus",
            )

    @app.get("/api/corpora", response_model=list[CorpusModel])
    def corpora() -> list[CorpusModel]:
        idx = need_index()
        return [CorpusModel(**vars(c.descriptor)) for c in idx.snapshot.corpora]

    @app.get("/api/corpora/{corpus_id}/projection", response_model=ProjectionModel)
    def projection(corpus_id: str) -> ProjectionModel:
        idx = need_index()
        corpus = idx.by_corpus.get(corpus_id)
        if corpus is None:
            raise ApiError(404, "unknown_corpus", f"unknown corpus {corpus_id!r}")
        points = []
        for cid, (x, y) in corpus.frame.points.items():
            meta = idx.snapshot.concepts[cid]
            points.append(
                ProjectionPointModel(
                    id=cid,
                    term=meta.preferred_term,
                    group=meta.semantic_group,
                    x=x,
                    y=y,
                )
            )
        return ProjectionModel(
            corpus_id=corpus_id, aligned=corpus.frame.aligned, points=points
        )

    @app.get("/api/concepts/search", response_model=SearchModel)
    def search(q: str = Query("")) -> SearchModel:
        idx = need_index()
        if len(q) < MIN_QUERY_LENGTH:
            raise ApiError(
                400,
                "query_too_short",
                f"query must be at least {MIN_QUERY_LENGTH} characters",
            )
        return SearchModel(query=q, results=search_concepts(idx, q))

    @app.get("/api/concepts/{concept_id}", response_model=ConceptDetailModel)
    def concept_detail(concept_id: str) -> ConceptDetailModel:
        idx = need_index()
        need_selectable(idx, concept_id)
        meta = idx.snapshot.concepts[concept_id]
        blocks = []
        for corpus in idx.snapshot.corpora:
            corpus_id = corpus.descriptor.id
            ec = idx.records[corpus_id].get(concept_id)
            present = ec is not None
            high_conf = concept_id in idx.hiconf[corpus_id]
            neighbors = []
            if present:
                for row in corpus.tables[concept_id].rows:
                    neighbors.append(
                        NeighborModel(
                            id=row.neighbor,
                            preferred_term=idx.snapshot.concepts[row.neighbor].preferred_term,
                            mean_sim=row.mean_sim,
                            std_sim=row.std_sim,
                        )
                    )
            blocks.append(
                CorpusBlockModel(
                    corpus_id=corpus_id,
                    label=corpus.descriptor.label,
                    present=present,
                    ec=ec,
                    high_confidence=high_conf,
                    warning=present and not high_conf,
                    neighbors=neighbors,
                )
            )
        return ConceptDetailModel(
            id=concept_id,
            preferred_term=meta.preferred_term,
            synonyms=list(meta.synonyms),
            semantic_group=meta.semantic_group,
            definitions=list(meta.definitions),
            corpora=blocks,
        )

    @app.get("/api/similarity", response_model=SimilarityModel)
    def similarity(
        ref: str = Query(""), cmp: list[str] | None = Query(None)
    ) -> SimilarityModel:
        idx = need_index()
        if not ref:
            raise ApiError(400, "bad_request", "a ref concept is required")
        cmps = cmp or []
        if not cmps:
            raise ApiError(400, "bad_request", "at least one cmp concept is required")
        if len(cmps) > MAX_COMPARISONS:
            raise ApiError(
                400,
                "too_many_comparisons",
                f"{len(cmps)} comparison concepts requested, cap is {MAX_COMPARISONS}",
            )
        need_selectable(idx, ref)
        for c in cmps:
            need_selectable(idx, c)
        return similarity_from_snapshot(idx.snapshot, idx, ref, cmps)

    return app
