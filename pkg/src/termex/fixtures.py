"""Synthetic multi-corpus embedding fixtures with planted, verifiable structure.

Each corpus contains ``clusters * per_cluster`` regular concepts plus up to
two planted ones. Regular concepts sit in tight sub-clumps of five around
orthonormal cluster centers, so every concept has four close stable
neighbors; per-replicate Gaussian noise (per-coordinate sigma = ``noise``)
perturbs each replicate independently. The same seed always produces
byte-identical files, and the underlying noise draws are independent of the
sigma value, so two generations that differ only in ``noise`` share their
base geometry.

Planted structure, controlled by the drift spec (``"switch,pair"``,
``"switch"``, ``"pair"``, or ``"none"``):

* ``planted_switch`` sits in cluster 0 in the first corpus and in cluster 1
  from the second corpus on. In the last corpus (when there are at least
  three) its per-replicate noise is scrambled so it drops out of the
  high-confidence set there while remaining present.
* ``planted_drift`` starts nearly orthogonal to an anchor concept (the
  first member of the last cluster) and is interpolated toward it corpus by
  corpus, so the true pair cosine increases strictly; the generator checks
  this during construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import UsageError
from .ingest import EmbeddingReplicate, serialize_embedding_file

SUBCLUMP_SIZE = 5
SUBCENTER_SCALE = 0.45
MEMBER_SCALE = 0.12
WOBBLE_SIGMA = 0.8
SWITCH_ID = "planted_switch"
DRIFT_ID = "planted_drift"


@dataclass(frozen=True)
class FixtureInfo:
    """What was generated and where; enough to drive tests and the CLI."""

    out_dir: Path
    corpus_ids: tuple[str, ...]
    labels: tuple[str, ...]
    replicate_paths: dict[str, list[Path]]
    terminology_path: Path
    cluster_of: dict[str, int]
    switch_id: str | None
    drift_id: str | None
    drift_anchor: str | None
    drift_base_cosines: tuple[float, ...]
    params: dict = field(default_factory=dict)


def _parse_drift(drift: str) -> set[str]:
    parts = {p.strip() for p in drift.split(",") if p.strip()}
    if parts == {"none"}:
        return set()
    if not parts or not parts <= {"switch", "pair"}:
        raise UsageError(
            f"invalid drift spec {drift!r}; expected 'switch', 'pair', "
            "'switch,pair', or 'none'"
        )
    return parts


def _unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal(dim)
    return g / np.linalg.norm(g)


def generate_fixture(
    out_dir: Path | str,
    *,
    corpora: int = 3,
    clusters: int = 2,
    per_cluster: int = 50,
    dim: int = 20,
    m: int = 5,
    noise: float = 0.05,
    drift: str = "switch,pair",
    seed: int = 13,
) -> FixtureInfo:
    """Generate replicate files and a terminology TSV under ``out_dir``."""
    if corpora < 1 or clusters < 1 or per_cluster < SUBCLUMP_SIZE or m < 2:
        raise UsageError(
            "invalid sizes: need corpora >= 1, clusters >= 1, "
            f"per_cluster >= {SUBCLUMP_SIZE}, m >= 2"
        )
    if dim < max(4, clusters):
        raise UsageError(f"dim {dim} too small for {clusters} clusters")
    if noise <= 0:
        raise UsageError(f"noise must be positive, got {noise}")
    plants = _parse_drift(drift)

    out_dir = Path(out_dir)
    rng = np.random.default_rng(seed)

    # orthonormal cluster centers
    basis, _ = np.linalg.qr(rng.standard_normal((dim, clusters)))
    centers = basis.T

    ids: list[str] = []
    cluster_of: dict[str, int] = {}
    bases: dict[str, np.ndarray] = {}
    first_subcenter: dict[int, np.ndarray] = {}
    for c in range(clusters):
        subcenters = [
            centers[c] + SUBCENTER_SCALE * _unit(rng, dim)
            for _ in range((per_cluster + SUBCLUMP_SIZE - 1) // SUBCLUMP_SIZE)
        ]
        first_subcenter[c] = subcenters[0]
        for i in range(per_cluster):
            cid = f"c{c}_{i:03d}"
            ids.append(cid)
            cluster_of[cid] = c
            bases[cid] = subcenters[i // SUBCLUMP_SIZE] + MEMBER_SCALE * _unit(rng, dim)

    switch_id = SWITCH_ID if "switch" in plants else None
    drift_id = DRIFT_ID if "pair" in plants else None
    drift_anchor = f"c{clusters - 1}_000" if drift_id else None

    # per-corpus base positions of the planted concepts; the switcher joins
    # an existing sub-clump so its neighborhoods stay stable on both sides
    switch_bases: list[np.ndarray] = []
    if switch_id:
        home = {
            0: first_subcenter[0] + MEMBER_SCALE * _unit(rng, dim),
            1: first_subcenter[min(1, clusters - 1)] + MEMBER_SCALE * _unit(rng, dim),
        }
        for t in range(corpora):
            switch_bases.append(home[0] if t == 0 else home[1])

    drift_bases: list[np.ndarray] = []
    drift_cosines: list[float] = []
    if drift_id:
        anchor_base = bases[drift_anchor]
        a_hat = anchor_base / np.linalg.norm(anchor_base)
        start = _unit(rng, dim)
        start -= (start @ a_hat) * a_hat
        start /= np.linalg.norm(start)
        alphas = np.linspace(0.15, 0.85, corpora)
        for alpha in alphas:
            direction = (1.0 - alpha) * start + alpha * a_hat
            base = direction / np.linalg.norm(direction)
            drift_bases.append(base)
            drift_cosines.append(float(base @ a_hat))
        if corpora > 1:
            steps = np.diff(drift_cosines)
            if not (steps > 0.05).all():
                raise UsageError(
                    "drift construction failed to produce a strictly "
                    f"increasing cosine trajectory: {drift_cosines}"
                )

    all_ids = list(ids)
    if switch_id:
        all_ids.append(switch_id)
    if drift_id:
        all_ids.append(drift_id)

    corpus_ids = tuple(f"corpus{t + 1}" for t in range(corpora))
    labels = tuple(f"Corpus {t + 1}" for t in range(corpora))
    wobble_corpus = corpora - 1 if (switch_id and corpora >= 3) else None

    replicate_paths: dict[str, list[Path]] = {}
    for t, corpus_id in enumerate(corpus_ids):
        corpus_dir = out_dir / corpus_id
        corpus_dir.mkdir(parents=True, exist_ok=True)
        paths = []
        for r in range(m):
            vectors = {}
            for cid in all_ids:
                if cid == switch_id:
                    base = switch_bases[t]
                    sigma = WOBBLE_SIGMA if t == wobble_corpus else noise
                elif cid == drift_id:
                    base = drift_bases[t]
                    sigma = noise
                else:
                    base = bases[cid]
                    sigma = noise
                vectors[cid] = base + sigma * rng.standard_normal(dim)
            rep = EmbeddingReplicate.from_mapping(corpus_id, r, vectors)
            path = corpus_dir / f"replicate{r}.vec"
            serialize_embedding_file(rep, path)
            paths.append(path)
        replicate_paths[corpus_id] = paths

    terminology_path = out_dir / "terminology.tsv"
    with open(terminology_path, "w", encoding="utf-8", newline="\n") as out:
        for cid in ids:
            c = cluster_of[cid]
            i = int(cid.split("_")[1])
            out.write(
                f"{cid}\tconcept {c}-{i:03d}\tc{c}x{i:03d}\tCluster {c}\t"
                f"Synthetic member {i} of cluster {c}.\n"
            )
        if switch_id:
            out.write(
                f"{switch_id}\tshifting concept\tswitcher\tPlanted\t"
                "Planted concept that moves between clusters across corpora.\n"
            )
        if drift_id:
            out.write(
                f"{drift_id}\tdrifting concept\tdrifter\tPlanted\t"
                "Planted concept whose similarity to its anchor grows across corpora.\n"
            )

    info = FixtureInfo(
        out_dir=out_dir,
        corpus_ids=corpus_ids,
        labels=labels,
        replicate_paths=replicate_paths,
        terminology_path=terminology_path,
        cluster_of=dict(cluster_of),
        switch_id=switch_id,
        drift_id=drift_id,
        drift_anchor=drift_anchor,
        drift_base_cosines=tuple(drift_cosines),
        params={
            "corpora": corpora,
            "clusters": clusters,
            "per_cluster": per_cluster,
            "dim": dim,
            "m": m,
            "noise": noise,
            "drift": ",".join(sorted(plants)) if plants else "none",
            "seed": seed,
        },
    )
    summary = {
        "corpus_ids": list(corpus_ids),
        "labels": list(labels),
        "replicates": {
            cid: [str(p.relative_to(out_dir)) for p in paths]
            for cid, paths in replicate_paths.items()
        },
        "terminology": str(terminology_path.relative_to(out_dir)),
        "switch_id": switch_id,
        "drift_id": drift_id,
        "drift_anchor": drift_anchor,
        "drift_base_cosines": list(info.drift_base_cosines),
        "params": info.params,
    }
    (out_dir / "fixture.json").write_text(
        json.dumps(summary, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )
    return info
