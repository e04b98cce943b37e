"""Shared test fixtures: the default synthetic corpus set, its snapshot, and a
hand-built "micro" snapshot with full control over confidence and vocabulary."""

from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from termex.fixtures import generate_fixture
from termex.ingest import (
    ConceptMetadata,
    EmbeddingReplicate,
    ReplicateSet,
    load_replicate_set,
    parse_terminology,
)
from termex.pipeline import ComputeParams, build_snapshot
from termex.service import create_app
from termex.snapshot import read_snapshot, write_snapshot

FIXTURE_SEED = 13


def make_replicate(corpus_id: str, index: int, vectors: dict) -> EmbeddingReplicate:
    return EmbeddingReplicate.from_mapping(corpus_id, index, vectors)


def make_set(corpus_id: str, order: int, *replicate_vectors: dict, label: str | None = None) -> ReplicateSet:
    reps = [make_replicate(corpus_id, i, v) for i, v in enumerate(replicate_vectors)]
    return ReplicateSet.build(corpus_id, label or corpus_id, order, reps)


@pytest.fixture(scope="session")
def fixture_info(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixture")
    return generate_fixture(out, seed=FIXTURE_SEED)


@pytest.fixture(scope="session")
def fixture_sets(fixture_info):
    sets = []
    for t, cid in enumerate(fixture_info.corpus_ids):
        sets.append(
            load_replicate_set(
                fixture_info.replicate_paths[cid], cid, fixture_info.labels[t], t
            )
        )
    return sets


@pytest.fixture(scope="session")
def fixture_terminology(fixture_info):
    with open(fixture_info.terminology_path, "rb") as fh:
        return parse_terminology(fh, name=str(fixture_info.terminology_path))


@pytest.fixture(scope="session")
def fixture_snapshot_dir(tmp_path_factory, fixture_sets, fixture_terminology):
    snapshot = build_snapshot(fixture_sets, fixture_terminology, ComputeParams())
    root = tmp_path_factory.mktemp("snap") / "snapshot"
    write_snapshot(root, snapshot)
    return root


@pytest.fixture(scope="session")
def fixture_snapshot(fixture_snapshot_dir):
    return read_snapshot(fixture_snapshot_dir)


@pytest.fixture(scope="session")
def fixture_client(fixture_snapshot):
    return TestClient(create_app(fixture_snapshot))


# --- micro corpus: two corpora, nine concepts, controlled confidence --------
#
# Triads around e1 (a1, a2, a3 + only_a) and e2 (b1, b2, b3) are identical in
# every replicate, so their confidence is exactly 1. "wobble" flips between
# the triads across replicates in corpus alpha (confidence 0) but is stable
# in corpus beta; "hermit" flips in both corpora and is selectable nowhere;
# "only_a" exists only in corpus alpha; "ghost" exists only in terminology.

MICRO_TERMINOLOGY = """\
a1\tanemia\tblood disorder|anaemia\tDisorders\tLow red blood cell count.
a2\tanemic disorder\t\tDisorders\tChronic form.
a3\tangle\tcorner\tGeometry\tWhere two lines meet.
b1\tbanana\tplantain fruit\tFood\tA yellow fruit.
b2\tbandage\twrap\tSupplies\tWound covering.
b3\tmembrane\tlayer\tAnatomy\tThin separating layer.
only_a\tanalysis\tstudy\tProcedures\tCareful examination.
wobble\twand\tmagic stick\tSupplies\tUnstable implement.
hermit\thermit zzyx\tloner\tUnknown\tNever stable anywhere.
ghost\tghost term\tphantom\tUnknown\tIn terminology only.
"""


def _micro_vectors(corpus: str) -> tuple[dict, dict]:
    e = np.eye(8)
    base = {
        "a1": e[0] + 0.010 * e[3],
        "a2": e[0] + 0.020 * e[4],
        "a3": e[0] + 0.015 * e[5],
        "b1": e[1] + 0.010 * e[3],
        "b2": e[1] + 0.020 * e[4],
        "b3": e[1] + 0.015 * e[5],
    }
    rep0 = dict(base)
    rep1 = dict(base)
    if corpus == "alpha":
        rep0["only_a"] = rep1["only_a"] = e[0] + 0.020 * e[6]
        rep0["wobble"] = 0.6 * e[0] + 0.8 * e[2]
        rep1["wobble"] = 0.6 * e[1] + 0.8 * e[2]
        rep0["hermit"] = 0.6 * e[0] + 0.8 * e[5]
        rep1["hermit"] = 0.6 * e[1] + 0.8 * e[5]
    else:
        rep0["wobble"] = rep1["wobble"] = 0.9 * e[1] + 0.1 * e[2]
        rep0["hermit"] = 0.6 * e[1] + 0.8 * e[6]
        rep1["hermit"] = 0.6 * e[0] + 0.8 * e[6]
    return rep0, rep1


def micro_replicate_sets() -> list[ReplicateSet]:
    alpha0, alpha1 = _micro_vectors("alpha")
    beta0, beta1 = _micro_vectors("beta")
    return [
        make_set("alpha", 0, alpha0, alpha1, label="Corpus Alpha"),
        make_set("beta", 1, beta0, beta1, label="Corpus Beta"),
    ]


def micro_terminology() -> dict[str, ConceptMetadata]:
    import io

    return parse_terminology(io.BytesIO(MICRO_TERMINOLOGY.encode("utf-8")))


MICRO_PARAMS = ComputeParams(
    k=2, threshold=0.5, n_neighbors=3, perplexity=2.0, iterations=250, seed=7
)


@pytest.fixture(scope="session")
def micro_snapshot_dir(tmp_path_factory):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        snapshot = build_snapshot(micro_replicate_sets(), micro_terminology(), MICRO_PARAMS)
    root = tmp_path_factory.mktemp("micro") / "snapshot"
    write_snapshot(root, snapshot)
    return root


@pytest.fixture(scope="session")
def micro_snapshot(micro_snapshot_dir):
    return read_snapshot(micro_snapshot_dir)


@pytest.fixture(scope="session")
def micro_client(micro_snapshot):
    return TestClient(create_app(micro_snapshot))


def read_json(path: Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))
