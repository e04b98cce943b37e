"""Confidence scoring, kNN determinism, and aggregate neighbor contracts."""

from __future__ import annotations

import numpy as np
import pytest

from termex.errors import ConceptAbsentError, UsageError, ZeroVectorError
from termex.fixtures import generate_fixture
from termex.ingest import load_replicate_set
from termex.stability import (
    aggregate_neighbors,
    cosine_similarity,
    embedding_confidence,
    high_confidence_set,
    knn,
)

from conftest import make_replicate, make_set
from oracles import oracle_aggregate, oracle_cosine, oracle_ec, oracle_knn


class TestCosine:
    def test_parallel(self):
        assert cosine_similarity(np.array([1.0, 0.0]), np.array([1.0, 0.0])) == 1.0

    def test_orthogonal(self):
        assert cosine_similarity(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_arbitrary_vectors_match_direct_arithmetic(self):
        u, v = [1.0, 2.0, 3.0], [4.0, 5.0, 6.0]
        expected = 32.0 / (np.sqrt(14.0) * np.sqrt(77.0))  # = 0.974631846...
        got = cosine_similarity(np.array(u), np.array(v))
        assert got == pytest.approx(expected, abs=1e-12)
        assert got == pytest.approx(0.974632, abs=5e-7)
        assert got == pytest.approx(oracle_cosine(u, v), abs=1e-14)

    def test_zero_vector_raises(self):
        with pytest.raises(ZeroVectorError):
            cosine_similarity(np.zeros(3), np.ones(3))

    def test_length_mismatch_raises(self):
        with pytest.raises(UsageError):
            cosine_similarity(np.ones(3), np.ones(4))

    def test_clamped_to_unit_interval(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            u = rng.standard_normal(5)
            s = cosine_similarity(u, 3.0 * u)
            assert -1.0 <= s <= 1.0


class TestKnn:
    def test_single_nearest(self):
        rep = make_replicate(
            "c", 0, {"a": [1, 0], "b": [0.9, 0.1], "c": [0, 1]}
        )
        result = knn(rep, "a", 1, ["a", "b", "c"])
        assert [e[0] for e in result.entries] == ["b"]
        assert result.entries == tuple(
            (c, pytest.approx(s, abs=1e-12))
            for c, s in [("b", oracle_cosine([1, 0], [0.9, 0.1]))]
        )

    def test_pool_exhaustion_returns_everything_sorted(self):
        rep = make_replicate(
            "c", 0, {"a": [1, 0], "b": [0.9, 0.1], "c": [0, 1], "d": [0.5, 0.5]}
        )
        result = knn(rep, "a", 10, ["a", "b", "c", "d"])
        names = [e[0] for e in result.entries]
        assert names == ["b", "d", "c"]
        scores = [e[1] for e in result.entries]
        assert scores == sorted(scores, reverse=True)

    def test_equal_similarity_breaks_ties_by_id(self):
        rep = make_replicate(
            "c", 0, {"t": [1, 0], "y": [1, 1], "x": [1, 1], "z": [0, 1]}
        )
        result = knn(rep, "t", 2, ["t", "x", "y", "z"])
        assert [e[0] for e in result.entries] == ["x", "y"]

    def test_concept_absent(self):
        rep = make_replicate("c", 0, {"a": [1, 0], "b": [0, 1]})
        with pytest.raises(ConceptAbsentError):
            knn(rep, "zzz", 1, ["a", "b"])
        with pytest.raises(ConceptAbsentError):
            knn(rep, "a", 1, ["a", "zzz"])

    def test_matches_exhaustive_oracle_on_random_data(self):
        rng = np.random.default_rng(42)
        for trial in range(30):
            n = int(rng.integers(4, 20))
            d = int(rng.integers(2, 8))
            vectors = {f"c{i:02d}": rng.standard_normal(d) for i in range(n)}
            rep = make_replicate("c", 0, vectors)
            k = int(rng.integers(1, n))
            got = knn(rep, "c00", k, list(vectors))
            want = oracle_knn(vectors, "c00", k, sorted(vectors))
            assert [e[0] for e in got.entries] == want, f"trial {trial}"

    def test_deterministic_across_calls(self):
        rng = np.random.default_rng(7)
        vectors = {f"c{i}": rng.standard_normal(6) for i in range(12)}
        rep = make_replicate("c", 0, vectors)
        first = knn(rep, "c0", 5, list(vectors))
        second = knn(rep, "c0", 5, list(vectors))
        assert first == second


def _random_set(rng, v, d, m, corpus="c"):
    replicates = []
    for r in range(m):
        replicates.append({f"c{i:02d}": rng.standard_normal(d) for i in range(v)})
    return make_set(corpus, 0, *replicates), replicates


class TestEmbeddingConfidence:
    def test_identical_replicates_give_exactly_one(self):
        vectors = {"a": [1.0, 0.2], "b": [0.5, 1.0], "c": [0.1, 0.9], "d": [1, 1]}
        rset = make_set("c", 0, vectors, vectors, vectors)
        for concept in vectors:
            for k in (1, 2, 3):
                assert embedding_confidence(rset, concept, k) == 1.0

    def test_pairwise_disjoint_neighborhoods_give_zero(self):
        # k=1: t's nearest neighbor is a different concept in every replicate
        base = {"t": [1.0, 0.0, 0.0]}
        far = {"a": [0.0, 1.0, 0.0], "b": [0.0, 0.0, 1.0], "c": [0.0, 1.0, 1.0]}
        reps = []
        for near in ("a", "b", "c"):
            rep = dict(base)
            for name, vec in far.items():
                rep[name] = [0.99, 0.1, 0.1] if name == near else vec
            reps.append(rep)
        rset = make_set("c", 0, *reps)
        assert embedding_confidence(rset, "t", 1) == 0.0

    def test_worked_overlap_example(self):
        # m=3, k=2; neighborhoods of t are {b,c}, {b,d}, {c,d}:
        # ordered-pair overlaps sum to 6 -> raw 6/(3*2) = 1 -> normalized 0.5
        def rep(near1, near2, far):
            return {
                "t": [1.0, 0.0, 0.0],
                near1: [0.9, 0.1, 0.0],
                near2: [0.9, 0.0, 0.1],
                far: [0.0, 1.0, 0.0],
            }

        reps = [rep("b", "c", "d"), rep("b", "d", "c"), rep("c", "d", "b")]
        rset = make_set("c", 0, *reps)
        assert embedding_confidence(rset, "t", 2) == 0.5
        assert oracle_ec(reps, "t", 2) == 0.5

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(11)
        for trial in range(25):
            v = int(rng.integers(4, 16))
            d = int(rng.integers(2, 6))
            m = int(rng.integers(2, 5))
            rset, reps = _random_set(rng, v, d, m)
            k = int(rng.integers(1, min(4, v - 1) + 1))
            concept = f"c{int(rng.integers(0, v)):02d}"
            assert embedding_confidence(rset, concept, k) == oracle_ec(
                reps, concept, k
            ), f"trial {trial}"

    def test_invariant_under_replicate_permutation(self):
        rng = np.random.default_rng(23)
        rset, reps = _random_set(rng, 10, 4, 4)
        base = embedding_confidence(rset, "c03", 3)
        for order in ([3, 2, 1, 0], [1, 3, 0, 2]):
            shuffled = make_set("c", 0, *(reps[i] for i in order))
            assert embedding_confidence(shuffled, "c03", 3) == base

    def test_invariant_under_uniform_positive_scaling(self):
        rng = np.random.default_rng(29)
        rset, reps = _random_set(rng, 12, 5, 3)
        base = embedding_confidence(rset, "c05", 4)
        scaled = [dict(rep) for rep in reps]
        scaled[1] = {cid: np.asarray(vec) * 3.7 for cid, vec in reps[1].items()}
        assert embedding_confidence(make_set("c", 0, *scaled), "c05", 4) == base

    def test_bounds_on_random_inputs(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            rset, _ = _random_set(rng, 8, 3, 3)
            for concept in rset.shared_ids:
                ec = embedding_confidence(rset, concept, 2)
                assert 0.0 <= ec <= 1.0

    def test_absent_concept(self):
        rng = np.random.default_rng(37)
        rset, _ = _random_set(rng, 5, 3, 2)
        with pytest.raises(ConceptAbsentError):
            embedding_confidence(rset, "nope", 2)


class TestHighConfidenceSet:
    def test_threshold_zero_keeps_everything(self):
        rng = np.random.default_rng(41)
        rset, _ = _random_set(rng, 9, 3, 3)
        passing, records = high_confidence_set(rset, 2, 0.0)
        assert passing == set(rset.shared_ids)
        assert len(records) == 9

    def test_threshold_one_keeps_only_perfectly_stable(self):
        rng = np.random.default_rng(43)
        rset, _ = _random_set(rng, 10, 3, 3)
        passing, records = high_confidence_set(rset, 2, 1.0)
        assert passing == {r.concept for r in records if r.ec == 1.0}

    def test_boundary_is_inclusive(self):
        # reuse the worked example: EC(t) is exactly 0.5
        def rep(near1, near2, far):
            return {
                "t": [1.0, 0.0, 0.0],
                near1: [0.9, 0.1, 0.0],
                near2: [0.9, 0.0, 0.1],
                far: [0.0, 1.0, 0.0],
            }

        rset = make_set(
            "c", 0, rep("b", "c", "d"), rep("b", "d", "c"), rep("c", "d", "b")
        )
        passing, _ = high_confidence_set(rset, 2, 0.5)
        assert "t" in passing

    def test_agrees_with_per_concept_confidence(self):
        rng = np.random.default_rng(47)
        rset, _ = _random_set(rng, 12, 4, 3)
        _, records = high_confidence_set(rset, 3, 0.5)
        for record in records:
            assert record.ec == embedding_confidence(rset, record.concept, 3)
            assert record.high_confidence == (record.ec >= 0.5)

    def test_tight_clusters_are_mostly_high_confidence(self, tmp_path):
        # statistical: sigma=0.01 fixture should pass >= 95% at k=5, t=0.5
        for seed in (3, 11, 27):
            info = generate_fixture(
                tmp_path / f"s{seed}", noise=0.01, drift="none", seed=seed
            )
            rset = load_replicate_set(
                info.replicate_paths["corpus1"], "corpus1", "C1", 0
            )
            passing, records = high_confidence_set(rset, 5, 0.5)
            assert len(passing) / len(records) >= 0.95

    def test_invalid_threshold(self):
        rng = np.random.default_rng(53)
        rset, _ = _random_set(rng, 5, 3, 2)
        with pytest.raises(UsageError):
            high_confidence_set(rset, 2, 1.01)


class TestAggregateNeighbors:
    def test_identical_replicates_have_zero_std(self):
        vectors = {"a": [1.0, 0.1], "b": [0.5, 1.0], "c": [0.2, 0.9], "d": [1, 1]}
        rset = make_set("c", 0, vectors, vectors)
        table = aggregate_neighbors(rset, "a", 3, {"b", "c", "d"})
        assert len(table.rows) == 3
        for row in table.rows:
            assert row.std_sim == 0.0

    def test_pool_of_only_target_is_empty_table(self):
        vectors = {"a": [1.0, 0.0], "b": [0.0, 1.0], "c": [1, 1]}
        rset = make_set("c", 0, vectors, vectors)
        table = aggregate_neighbors(rset, "a", 5, {"a"})
        assert table.rows == ()

    def test_hand_checked_means(self):
        rep0 = {"t": [1.0, 0.0], "x": [1.0, 1.0], "y": [0.0, 1.0]}
        rep1 = {"t": [1.0, 0.0], "x": [1.0, 0.0], "y": [1.0, 1.0]}
        rset = make_set("c", 0, rep0, rep1)
        table = aggregate_neighbors(rset, "t", 2, {"x", "y"})
        expect = oracle_aggregate([rep0, rep1], "t", 2, ["x", "y"])
        assert [r.neighbor for r in table.rows] == [e[0] for e in expect]
        for row, (_, mean, std) in zip(table.rows, expect):
            assert row.mean_sim == pytest.approx(mean, abs=1e-12)
            assert row.std_sim == pytest.approx(std, abs=1e-12)
        # explicit arithmetic: cos(t,x) is 1/sqrt(2) then 1, cos(t,y) is 0 then 1/sqrt(2)
        s = 1.0 / np.sqrt(2.0)
        assert table.rows[0].neighbor == "x"
        assert table.rows[0].mean_sim == pytest.approx((s + 1.0) / 2.0, abs=1e-12)
        assert table.rows[1].mean_sim == pytest.approx(s / 2.0, abs=1e-12)

    def test_matches_oracle_on_random_data(self):
        rng = np.random.default_rng(61)
        for trial in range(15):
            rset, reps = _random_set(rng, 10, 4, 3)
            hiconf = set(list(rset.shared_ids)[: int(rng.integers(3, 9))])
            concept = "c00"
            table = aggregate_neighbors(rset, concept, 4, hiconf)
            expect = oracle_aggregate(reps, concept, 4, sorted(hiconf))
            assert [r.neighbor for r in table.rows] == [e[0] for e in expect], trial
            for row, (_, mean, std) in zip(table.rows, expect):
                assert row.mean_sim == pytest.approx(mean, abs=1e-12)
                assert row.std_sim == pytest.approx(std, abs=1e-12)

    def test_rows_subset_of_hiconf_and_target_excluded(self):
        rng = np.random.default_rng(67)
        rset, _ = _random_set(rng, 12, 4, 2)
        hiconf = {"c00", "c01", "c02", "c03"}
        table = aggregate_neighbors(rset, "c00", 10, hiconf)
        names = {r.neighbor for r in table.rows}
        assert names <= hiconf
        assert "c00" not in names

    def test_prefix_monotone_in_n(self):
        rng = np.random.default_rng(71)
        rset, _ = _random_set(rng, 14, 5, 3)
        hiconf = set(rset.shared_ids)
        small = aggregate_neighbors(rset, "c04", 5, hiconf)
        large = aggregate_neighbors(rset, "c04", 9, hiconf)
        assert large.rows[:5] == small.rows

    def test_target_need_not_be_high_confidence(self):
        rng = np.random.default_rng(73)
        rset, _ = _random_set(rng, 8, 3, 2)
        hiconf = {"c01", "c02"}
        table = aggregate_neighbors(rset, "c05", 2, hiconf)
        assert {r.neighbor for r in table.rows} == hiconf

    def test_absent_target(self):
        rng = np.random.default_rng(79)
        rset, _ = _random_set(rng, 5, 3, 2)
        with pytest.raises(ConceptAbsentError):
            aggregate_neighbors(rset, "nope", 2, {"c01"})
