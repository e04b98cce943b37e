"""t-SNE determinism and quality, Procrustes recovery, chain alignment."""

from __future__ import annotations

import numpy as np
import pytest

from termex.errors import TooFewPointsError
from termex.projection import (
    DegenerateAffinitiesWarning,
    InsufficientOverlapWarning,
    PerplexityClampedWarning,
    ProjectionFrame,
    align_chain,
    procrustes_align,
    tsne_project,
)


def two_cluster_vectors(n_per=50, d=20, seed=1):
    """Two well-separated Gaussian clusters; labels by id prefix."""
    rng = np.random.default_rng(seed)
    vectors = {}
    for label, center in (("a", 4.0 * np.eye(d)[0]), ("b", 4.0 * np.eye(d)[1])):
        for i in range(n_per):
            vectors[f"{label}{i:03d}"] = center + 0.5 * rng.standard_normal(d)
    return vectors


def neighbor_purity(frame: ProjectionFrame, k=10) -> float:
    ids = sorted(frame.points)
    coords = np.asarray([frame.points[c] for c in ids])
    labels = np.asarray([c[0] for c in ids])
    dist = np.linalg.norm(coords[:, None, :] - coords[None, :, :], axis=2)
    np.fill_diagonal(dist, np.inf)
    share = 0
    for i in range(len(ids)):
        nearest = np.argsort(dist[i])[:k]
        share += int((labels[nearest] == labels[i]).sum())
    return share / (len(ids) * k)


def make_frame(corpus_id, points, **kwargs):
    defaults = dict(aligned=False, seed=0, perplexity=5.0, kl_final=0.0)
    defaults.update(kwargs)
    return ProjectionFrame(corpus_id=corpus_id, points=points, **defaults)


def random_frame(rng, n=20, corpus_id="f"):
    return make_frame(
        corpus_id,
        {f"p{i:02d}": (float(x), float(y)) for i, (x, y) in enumerate(rng.standard_normal((n, 2)))},
    )


class TestTsne:
    def test_too_few_points(self):
        vectors = {f"c{i}": np.ones(3) + i for i in range(3)}
        with pytest.raises(TooFewPointsError):
            tsne_project(vectors, perplexity=1.0, iterations=10, seed=0)

    def test_degenerate_affinities_fall_back_to_random_layout(self):
        # four orthonormal vectors: every pairwise cosine distance is 1
        e = np.eye(4)
        vectors = {f"c{i}": e[i] for i in range(4)}
        with pytest.warns(DegenerateAffinitiesWarning):
            frame = tsne_project(vectors, perplexity=1.0, iterations=50, seed=3)
        assert len(frame.points) == 4
        for x, y in frame.points.values():
            assert np.isfinite(x) and np.isfinite(y)

    def test_deterministic_for_fixed_seed(self):
        vectors = two_cluster_vectors(n_per=15, d=8, seed=7)
        a = tsne_project(vectors, perplexity=8.0, iterations=120, seed=42)
        b = tsne_project(vectors, perplexity=8.0, iterations=120, seed=42)
        assert a.points == b.points  # bit-identical
        assert a.kl_final == b.kl_final
        c = tsne_project(vectors, perplexity=8.0, iterations=120, seed=43)
        assert c.points != a.points

    def test_two_clusters_separate_cleanly(self):
        vectors = two_cluster_vectors(n_per=30, d=20, seed=2)
        frame = tsne_project(vectors, perplexity=15.0, iterations=500, seed=11)
        assert neighbor_purity(frame, k=10) >= 0.95
        assert frame.kl_final <= frame.kl_after_exaggeration

    def test_final_kl_below_post_exaggeration_kl(self):
        vectors = two_cluster_vectors(n_per=12, d=6, seed=9)
        frame = tsne_project(vectors, perplexity=6.0, iterations=400, seed=1)
        assert 0.0 <= frame.kl_final <= frame.kl_after_exaggeration

    def test_perplexity_clamped_with_warning(self):
        vectors = two_cluster_vectors(n_per=3, d=4, seed=5)  # 6 points
        with pytest.warns(PerplexityClampedWarning):
            frame = tsne_project(vectors, perplexity=30.0, iterations=50, seed=0)
        assert frame.perplexity == pytest.approx(5.0 / 3.0)


def apply_similarity(points, angle, scale, tx, ty, reflect=False):
    c, s = np.cos(angle), np.sin(angle)
    R = np.array([[c, -s], [s, c]])
    if reflect:
        R = R @ np.array([[1.0, 0.0], [0.0, -1.0]])
    out = {}
    for cid, (x, y) in points.items():
        v = scale * (np.array([x, y]) @ R) + np.array([tx, ty])
        out[cid] = (float(v[0]), float(v[1]))
    return out


class TestProcrustes:
    def test_identity_when_target_equals_source(self):
        rng = np.random.default_rng(17)
        source = random_frame(rng)
        transform, aligned = procrustes_align(source, source)
        assert np.allclose(transform.rotation, np.eye(2), atol=1e-9)
        assert transform.scale == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(transform.translation, 0.0, atol=1e-12)
        assert transform.disparity_after == pytest.approx(0.0, abs=1e-9)
        assert aligned.aligned is True
        for cid in source.points:
            assert aligned.points[cid] == pytest.approx(source.points[cid], abs=1e-9)

    def test_recovers_rotation_and_translation(self):
        rng = np.random.default_rng(19)
        source = random_frame(rng)
        target = make_frame(
            "g", apply_similarity(source.points, np.pi / 2.0, 1.0, 3.0, -1.0)
        )
        transform, aligned = procrustes_align(source, target)
        for cid in source.points:
            assert aligned.points[cid] == pytest.approx(target.points[cid], abs=1e-6)
        assert transform.disparity_after < 1e-9
        R = transform.rotation
        assert np.abs(R.T @ R - np.eye(2)).max() < 1e-9

    def test_recovers_scaled_reflected_motion(self):
        rng = np.random.default_rng(23)
        source = random_frame(rng)
        target = make_frame(
            "g",
            apply_similarity(source.points, 0.7, 2.5, -4.0, 9.0, reflect=True),
        )
        transform, aligned = procrustes_align(source, target)
        for cid in source.points:
            assert aligned.points[cid] == pytest.approx(target.points[cid], abs=1e-6)
        assert np.linalg.det(transform.rotation) == pytest.approx(-1.0, abs=1e-9)
        assert transform.scale == pytest.approx(2.5, abs=1e-6)

    def test_transform_applies_to_unshared_points(self):
        rng = np.random.default_rng(29)
        source = random_frame(rng, n=10)
        shared_target = apply_similarity(source.points, 1.1, 0.5, 1.0, 2.0)
        only_some = {cid: shared_target[cid] for cid in list(shared_target)[:6]}
        target = make_frame("g", only_some)
        _, aligned = procrustes_align(source, target)
        # unshared source points must follow the same fitted transform
        for cid in list(source.points)[6:]:
            assert aligned.points[cid] == pytest.approx(shared_target[cid], abs=1e-6)

    def test_disparity_never_increases(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            a = random_frame(rng, n=int(rng.integers(3, 30)))
            b = make_frame(
                "g",
                {
                    cid: (float(x), float(y))
                    for cid, (x, y) in zip(
                        a.points, rng.standard_normal((len(a.points), 2)) * 3
                    )
                },
            )
            transform, _ = procrustes_align(a, b)
            assert transform.disparity_after <= transform.disparity_before
            R = transform.rotation
            assert np.abs(R.T @ R - np.eye(2)).max() < 1e-9
            assert transform.scale > 0.0

    def test_beats_random_search(self):
        rng = np.random.default_rng(37)
        source = random_frame(rng)
        target = random_frame(rng, corpus_id="g")
        transform, _ = procrustes_align(source, target)
        X = np.asarray([source.points[c] for c in sorted(source.points)])
        Y = np.asarray([target.points[c] for c in sorted(target.points)])
        best = np.inf
        for _ in range(1000):
            angle = rng.uniform(0, 2 * np.pi)
            scale = rng.uniform(0.05, 5.0)
            t = rng.uniform(-5, 5, 2)
            reflect = bool(rng.integers(0, 2))
            c, s = np.cos(angle), np.sin(angle)
            R = np.array([[c, -s], [s, c]])
            if reflect:
                R = R @ np.diag([1.0, -1.0])
            best = min(best, float(np.linalg.norm(scale * (X @ R) + t - Y)))
        assert transform.disparity_after <= best

    def test_insufficient_overlap_uses_identity(self):
        rng = np.random.default_rng(41)
        source = random_frame(rng, n=5)
        target = make_frame("g", {"q1": (0.0, 0.0), "q2": (1.0, 1.0)})
        with pytest.warns(InsufficientOverlapWarning):
            transform, aligned = procrustes_align(source, target)
        assert np.array_equal(transform.rotation, np.eye(2))
        assert transform.scale == 1.0
        assert aligned.points == source.points
        assert aligned.aligned is True


class TestAlignChain:
    def test_single_frame_unchanged(self):
        rng = np.random.default_rng(43)
        frame = random_frame(rng)
        out = align_chain([frame])
        assert len(out) == 1
        assert out[0].points == frame.points
        assert out[0].aligned is True

    def test_rigid_chain_collapses_displacement(self):
        rng = np.random.default_rng(47)
        base = random_frame(rng, n=25, corpus_id="f0")
        f1 = make_frame("f1", apply_similarity(base.points, 0.9, 1.0, 5.0, -2.0))
        f2 = make_frame("f2", apply_similarity(base.points, -1.3, 1.0, -1.0, 4.0))
        out = align_chain([base, f1, f2])
        for prev, cur in zip(out, out[1:]):
            for cid in prev.points:
                dx = np.hypot(
                    cur.points[cid][0] - prev.points[cid][0],
                    cur.points[cid][1] - prev.points[cid][1],
                )
                assert dx < 1e-5

    def test_disjoint_middle_frame_keeps_chain_going(self):
        rng = np.random.default_rng(53)
        base = random_frame(rng, n=10, corpus_id="f0")
        lonely = make_frame(
            "f1", {f"z{i}": (float(i), float(-i)) for i in range(8)}
        )
        third = make_frame("f2", apply_similarity(lonely.points, 0.4, 2.0, 1.0, 1.0))
        with pytest.warns(InsufficientOverlapWarning):
            out = align_chain([base, lonely, third])
        assert out[1].points == lonely.points  # identity link
        for cid in lonely.points:  # but the next link still aligns
            assert out[2].points[cid] == pytest.approx(lonely.points[cid], abs=1e-6)

    def test_identical_frames_align_to_themselves(self):
        rng = np.random.default_rng(59)
        frame = random_frame(rng, n=12)
        out = align_chain([frame, frame, frame])
        for aligned in out:
            for cid in frame.points:
                assert aligned.points[cid] == pytest.approx(frame.points[cid], abs=1e-9)
