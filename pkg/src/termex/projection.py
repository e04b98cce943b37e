"""2-D projection of embedding spaces and cross-corpus frame alignment.

t-SNE is implemented exactly (full gradient, no tree approximation) so runs
are reproducible bit-for-bit for a fixed seed. Input affinities come from
cosine distance (1 - cosine), consistent with every other similarity in the
package. The optimization follows the canonical schedule: early exaggeration
factor 12 for the first 250 iterations, learning rate max(50, n/12),
momentum 0.5 during exaggeration then 0.8, adaptive per-coordinate gains,
and a seeded Gaussian init with sigma 1e-4.

Alignment between corpora uses a closed-form similarity Procrustes fit
(rotation, optional reflection, uniform scale, translation) on the shared
concepts, then applies the transform to every point of the source frame.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import TooFewPointsError, UsageError, ZeroVectorError

EXAGGERATION_FACTOR = 12.0
EXAGGERATION_ITERS = 250
MOMENTUM_EARLY = 0.5
MOMENTUM_LATE = 0.8
INIT_SIGMA = 1e-4
MIN_GAIN = 0.01
EPS = 1e-12


class DegenerateAffinitiesWarning(UserWarning):
    """All pairwise input distances are equal; layout fell back to random."""


class PerplexityClampedWarning(UserWarning):
    """Requested perplexity was too large for the point count and was reduced."""


class InsufficientOverlapWarning(UserWarning):
    """Fewer than three shared concepts; alignment link left as identity."""


@dataclass(frozen=True)
class ProjectionFrame:
    """2-D coordinates for one corpus's high-confidence concepts."""

    corpus_id: str
    points: Mapping[str, tuple[float, float]]
    aligned: bool
    seed: int
    perplexity: float
    kl_final: float
    kl_after_exaggeration: float = 0.0


@dataclass(frozen=True)
class AlignmentTransform:
    """Similarity transform mapping source points onto a target frame.

    Points are rows; the transform is ``y = scale * x @ rotation + translation``.
    ``rotation`` is orthogonal with determinant +-1 (reflections permitted).
    """

    rotation: np.ndarray
    scale: float
    translation: np.ndarray
    disparity_before: float
    disparity_after: float


def _cosine_distances(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    if (norms == 0.0).any():
        raise ZeroVectorError("zero-norm input vector; cosine distance undefined")
    Xn = X / norms
    S = np.clip(Xn @ Xn.T, -1.0, 1.0)
    D = 1.0 - S
    np.fill_diagonal(D, 0.0)
    return np.clip(D, 0.0, 2.0)


def _row_affinities(d_row: np.ndarray, beta: float) -> tuple[float, np.ndarray]:
    """Shannon entropy and conditional affinities for one distance row."""
    p = np.exp(-d_row * beta)
    s = p.sum()
    if s <= 0.0:
        return 0.0, np.zeros_like(p)
    h = np.log(s) + beta * float(d_row @ p) / s
    return float(h), p / s


def _joint_affinities(D: np.ndarray, perplexity: float, tol: float = 1e-5) -> np.ndarray:
    """Perplexity-calibrated symmetric affinity matrix from distances."""
    n = D.shape[0]
    target = np.log(perplexity)
    P = np.zeros((n, n))
    idx = np.arange(n)
    for i in range(n):
        d_row = D[i, idx != i]
        beta, beta_min, beta_max = 1.0, -np.inf, np.inf
        h, p = _row_affinities(d_row, beta)
        for _ in range(50):
            if abs(h - target) < tol:
                break
            if h > target:
                beta_min = beta
                beta = beta * 2.0 if beta_max == np.inf else (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = beta / 2.0 if beta_min == -np.inf else (beta + beta_min) / 2.0
            h, p = _row_affinities(d_row, beta)
        P[i, idx != i] = p
    P = (P + P.T) / (2.0 * n)
    return np.maximum(P, EPS)


def _kl_divergence(P: np.ndarray, Y: np.ndarray) -> float:
    Q, _ = _lowdim_affinities(Y)
    return float(np.sum(P * np.log(P / Q)))


def _lowdim_affinities(Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Student-t joint affinities Q and the unnormalized kernel."""
    sq = np.sum(Y**2, axis=1)
    num = 1.0 / (1.0 + (sq[:, None] + sq[None, :] - 2.0 * (Y @ Y.T)))
    np.fill_diagonal(num, 0.0)
    Q = np.maximum(num / num.sum(), EPS)
    return Q, num


def tsne_project(
    vectors: Mapping[str, np.ndarray],
    perplexity: float = 30.0,
    iterations: int = 1000,
    seed: int = 42,
    *,
    corpus_id: str = "",
) -> ProjectionFrame:
    """Project concept vectors to 2-D; deterministic for a fixed seed."""
    if perplexity <= 0:
        raise UsageError(f"perplexity must be positive, got {perplexity}")
    if iterations < 1:
        raise UsageError(f"iterations must be >= 1, got {iterations}")
    ids = sorted(vectors)
    n = len(ids)
    if n < 4:
        raise TooFewPointsError(f"projection needs at least 4 points, got {n}")
    X = np.asarray([vectors[c] for c in ids], dtype=np.float64)
    rng = np.random.default_rng(seed)

    limit = (n - 1) / 3.0
    effective_perplexity = perplexity
    if perplexity >= limit:
        effective_perplexity = limit
        warnings.warn(
            PerplexityClampedWarning(
                f"perplexity {perplexity} too large for {n} points; using {limit:.3f}"
            )
        )

    D = _cosine_distances(X)
    off_diag = D[~np.eye(n, dtype=bool)]
    if np.ptp(off_diag) < 1e-12:
        warnings.warn(
            DegenerateAffinitiesWarning(
                "all pairwise distances equal; falling back to a seeded random layout"
            )
        )
        Y = rng.standard_normal((n, 2))
        points = {c: (float(x), float(y)) for c, (x, y) in zip(ids, Y)}
        return ProjectionFrame(
            corpus_id=corpus_id,
            points=points,
            aligned=False,
            seed=seed,
            perplexity=effective_perplexity,
            kl_final=0.0,
            kl_after_exaggeration=0.0,
        )

    P = _joint_affinities(D, effective_perplexity)
    exag_iters = min(EXAGGERATION_ITERS, iterations)
    learning_rate = max(50.0, n / 12.0)

    Y = rng.standard_normal((n, 2)) * INIT_SIGMA
    velocity = np.zeros_like(Y)
    gains = np.ones_like(Y)
    kl_after_exaggeration = np.nan

    for it in range(iterations):
        exaggerating = it < exag_iters
        P_eff = P * EXAGGERATION_FACTOR if exaggerating else P
        Q, num = _lowdim_affinities(Y)
        # exact gradient: 4 * sum_j (p_ij - q_ij) * num_ij * (y_i - y_j)
        W = (P_eff - Q) * num
        grad = 4.0 * ((np.diag(W.sum(axis=1)) - W) @ Y)

        flip = np.sign(grad) != np.sign(velocity)
        gains = np.where(flip, gains + 0.2, gains * 0.8)
        np.maximum(gains, MIN_GAIN, out=gains)
        momentum = MOMENTUM_EARLY if exaggerating else MOMENTUM_LATE
        velocity = momentum * velocity - learning_rate * (gains * grad)
        Y = Y + velocity
        Y = Y - Y.mean(axis=0)

        if it == exag_iters - 1:
            kl_after_exaggeration = _kl_divergence(P, Y)

    kl_final = _kl_divergence(P, Y)
    if not np.isfinite(kl_after_exaggeration):
        kl_after_exaggeration = kl_final
    points = {c: (float(x), float(y)) for c, (x, y) in zip(ids, Y)}
    return ProjectionFrame(
        corpus_id=corpus_id,
        points=points,
        aligned=False,
        seed=seed,
        perplexity=effective_perplexity,
        kl_final=kl_final,
        kl_after_exaggeration=float(kl_after_exaggeration),
    )


def _frame_matrix(frame: ProjectionFrame, ids: Sequence[str]) -> np.ndarray:
    return np.asarray([frame.points[c] for c in ids], dtype=np.float64)


def _identity_transform(disparity: float) -> AlignmentTransform:
    return AlignmentTransform(
        rotation=np.eye(2),
        scale=1.0,
        translation=np.zeros(2),
        disparity_before=disparity,
        disparity_after=disparity,
    )


def procrustes_align(
    source: ProjectionFrame, target: ProjectionFrame
) -> tuple[AlignmentTransform, ProjectionFrame]:
    """Fit a similarity transform on shared concepts and apply it to all of source.

    With fewer than three shared concepts the transform degrades to identity
    with a warning. The fitted transform never has a larger residual on the
    shared concepts than the identity.
    """
    shared = sorted(set(source.points) & set(target.points))
    if len(shared) < 3:
        warnings.warn(
            InsufficientOverlapWarning(
                f"only {len(shared)} shared concepts between {source.corpus_id!r} "
                f"and {target.corpus_id!r}; using identity"
            )
        )
        disparity = 0.0
        if shared:
            disparity = float(
                np.linalg.norm(
                    _frame_matrix(source, shared) - _frame_matrix(target, shared)
                )
            )
        return _identity_transform(disparity), replace(source, aligned=True)

    X = _frame_matrix(source, shared)
    Y = _frame_matrix(target, shared)
    disparity_before = float(np.linalg.norm(X - Y))

    x_mean = X.mean(axis=0)
    y_mean = Y.mean(axis=0)
    Xc = X - x_mean
    Yc = Y - y_mean
    A = Xc.T @ Yc
    U, sigma, Vt = np.linalg.svd(A)
    R = U @ Vt
    x_var = float(np.sum(Xc**2))
    scale = float(sigma.sum() / x_var) if x_var > 0.0 else 0.0

    usable = scale > 0.0 and np.isfinite(scale) and np.isfinite(R).all()
    if usable:
        translation = y_mean - scale * (x_mean @ R)
        disparity_after = float(np.linalg.norm(scale * (X @ R) + translation - Y))
        if disparity_after > disparity_before:
            usable = False
    if not usable:
        transform = _identity_transform(disparity_before)
    else:
        transform = AlignmentTransform(
            rotation=R,
            scale=scale,
            translation=translation,
            disparity_before=disparity_before,
            disparity_after=disparity_after,
        )

    all_ids = list(source.points)
    moved = transform.scale * (_frame_matrix(source, all_ids) @ transform.rotation)
    moved = moved + transform.translation
    points = {c: (float(x), float(y)) for c, (x, y) in zip(all_ids, moved)}
    return transform, replace(source, points=points, aligned=True)


def align_chain(frames: Sequence[ProjectionFrame]) -> list[ProjectionFrame]:
    """Align each frame to its aligned predecessor; the first is the anchor."""
    if not frames:
        raise UsageError("align_chain needs at least one frame")
    aligned = [replace(frames[0], aligned=True)]
    for frame in frames[1:]:
        _, moved = procrustes_align(frame, aligned[-1])
        aligned.append(moved)
    return aligned
