#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
k-means++ 초기화 + Lloyd 반복.

landmark 선택(scal_k), latent space clustering, k-means baseline 에 공통으로 쓴다.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from errors import ParameterError

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 300
DEFAULT_TOL = 1e-6
DEFAULT_RESTARTS = 10


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray
    centroids: np.ndarray
    objective: float
    iterations: int
    objective_history: Tuple[float, ...] = field(default=())

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def _as_points(points) -> np.ndarray:
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 1:
        raise ParameterError(f"points must be an n x m matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ParameterError("points contain non-finite values")
    return x


def _sq_dist(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    # (n, k) 제곱거리, 음수 오차 없음
    return cdist(x, c, metric="sqeuclidean")


def kmeanspp_init(points, k: int, seed: int = 0) -> np.ndarray:
    """
    첫 중심은 균등 추출, 이후는 가장 가까운 중심까지의 제곱거리에 비례해서 뽑는다.
    남은 점이 모두 기존 중심과 겹치면 아직 안 뽑힌 점 중 균등 추출.
    """
    x = _as_points(points)
    n = x.shape[0]
    if not (1 <= k <= n):
        raise ParameterError(f"k must be in [1, n={n}], got {k}")

    rng = np.random.default_rng(seed)
    chosen = [int(rng.integers(n))]
    d2 = _sq_dist(x, x[chosen[0]][None, :])[:, 0]

    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            rest = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(rest))
        chosen.append(idx)
        d2 = np.minimum(d2, _sq_dist(x, x[idx][None, :])[:, 0])

    return x[chosen].copy()


def assign(points: np.ndarray, centroids: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    가장 가까운 중심 (동률이면 index 작은 쪽; np.argmin 이 첫 번째를 돌려줌)
    returns: (labels, 각 점의 제곱거리)
    """
    d2 = _sq_dist(points, centroids)
    labels = np.argmin(d2, axis=1)
    return labels, d2[np.arange(points.shape[0]), labels]


def _update(points, labels, dist, k):
    m = points.shape[1]
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros((k, m))
    np.add.at(sums, labels, points)

    centroids = np.empty((k, m))
    nonempty = counts > 0
    centroids[nonempty] = sums[nonempty] / counts[nonempty, None]

    # 빈 cluster -> 자기 중심에서 가장 먼 점으로 다시 seed
    dist = dist.copy()
    for j in np.flatnonzero(~nonempty):
        far = int(np.argmax(dist))
        centroids[j] = points[far]
        dist[far] = -1.0
        logger.debug("[KMEANS] empty cluster %d reseeded at point %d", j, far)
    return centroids


def lloyd(points, k: int, init, max_iter: int = DEFAULT_MAX_ITER, tol: float = DEFAULT_TOL) -> ClusterAssignment:
    x = _as_points(points)
    n, m = x.shape
    centroids = np.array(init, dtype=np.float64)
    if not (1 <= k <= n):
        raise ParameterError(f"k must be in [1, n={n}], got {k}")
    if centroids.shape != (k, m):
        raise ParameterError(f"init must be {k} x {m}, got {centroids.shape}")
    if not np.all(np.isfinite(centroids)):
        raise ParameterError("init centroids contain non-finite values")
    if max_iter < 1 or tol < 0:
        raise ParameterError(f"need max_iter >= 1 and tol >= 0, got {max_iter}, {tol}")

    history = []
    prev = None
    for iteration in range(1, max_iter + 1):
        labels, dist = assign(x, centroids)
        objective = float(dist.sum())
        history.append(objective)

        converged = prev is not None and (prev - objective) <= tol * prev
        if converged or objective == 0.0 or iteration == max_iter:
            break

        centroids = _update(x, labels, dist, k)
        prev = objective

    return ClusterAssignment(
        labels=labels,
        centroids=centroids,
        objective=objective,
        iterations=iteration,
        objective_history=tuple(history),
    )


def fit_kmeans(points, k: int, seed: int = 0, restarts: int = DEFAULT_RESTARTS,
               max_iter: int = DEFAULT_MAX_ITER, tol: float = DEFAULT_TOL) -> ClusterAssignment:
    """
    k-means++ + Lloyd 를 restarts 번 (seed, seed+1, ...) 돌려서 objective 가장 낮은 것.
    """
    if restarts < 1:
        raise ParameterError(f"restarts must be >= 1, got {restarts}")
    x = _as_points(points)

    best: Optional[ClusterAssignment] = None
    for r in range(restarts):
        init = kmeanspp_init(x, k, seed + r)
        result = lloyd(x, k, init, max_iter=max_iter, tol=tol)
        if best is None or result.objective < best.objective:
            best = result
    logger.debug("[KMEANS] k=%d best objective=%.6g over %d restarts", k, best.objective, restarts)
    return best
