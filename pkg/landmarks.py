#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
landmark p개 선택.
- random : 데이터 행에서 비복원 균등 추출 (scal_r)
- kmeans : k-means 중심 p개 (scal_k)
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from data import Dataset
from errors import ParameterError
from kmeans import kmeanspp_init, lloyd

logger = logging.getLogger(__name__)

KMEANS_SUBSAMPLE = 20000
LANDMARK_MAX_ITER = 100
LANDMARK_TOL = 1e-4


@dataclass(frozen=True)
class LandmarkSet:
    points: np.ndarray
    method: str
    seed: int
    # random: 뽑힌 행 / kmeans: k-means 를 돌린 subsample 행
    indices: Optional[np.ndarray] = None

    @property
    def p(self) -> int:
        return self.points.shape[0]


def _check_p(dataset: Dataset, p: int) -> None:
    if not (1 <= p <= dataset.n):
        raise ParameterError(f"p must be in [1, n={dataset.n}], got {p}")


def select_random(dataset: Dataset, p: int, seed: int = 0) -> LandmarkSet:
    _check_p(dataset, p)
    rng = np.random.default_rng(seed)
    idx = rng.choice(dataset.n, size=p, replace=False)
    return LandmarkSet(points=dataset.features[idx].copy(), method="random", seed=seed, indices=idx)


def select_kmeans(dataset: Dataset, p: int, seed: int = 0, max_iter: int = LANDMARK_MAX_ITER,
                  subsample: int = KMEANS_SUBSAMPLE) -> LandmarkSet:
    """
    n 이 크면 min(n, subsample) 개만 뽑아서 k-means.
    """
    _check_p(dataset, p)
    rng = np.random.default_rng(seed)

    if dataset.n > subsample and p <= subsample:
        idx = np.sort(rng.choice(dataset.n, size=subsample, replace=False))
    else:
        idx = np.arange(dataset.n)
    x = dataset.features[idx]

    init = kmeanspp_init(x, p, seed)
    result = lloyd(x, p, init, max_iter=max_iter, tol=LANDMARK_TOL)
    logger.info("[LANDMARK] kmeans p=%d on %d points, %d iterations, objective=%.6g",
                p, x.shape[0], result.iterations, result.objective)
    return LandmarkSet(points=result.centroids, method="kmeans", seed=seed, indices=idx)


def select_landmarks(dataset: Dataset, p: int, method: str, seed: int = 0,
                     max_iter: int = LANDMARK_MAX_ITER) -> LandmarkSet:
    if method == "random":
        return select_random(dataset, p, seed)
    if method == "kmeans":
        return select_kmeans(dataset, p, seed, max_iter=max_iter)
    raise ParameterError(f"unknown landmark method {method!r}")
