#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
작은 데이터용 exact spectral clustering (검증 기준선).

  W      = exp(-||x_i - x_j||^2 / sigma)   (n x n, 대각 1)
  L_norm = D^(-1/2) W D^(-1/2)
  top-k 고유벡터 (가장 큰 고유값) -> 행 단위 정규화 -> k-means

고유분해는 cyclic Jacobi. 한 sweep 안에서 서로 겹치지 않는 (p, q) 쌍들을
round-robin 순서로 묶어 한꺼번에 회전시킨다.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from config import oracle_cap
from data import Dataset
from errors import DegenerateInputError, NumericalError, OracleScaleError, ParameterError
from kmeans import ClusterAssignment, fit_kmeans

logger = logging.getLogger(__name__)

JACOBI_TOL = 1e-10
JACOBI_MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class SymmetricMatrix:
    a: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParameterError(f"symmetric matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ParameterError("symmetric matrix has non-finite entries")
        if a.size and np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
            raise ParameterError(f"matrix is not symmetric (max |a - a^T| = {np.max(np.abs(a - a.T)):.3g})")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True)
class EigenPairs:
    values: np.ndarray   # 내림차순
    vectors: np.ndarray  # n x r, column 이 고유벡터
    sweeps: int = 0


def full_affinity(dataset: Dataset, sigma: float, cap: Optional[int] = None) -> SymmetricMatrix:
    cap = oracle_cap() if cap is None else cap
    if dataset.n > cap:
        raise OracleScaleError(f"n={dataset.n} exceeds the oracle cap {cap}")
    if not (np.isfinite(sigma) and sigma > 0):
        raise ParameterError(f"sigma must be positive, got {sigma}")
    # pdist 는 i<j 만 계산 -> squareform 으로 대칭 복사
    w = squareform(np.exp(-pdist(dataset.features, metric="sqeuclidean") / sigma))
    np.fill_diagonal(w, 1.0)
    return SymmetricMatrix(a=w)


def pairwise_median_bandwidth(dataset: Dataset, scale: float = 1.0) -> float:
    if not (np.isfinite(scale) and scale > 0):
        raise ParameterError(f"bandwidth scale must be positive, got {scale}")
    if dataset.n < 2:
        raise DegenerateInputError("need at least 2 points for a pairwise bandwidth")
    median = float(np.median(pdist(dataset.features, metric="sqeuclidean")))
    if not median > 0:
        raise DegenerateInputError("median pairwise squared distance is 0")
    return median * scale


# -----------------------
# Jacobi
# -----------------------
def _round_robin(n: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    n 개 index 를 겹치지 않는 쌍으로 나눈 round 들 (circle method).
    모든 (p, q) 쌍이 sweep 당 정확히 한 번 나온다.
    """
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            arr = np.array(pairs)
            rounds.append((arr[:, 0], arr[:, 1]))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    # 전체 - 대각 으로 빼면 상쇄 오차가 1e-8 수준이라 직접 계산
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def symmetric_eigs(a, r: int, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenPairs:
    """
    top-r 고유쌍 (대수적으로 큰 순).
    off-diagonal Frobenius norm < tol * ||A||_F 까지 sweep.
    """
    mat = a if isinstance(a, SymmetricMatrix) else SymmetricMatrix(a=a)
    n = mat.n
    if not (1 <= r <= n):
        raise ParameterError(f"r must be in [1, n={n}], got {r}")

    work = mat.a.copy()
    v = np.eye(n)
    target = tol * float(np.linalg.norm(work))
    rounds = _round_robin(n)

    sweeps = 0
    while _off_norm(work) > target:
        if sweeps >= max_sweeps:
            raise NumericalError(f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {_off_norm(work):.3g})")
        sweeps += 1
        for p, q in rounds:
            apq = work[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]

            # apq 가 아주 작으면 theta = inf, t = 0 (회전 없이 0 으로)
            with np.errstate(over="ignore"):
                theta = (work[q, q] - work[p, p]) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            # A <- A J (column), A <- J^T A (row), V <- V J
            cols_p, cols_q = work[:, p].copy(), work[:, q].copy()
            work[:, p] = c * cols_p - s * cols_q
            work[:, q] = s * cols_p + c * cols_q
            rows_p, rows_q = work[p, :].copy(), work[q, :].copy()
            work[p, :] = c[:, None] * rows_p - s[:, None] * rows_q
            work[q, :] = s[:, None] * rows_p + c[:, None] * rows_q
            work[p, q] = 0.0
            work[q, p] = 0.0

            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq

    values = np.diag(work).copy()
    order = np.argsort(-values, kind="stable")[:r]
    logger.debug("[EIG] n=%d converged in %d sweeps", n, sweeps)
    return EigenPairs(values=values[order], vectors=v[:, order].copy(), sweeps=sweeps)


# -----------------------
# exact spectral clustering
# -----------------------
def spectral_cluster_exact(dataset: Dataset, k: int, sigma: Optional[float] = None, seed: int = 0,
                           restarts: int = 10, cap: Optional[int] = None,
                           bandwidth_scale: float = 1.0) -> ClusterAssignment:
    """
    sigma 가 없으면 pairwise 제곱거리 median x bandwidth_scale.
    """
    if not (1 <= k <= dataset.n):
        raise ParameterError(f"k must be in [1, n={dataset.n}], got {k}")
    if sigma is None:
        sigma = pairwise_median_bandwidth(dataset, scale=bandwidth_scale)

    w = full_affinity(dataset, sigma, cap=cap).a
    deg = w.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(deg)
    lap = inv_sqrt[:, None] * w * inv_sqrt[None, :]
    lap = 0.5 * (lap + lap.T)

    eig = symmetric_eigs(SymmetricMatrix(a=lap), k)
    u = eig.vectors
    norms = np.linalg.norm(u, axis=1)
    if np.any(norms == 0):
        raise DegenerateInputError(f"{int(np.sum(norms == 0))} rows of the spectral embedding have zero norm")
    u = u / norms[:, None]

    logger.info("[ORACLE] n=%d k=%d sigma=%.6g top eigenvalues=%s", dataset.n, k, sigma, np.round(eig.values, 6))
    return fit_kmeans(u, k, seed=seed, restarts=restarts)
