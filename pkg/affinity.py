#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
landmark x 데이터 affinity.

  W[i, j] = exp(-||l_i - x_j||^2 / sigma)            (p x n)
  sigma   = median{ ||l_i - x_j||^2 }
  ws      = W 의 row sum                              (p,)
  d       = W^T ws   (= M = W^T W 의 column sum, M 은 만들지 않음)
  S       = W D^(-1/2)   (column i 를 d_i^(-1/2) 로 스케일)

S^T S = D^(-1/2) W^T W D^(-1/2) 가 정규화 Laplacian(유사도 형태)이 된다.
"""

import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from data import Dataset
from errors import DataFormatError, DegenerateInputError, ParameterError
from landmarks import LandmarkSet

logger = logging.getLogger(__name__)

# 한 번에 처리할 column 수 (p x chunk 메모리)
COLUMN_CHUNK = 8192

# sigma = median * bandwidth_scale.
# 2D toy 데이터는 median 그대로면 모양 사이 유사도가 너무 커서 cluster 가 안 갈린다.
TOY_BANDWIDTH_SCALE = 0.05

MATRIX_MAGIC = b"LSPC"
_MATRIX_HEADER = struct.Struct("<4sIII")  # magic, rows, cols, reserved(0)


@dataclass(frozen=True)
class AffinityMatrix:
    w: np.ndarray
    sigma: float

    @property
    def shape(self) -> Tuple[int, int]:
        return self.w.shape


@dataclass(frozen=True)
class DegreeVector:
    d: np.ndarray
    ws: np.ndarray


@dataclass(frozen=True)
class ScaledMatrix:
    s: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return self.s.shape


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def landmark_sq_distances(dataset: Dataset, landmarks: LandmarkSet) -> np.ndarray:
    """
    p x n 제곱 유클리드 거리. O(npd)
    """
    lm = np.asarray(landmarks.points, dtype=np.float64)
    x = dataset.features
    if lm.ndim != 2 or lm.shape[1] != x.shape[1]:
        raise ParameterError(f"landmarks must be p x {x.shape[1]}, got {lm.shape}")

    out = np.empty((lm.shape[0], x.shape[0]))
    for start in range(0, x.shape[0], COLUMN_CHUNK):
        stop = min(start + COLUMN_CHUNK, x.shape[0])
        out[:, start:stop] = cdist(lm, x[start:stop], metric="sqeuclidean")
    return out


def median_bandwidth(dataset: Dataset, landmarks: LandmarkSet,
                     sq_dist: Optional[np.ndarray] = None, scale: float = 1.0) -> float:
    """
    p*n 개 제곱거리의 median (짝수 개면 가운데 두 값 평균) x scale.
    식 그대로 제곱거리를 쓴다. scale=1 이 기본 median.
    """
    if not (np.isfinite(scale) and scale > 0):
        raise ParameterError(f"bandwidth scale must be positive, got {scale}")
    if sq_dist is None:
        sq_dist = landmark_sq_distances(dataset, landmarks)
    median = float(np.median(sq_dist))
    if not median > 0:
        raise DegenerateInputError(
            f"median squared landmark distance is {median}; landmarks coincide with the data points"
        )
    return median * scale


def build_affinity(dataset: Dataset, landmarks: LandmarkSet, sigma: float,
                   sq_dist: Optional[np.ndarray] = None) -> AffinityMatrix:
    if not (np.isfinite(sigma) and sigma > 0):
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if sq_dist is None:
        sq_dist = landmark_sq_distances(dataset, landmarks)
    w = np.exp(-sq_dist / sigma)
    return AffinityMatrix(w=_frozen(w), sigma=float(sigma))


def degree_vector(w: AffinityMatrix) -> DegreeVector:
    """
    ws_k = sum_j W[k, j],  d_i = sum_k W[k, i] * ws_k.   O(np)
    """
    ws = w.w.sum(axis=1)
    d = w.w.T @ ws
    if not np.all(np.isfinite(d)) or np.any(d <= 0):
        bad = int(np.flatnonzero(~(np.isfinite(d) & (d > 0)))[0])
        raise DegenerateInputError(f"degree d[{bad}]={d[bad]} is not positive and finite")
    return DegreeVector(d=_frozen(d), ws=_frozen(ws))


def scaled_input(w: AffinityMatrix, deg: DegreeVector) -> ScaledMatrix:
    """
    s_i = d_i^(-1/2) w_i.   O(np)
    n >= 2 이면 S 는 [0, 1) 안에 있어야 한다 (d_i > ||w_i||^2). 벗어나면 에러.
    """
    d = np.asarray(deg.d)
    if d.shape != (w.w.shape[1],):
        raise ParameterError(f"degree length {d.shape} != n={w.w.shape[1]}")
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise DegenerateInputError("degree vector has nonpositive or non-finite entries")

    s = w.w / np.sqrt(d)[None, :]
    if s.shape[1] >= 2:
        top = float(s.max())
        if top >= 1.0 or float(s.min()) < 0.0:
            raise DegenerateInputError(f"S entries leave [0, 1): max={top}, min={float(s.min())}")
    return ScaledMatrix(s=_frozen(s))


# -----------------------
# 바이너리 dump (파이프라인 체크포인트)
#   16 byte header: "LSPC", u32 rows, u32 cols, u32 reserved
#   이후 float64 little-endian row-major
# -----------------------
def save_matrix(matrix: np.ndarray, path: Union[str, Path]) -> Path:
    a = np.ascontiguousarray(matrix, dtype="<f8")
    if a.ndim != 2:
        raise ParameterError(f"only 2-D matrices can be dumped, got shape {a.shape}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as f:
        f.write(_MATRIX_HEADER.pack(MATRIX_MAGIC, a.shape[0], a.shape[1], 0))
        f.write(a.tobytes(order="C"))
    logger.info("[SAVE] %s (%d x %d)", path, a.shape[0], a.shape[1])
    return path


def load_matrix(path: Union[str, Path]) -> np.ndarray:
    path = Path(path)
    buf = path.read_bytes()
    if len(buf) < _MATRIX_HEADER.size:
        raise DataFormatError(f"{path}: truncated header")
    magic, rows, cols, _ = _MATRIX_HEADER.unpack_from(buf)
    if magic != MATRIX_MAGIC:
        raise DataFormatError(f"{path}: bad magic {magic!r}, expected {MATRIX_MAGIC!r}")
    need = rows * cols * 8
    if len(buf) - _MATRIX_HEADER.size != need:
        raise DataFormatError(f"{path}: expected {need} data bytes, got {len(buf) - _MATRIX_HEADER.size}")
    return np.frombuffer(buf, dtype="<f8", offset=_MATRIX_HEADER.size).reshape(rows, cols).astype(np.float64)
