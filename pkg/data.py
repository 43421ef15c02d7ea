#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
데이터셋 생성 / 로딩.

- 2D toy 데이터: two_moons, two_circles, moon_circle, concentric_rings
- CSV (label 컬럼 선택), IDX(MNIST) 로더
- min-max 정규화
"""

import gzip
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Mapping, Optional, Union

import numpy as np
import pandas as pd

from errors import DataFormatError, ParameterError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801

# -----------------------
# toy 모양 상수
#  - moon: 반지름 1, 아래 moon은 위 moon을 π 회전 후 (1, 0.5) 이동 (서로 맞물린 형태)
#  - circles: 반지름 1, 2
#  - moon_circle: 반지름 2 원 안쪽에 반지름 1 moon (중심 (0, -0.5))
#  - rings: 반지름 1, 2, 3, ...
# -----------------------
MOON_RADIUS = 1.0
LOWER_MOON_CENTER = (1.0, 0.5)
CIRCLE_RADII = (1.0, 2.0)
MOON_CIRCLE_RADIUS = 2.0
MOON_CIRCLE_MOON_CENTER = (0.0, -0.5)
DEFAULT_RINGS = 3

SHAPES = ("two_moons", "two_circles", "moon_circle", "concentric_rings")


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: Optional[np.ndarray] = None
    name: str = "dataset"
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        x = np.array(self.features, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise ParameterError(f"features must be an n x d matrix with n, d >= 1, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            bad = int(np.argwhere(~np.isfinite(x))[0, 0])
            raise ParameterError(f"features row {bad} has non-finite entries")
        x.setflags(write=False)
        object.__setattr__(self, "features", x)

        if self.labels is not None:
            y = np.array(self.labels, dtype=np.int64)
            if y.shape != (x.shape[0],):
                raise ParameterError(f"labels length {y.shape} != n={x.shape[0]}")
            if y.size and y.min() < 0:
                raise ParameterError("label ids must be >= 0")
            y.setflags(write=False)
            object.__setattr__(self, "labels", y)

        object.__setattr__(self, "params", dict(self.params))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return 0 if self.labels is None else int(self.labels.max()) + 1


# -----------------------
# 1) toy 데이터 생성
# -----------------------
def _split_sizes(n: int, parts: int) -> List[int]:
    # 앞 component부터 나머지 1개씩
    return [n // parts + (1 if i < n % parts else 0) for i in range(parts)]


def _arc(rng, size, start, stop, radius, center):
    theta = rng.uniform(start, stop, size)
    pts = np.column_stack([np.cos(theta), np.sin(theta)]) * radius
    return pts + np.asarray(center, dtype=np.float64)


def generate_synthetic(shape: str, n: int, noise: float = 0.0, seed: int = 0,
                       rings: int = DEFAULT_RINGS) -> Dataset:
    if shape not in SHAPES:
        raise ParameterError(f"unknown shape {shape!r} (choose from {SHAPES})")
    if noise < 0 or not np.isfinite(noise):
        raise ParameterError(f"noise must be a nonnegative std, got {noise}")

    n_comp = rings if shape == "concentric_rings" else 2
    if n_comp < 1:
        raise ParameterError(f"rings must be >= 1, got {rings}")
    if n < n_comp:
        raise ParameterError(f"n={n} is smaller than the {n_comp} clusters of {shape}")

    rng = np.random.default_rng(seed)
    sizes = _split_sizes(n, n_comp)
    params = {"shape": shape, "noise": float(noise), "seed": int(seed)}

    if shape == "two_moons":
        upper = _arc(rng, sizes[0], 0.0, np.pi, MOON_RADIUS, (0.0, 0.0))
        lower = _arc(rng, sizes[1], np.pi, 2 * np.pi, MOON_RADIUS, LOWER_MOON_CENTER)
        parts = [upper, lower]
        params.update(radii=[MOON_RADIUS, MOON_RADIUS], centers=[(0.0, 0.0), LOWER_MOON_CENTER])
    elif shape == "two_circles":
        parts = [_arc(rng, s, 0.0, 2 * np.pi, r, (0.0, 0.0)) for s, r in zip(sizes, CIRCLE_RADII)]
        params.update(radii=list(CIRCLE_RADII), centers=[(0.0, 0.0)] * 2)
    elif shape == "moon_circle":
        moon = _arc(rng, sizes[0], 0.0, np.pi, MOON_RADIUS, MOON_CIRCLE_MOON_CENTER)
        circle = _arc(rng, sizes[1], 0.0, 2 * np.pi, MOON_CIRCLE_RADIUS, (0.0, 0.0))
        parts = [moon, circle]
        params.update(radii=[MOON_RADIUS, MOON_CIRCLE_RADIUS], centers=[MOON_CIRCLE_MOON_CENTER, (0.0, 0.0)])
    else:
        radii = [float(r) for r in range(1, rings + 1)]
        parts = [_arc(rng, s, 0.0, 2 * np.pi, r, (0.0, 0.0)) for s, r in zip(sizes, radii)]
        params.update(radii=radii, centers=[(0.0, 0.0)] * rings)

    x = np.vstack(parts)
    if noise > 0:
        x = x + rng.normal(0.0, noise, size=x.shape)
    y = np.concatenate([np.full(s, i, dtype=np.int64) for i, s in enumerate(sizes)])

    return Dataset(features=x, labels=y, name=shape, params=params)


# -----------------------
# 2) CSV
# -----------------------
def _to_float(cell: str) -> float:
    try:
        return float(cell)
    except (TypeError, ValueError):
        return np.nan


def _is_number(cell: str) -> bool:
    return bool(np.isfinite(_to_float(cell)))


def load_csv(path: PathLike, label_column: Optional[int] = None) -> Dataset:
    """
    콤마 구분, 소수점 '.'.
    첫 행에 숫자가 하나도 없으면 header 로 보고 건너뛴다.
    label 은 등장 순서대로 0..L-1 로 매핑.
    """
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"CSV file not found: {path}")

    try:
        raw = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise DataFormatError(f"{path}: file is empty")
    except pd.errors.ParserError as ex:
        raise DataFormatError(f"{path}: ragged rows ({ex})")

    first_line = 1
    if len(raw) and not any(_is_number(c) for c in raw.iloc[0]):
        raw = raw.iloc[1:].reset_index(drop=True)
        first_line = 2
    if raw.empty:
        raise DataFormatError(f"{path}: no data rows")

    # 짧은 행은 pandas가 NaN 으로 채운다
    short = raw.isna().any(axis=1)
    if short.any():
        row = int(np.flatnonzero(short.to_numpy())[0])
        raise DataFormatError(f"{path}: ragged rows, line {row + first_line} has fewer than {raw.shape[1]} cells")

    width = raw.shape[1]
    if label_column is not None and not (0 <= label_column < width):
        raise ParameterError(f"label_column={label_column} out of range for {width} columns")

    feature_cols = [c for c in range(width) if c != label_column]
    if not feature_cols:
        raise DataFormatError(f"{path}: no feature columns besides the label column")

    # %.17g 로 쓴 값이 bit 그대로 돌아와야 한다 (float() 는 정확히 반올림)
    feats = raw[feature_cols].apply(lambda s: s.str.strip().map(_to_float))
    arr = feats.to_numpy(dtype=np.float64)
    bad = ~np.isfinite(arr)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        col = feature_cols[c]
        raise DataFormatError(
            f"{path}: line {r + first_line} column {col} is not a finite number: {raw.iat[r, col]!r}"
        )

    labels = None
    if label_column is not None:
        codes, _ = pd.factorize(raw[label_column].str.strip(), sort=False)
        labels = codes.astype(np.int64)

    logger.info("[LOAD] %s n=%d d=%d labels=%s", path, arr.shape[0], arr.shape[1], labels is not None)
    return Dataset(features=arr, labels=labels, name=path.stem)


def write_csv(dataset: Dataset, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    df = pd.DataFrame(dataset.features, columns=[f"f{j}" for j in range(dataset.d)])
    if dataset.labels is not None:
        df["label"] = dataset.labels
    df.to_csv(path, index=False, float_format="%.17g")
    logger.info("[SAVE] %s", path)
    return path


# -----------------------
# 3) IDX (MNIST)
#    [offset] [type]          [value]
#    0000     32 bit integer  0x00000803 / 0x00000801  magic (big-endian)
#    0004     32 bit integer  count
#    0008     32 bit integer  rows      (images only)
#    0012     32 bit integer  cols      (images only)
#    ....     unsigned byte   pixel / label
# -----------------------
def _read_bytes(path: Path) -> bytes:
    if not path.exists():
        raise DataFormatError(f"IDX file not found: {path}")
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as f:
        return f.read()


def _idx_header(buf: bytes, path: Path, magic: int, dims: int) -> List[int]:
    need = 4 * (1 + dims)
    if len(buf) < need:
        raise DataFormatError(f"{path}: truncated header ({len(buf)} bytes)")
    header = np.frombuffer(buf[:need], dtype=">u4").astype(np.int64)
    if header[0] != magic:
        raise DataFormatError(f"{path}: bad magic 0x{int(header[0]):08x}, expected 0x{magic:08x}")
    return [int(v) for v in header[1:]]


def load_idx(images_path: PathLike, labels_path: PathLike) -> Dataset:
    images_path, labels_path = Path(images_path), Path(labels_path)

    ibuf = _read_bytes(images_path)
    count, rows, cols = _idx_header(ibuf, images_path, IDX_IMAGES_MAGIC, 3)
    body = np.frombuffer(ibuf, dtype=np.uint8, offset=16)
    if body.size < count * rows * cols:
        raise DataFormatError(f"{images_path}: truncated, {body.size} pixels for {count}x{rows}x{cols}")

    lbuf = _read_bytes(labels_path)
    (lcount,) = _idx_header(lbuf, labels_path, IDX_LABELS_MAGIC, 1)
    labels = np.frombuffer(lbuf, dtype=np.uint8, offset=8)
    if labels.size < lcount:
        raise DataFormatError(f"{labels_path}: truncated, {labels.size} labels for count {lcount}")

    if lcount != count:
        raise DataFormatError(f"count mismatch: {count} images vs {lcount} labels")

    x = body[: count * rows * cols].reshape(count, rows * cols).astype(np.float64) / 255.0
    logger.info("[LOAD] %s n=%d d=%d", images_path, count, rows * cols)
    return Dataset(features=x, labels=labels[:lcount].astype(np.int64), name=images_path.name.split(".")[0])


# -----------------------
# 4) 정규화
# -----------------------
def min_max_scale(dataset: Dataset) -> Dataset:
    """
    컬럼별 [0,1] 로. 상수 컬럼은 0.
    """
    x = dataset.features
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    safe = np.where(span > 0, span, 1.0)
    scaled = np.where(span > 0, (x - lo) / safe, 0.0)
    # 부동소수 오차로 1 을 살짝 넘는 경우 방지
    scaled = np.clip(scaled, 0.0, 1.0)
    return Dataset(features=scaled, labels=dataset.labels, name=dataset.name, params=dataset.params)


def load_dataset(spec, seed: int = 0) -> Dataset:
    """
    config.DatasetSpec -> Dataset
    """
    spec.validate()
    if spec.is_synthetic:
        data_seed = seed if spec.seed is None else spec.seed
        return generate_synthetic(spec.kind, spec.n, spec.noise, data_seed, rings=spec.rings)

    if spec.kind == "csv":
        ds = load_csv(spec.csv_path, spec.label_column)
    else:
        ds = load_idx(spec.idx_images, spec.idx_labels)
    return min_max_scale(ds) if spec.scale else ds
