#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os
import json
import logging
import math
from dataclasses import dataclass, field, asdict, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from dotenv import load_dotenv

from affinity import TOY_BANDWIDTH_SCALE
from autoencoder import TrainConfig, TOY_HIDDEN
from errors import ParameterError

# -----------------------
# 0) .env 자동 로드
# -----------------------
load_dotenv()  # 현재 디렉토리의 .env 자동 로드

METHODS = ("scal_r", "scal_k", "kmeans_baseline", "exact")
DATASET_KINDS = ("two_moons", "two_circles", "moon_circle", "concentric_rings", "csv", "idx")
INPUT_SCALES = ("max", "none")


# -----------------------
# 1) ENV 헬퍼
# -----------------------
def getenv_any(*keys, default=None):
    for k in keys:
        v = os.getenv(k)
        if v is not None and str(v).strip() != "":
            return v
    return default


def getenv_int(*keys, default: int) -> int:
    v = getenv_any(*keys)
    if v is None:
        return default
    try:
        return int(v)
    except ValueError:
        raise ParameterError(f"env {keys[0]} must be an integer, got {v!r}")


def oracle_cap() -> int:
    return getenv_int("SCAL_ORACLE_CAP", default=3000)


def setup_logging(level: Optional[str] = None) -> None:
    level = (level or getenv_any("SCAL_LOG_LEVEL", default="INFO")).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s %(levelname)-5s %(name)s %(message)s",
        datefmt="%H:%M:%S",
    )


def _check_int(name: str, value) -> None:
    # JSON 의 true/false 도 int 로 통과하므로 bool 은 따로 막는다
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ParameterError(f"{name} must be an integer, got {value!r}")


# -----------------------
# 2) 설정 dataclass
# -----------------------
@dataclass(frozen=True)
class DatasetSpec:
    kind: str = "two_moons"
    n: int = 4000
    noise: float = 0.05
    rings: int = 3
    csv_path: Optional[str] = None
    label_column: Optional[int] = None
    idx_images: Optional[str] = None
    idx_labels: Optional[str] = None
    scale: bool = True  # 파일 데이터만 min-max
    seed: Optional[int] = None  # None 이면 파이프라인 seed

    def validate(self) -> None:
        _check_int("dataset.n", self.n)
        _check_int("dataset.rings", self.rings)
        if self.seed is not None:
            _check_int("dataset.seed", self.seed)
        if self.kind not in DATASET_KINDS:
            raise ParameterError(f"unknown dataset kind {self.kind!r} (choose from {DATASET_KINDS})")
        if self.kind == "csv" and not self.csv_path:
            raise ParameterError("dataset kind 'csv' needs csv_path")
        if self.kind == "idx" and not (self.idx_images and self.idx_labels):
            raise ParameterError("dataset kind 'idx' needs idx_images and idx_labels")

    @property
    def is_synthetic(self) -> bool:
        return self.kind not in ("csv", "idx")


@dataclass(frozen=True)
class PipelineConfig:
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    method: str = "scal_r"
    p: int = 200
    k: int = 2
    architecture: Union[str, Tuple[int, ...]] = TOY_HIDDEN
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0
    out_dir: str = "out"
    input_scale: str = "max"
    bandwidth_scale: Optional[float] = None  # None: toy 데이터 0.05, 파일 데이터 1.0
    landmark_max_iter: int = 100
    kmeans_restarts: int = 10
    oracle_cap: int = 3000
    save_model: bool = False
    dump_matrices: bool = False
    plot: bool = False

    @property
    def sigma_scale(self) -> float:
        if self.bandwidth_scale is not None:
            return float(self.bandwidth_scale)
        return TOY_BANDWIDTH_SCALE if self.dataset.is_synthetic else 1.0

    def validate(self, n: Optional[int] = None) -> None:
        self.dataset.validate()
        for name in ("p", "k", "seed", "landmark_max_iter", "kmeans_restarts", "oracle_cap"):
            _check_int(name, getattr(self, name))
        for name in ("batch_size", "epochs", "seed"):
            _check_int(f"train.{name}", getattr(self.train, name))
        if self.bandwidth_scale is not None:
            if isinstance(self.bandwidth_scale, bool) or not isinstance(self.bandwidth_scale, (int, float)):
                raise ParameterError(f"bandwidth_scale must be a number, got {self.bandwidth_scale!r}")
            if not (math.isfinite(self.bandwidth_scale) and self.bandwidth_scale > 0):
                raise ParameterError(f"bandwidth_scale must be positive, got {self.bandwidth_scale}")
        if self.method not in METHODS:
            raise ParameterError(f"unknown method {self.method!r} (choose from {METHODS})")
        if self.p < 1:
            raise ParameterError(f"p must be >= 1, got {self.p}")
        if self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        if self.input_scale not in INPUT_SCALES:
            raise ParameterError(f"input_scale must be one of {INPUT_SCALES}, got {self.input_scale!r}")
        if self.architecture != "auto":
            if len(self.architecture) != 5 or any(int(h) < 1 for h in self.architecture):
                raise ParameterError(f"architecture needs 5 positive hidden sizes, got {self.architecture}")
        self.train.validate()
        if n is not None:
            if self.method in ("scal_r", "scal_k") and self.p > n:
                raise ParameterError(f"p={self.p} exceeds n={n}")
            if self.k > n:
                raise ParameterError(f"k={self.k} exceeds n={n}")
            if self.method == "exact" and n > self.oracle_cap:
                raise ParameterError(f"method=exact needs n <= {self.oracle_cap}, got n={n}")

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        if self.architecture != "auto":
            d["architecture"] = list(self.architecture)
        return d

    @classmethod
    def from_env(cls) -> "PipelineConfig":
        return cls(
            seed=getenv_int("SCAL_SEED", default=0),
            out_dir=getenv_any("SCAL_OUT_DIR", default="out"),
            oracle_cap=oracle_cap(),
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base: Optional["PipelineConfig"] = None) -> "PipelineConfig":
        """
        JSON 파일 구조 그대로 받는다. base 가 있으면 주어진 키만 덮어쓴다.
        """
        base = base or cls()
        data = dict(data)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")

        ds = data.pop("dataset", None) or {}
        tr = data.pop("train", None) or {}
        arch = data.pop("architecture", None)

        try:
            dataset = replace(base.dataset, **ds)
            train = replace(base.train, **tr)
        except TypeError as ex:
            raise ParameterError(f"bad config section: {ex}")

        cfg = replace(base, dataset=dataset, train=train, **data)
        if arch is not None:
            cfg = replace(cfg, architecture=parse_architecture(arch))
        return cfg


def parse_architecture(value) -> Union[str, Tuple[int, ...]]:
    """
    "auto" | "64-32-2-32-64" | [64, 32, 2, 32, 64]
    """
    if isinstance(value, str):
        if value.strip().lower() == "auto":
            return "auto"
        parts = [x for x in value.replace(",", "-").split("-") if x.strip()]
    else:
        parts = list(value)
    try:
        sizes = tuple(int(x) for x in parts)
    except (TypeError, ValueError):
        raise ParameterError(f"cannot parse architecture {value!r}")
    if len(sizes) != 5:
        raise ParameterError(f"architecture needs 5 hidden sizes, got {value!r}")
    return sizes


def load_config_file(path: Union[str, Path], base: Optional[PipelineConfig] = None) -> PipelineConfig:
    path = Path(path)
    if not path.exists():
        raise ParameterError(f"config file not found: {path}")
    with path.open("r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as ex:
            raise ParameterError(f"config file {path} is not valid JSON: {ex}")
    return PipelineConfig.from_dict(data, base=base)
