# -*- coding: utf-8 -*-

import numpy as np
import pytest

from autoencoder import TrainConfig
from config import DatasetSpec, PipelineConfig
from data import Dataset, generate_synthetic


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def moons() -> Dataset:
    return generate_synthetic("two_moons", 300, noise=0.05, seed=0)


@pytest.fixture
def blobs() -> Dataset:
    # 멀리 떨어진 3개 덩어리
    r = np.random.default_rng(7)
    centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    x = np.vstack([c + r.normal(0.0, 0.3, size=(40, 2)) for c in centers])
    y = np.repeat(np.arange(3), 40)
    return Dataset(features=x, labels=y, name="blobs")


@pytest.fixture
def small_config(tmp_path) -> PipelineConfig:
    return PipelineConfig(
        dataset=DatasetSpec(kind="two_moons", n=300, noise=0.05),
        method="scal_r",
        p=40,
        k=2,
        train=TrainConfig(batch_size=64, epochs=3),
        out_dir=str(tmp_path / "run"),
        kmeans_restarts=3,
    )
