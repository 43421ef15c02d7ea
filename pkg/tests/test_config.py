# -*- coding: utf-8 -*-

import json

import pytest

from affinity import TOY_BANDWIDTH_SCALE
from autoencoder import TOY_HIDDEN
from config import DatasetSpec, PipelineConfig, getenv_int, load_config_file, parse_architecture
from errors import ParameterError


def test_parse_architecture():
    assert parse_architecture("auto") == "auto"
    assert parse_architecture(" AUTO ") == "auto"
    assert parse_architecture("64-32-2-32-64") == TOY_HIDDEN
    assert parse_architecture([8, 4, 2, 4, 8]) == (8, 4, 2, 4, 8)
    with pytest.raises(ParameterError):
        parse_architecture("64-32-2")
    with pytest.raises(ParameterError):
        parse_architecture("a-b-c-d-e")


def test_validate_against_n():
    cfg = PipelineConfig(p=50)
    cfg.validate(n=50)
    with pytest.raises(ParameterError, match="exceeds"):
        cfg.validate(n=49)
    with pytest.raises(ParameterError):
        PipelineConfig(method="exact", oracle_cap=100).validate(n=101)
    # p 는 landmark 방법에만 적용
    PipelineConfig(method="kmeans_baseline", p=500).validate(n=100)


def test_validate_fields():
    with pytest.raises(ParameterError):
        PipelineConfig(method="lsc").validate()
    with pytest.raises(ParameterError):
        PipelineConfig(k=0).validate()
    with pytest.raises(ParameterError):
        PipelineConfig(input_scale="std").validate()
    with pytest.raises(ParameterError):
        DatasetSpec(kind="csv").validate()


def test_from_dict_overrides_only_given_keys():
    base = PipelineConfig(p=300, seed=4)
    cfg = PipelineConfig.from_dict({"k": 3, "dataset": {"n": 900}, "train": {"epochs": 2},
                                    "architecture": "auto"}, base=base)
    assert (cfg.p, cfg.k, cfg.seed) == (300, 3, 4)
    assert cfg.dataset.n == 900 and cfg.dataset.kind == "two_moons"
    assert cfg.train.epochs == 2 and cfg.train.batch_size == base.train.batch_size
    assert cfg.architecture == "auto"


def test_from_dict_rejects_unknown_keys():
    with pytest.raises(ParameterError, match="unknown"):
        PipelineConfig.from_dict({"landmark_count": 10})
    with pytest.raises(ParameterError):
        PipelineConfig.from_dict({"train": {"momentum": 0.9}})


def test_to_dict_mirrors_file_layout(tmp_path):
    cfg = PipelineConfig(p=77, architecture=(8, 4, 2, 4, 8))
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert load_config_file(path) == cfg


def test_load_config_file_errors(tmp_path):
    with pytest.raises(ParameterError):
        load_config_file(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParameterError):
        load_config_file(bad)


def test_env(monkeypatch):
    monkeypatch.setenv("SCAL_SEED", "17")
    monkeypatch.setenv("SCAL_OUT_DIR", "elsewhere")
    monkeypatch.setenv("SCAL_ORACLE_CAP", "123")
    cfg = PipelineConfig.from_env()
    assert (cfg.seed, cfg.out_dir, cfg.oracle_cap) == (17, "elsewhere", 123)

    monkeypatch.setenv("SCAL_SEED", "seventeen")
    with pytest.raises(ParameterError):
        getenv_int("SCAL_SEED", default=0)


def test_validate_rejects_non_integer_fields():
    # JSON 의 true 는 int 로도 통과하므로 따로 확인
    with pytest.raises(ParameterError, match="seed"):
        PipelineConfig.from_dict({"seed": True}).validate()
    with pytest.raises(ParameterError, match="p"):
        PipelineConfig.from_dict({"p": 12.5}).validate()
    with pytest.raises(ParameterError, match="dataset.n"):
        PipelineConfig.from_dict({"dataset": {"n": "400"}}).validate()
    with pytest.raises(ParameterError, match="train.epochs"):
        PipelineConfig.from_dict({"train": {"epochs": False}}).validate()


def test_bandwidth_scale_resolution():
    assert PipelineConfig().sigma_scale == TOY_BANDWIDTH_SCALE
    assert PipelineConfig(dataset=DatasetSpec(kind="csv", csv_path="x.csv")).sigma_scale == 1.0
    assert PipelineConfig(bandwidth_scale=0.3).sigma_scale == 0.3
    with pytest.raises(ParameterError):
        PipelineConfig(bandwidth_scale=0.0).validate()
    with pytest.raises(ParameterError):
        PipelineConfig(bandwidth_scale=True).validate()
