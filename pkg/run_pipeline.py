#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
landmark 기반 spectral clustering + autoencoder 파이프라인.

  landmarks -> W (p x n) -> degree -> S -> autoencoder 학습 -> bottleneck 인코딩 -> k-means

단일 실행:
  python run_pipeline.py --dataset two_moons --n 4000 --landmarks 200 --clusters 2
p sweep:
  python run_pipeline.py --dataset two_moons --sweep 100,200,500,1000 --repeats 3

출력 (out_dir):
  labels.csv   point_index,cluster
  metrics.json purity / nmi / stage 별 wall time
  points.csv   x,y,label,cluster (2차원 데이터만)
  sweep.csv    sweep 결과 (p, repeat, purity, stage time, *_norm)
"""

import argparse
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from affinity import (build_affinity, degree_vector, landmark_sq_distances, median_bandwidth,
                      save_matrix, scaled_input)
from autoencoder import auto_architecture, encode, init_network, layer_sizes_for, save_checkpoint, train
from config import PipelineConfig, load_config_file, parse_architecture, setup_logging
from data import Dataset, load_dataset
from errors import DataFormatError, ParameterError, ScalError, StageError
from kmeans import fit_kmeans
from landmarks import select_landmarks
from metrics import nmi, purity
from oracle import pairwise_median_bandwidth, spectral_cluster_exact

logger = logging.getLogger(__name__)

STAGES = ("load", "landmarks", "affinity", "degree", "scaled", "train", "encode", "cluster")
REQUIRED_TIMES = ("landmarks", "affinity", "train", "cluster")
NORM_STAGES = ("landmarks", "affinity", "train", "cluster", "total")
DEFAULT_SWEEP = (100, 200, 500, 1000)
# input_scale=max: S 최대값을 이 값으로. sigmoid 출력은 1 에 닿지 못한다
INPUT_SCALE_TARGET = 0.99

LANDMARK_METHOD = {"scal_r": "random", "scal_k": "kmeans"}
METHOD_ALIASES = {"kmeans": "kmeans_baseline"}
DATASET_ALIASES = {"rings": "concentric_rings"}

_NULLABLE_INT = (int, type(None))
_NULLABLE_FLOAT = (float, type(None))
REPORT_SCHEMA: Dict[str, Tuple[type, ...]] = {
    "dataset": (str,),
    "method": (str,),
    "p": _NULLABLE_INT,
    "k": (int,),
    "seed": (int,),
    "purity": _NULLABLE_FLOAT,
    "nmi": _NULLABLE_FLOAT,
    "wall_times": (dict,),
    "n": (int,),
    "d": (int,),
    "sigma": _NULLABLE_FLOAT,
    "architecture": (list, type(None)),
    "loss_history": (list,),
    "objective": (float,),
}


@dataclass
class RunReport:
    dataset: str
    method: str
    p: Optional[int]
    k: int
    seed: int
    purity: Optional[float]
    nmi: Optional[float]
    wall_times: Dict[str, Optional[float]]
    n: int
    d: int
    sigma: Optional[float]
    architecture: Optional[List[int]]
    loss_history: List[float]
    objective: float
    labels: np.ndarray = field(repr=False)
    out_dir: Optional[Path] = None
    files: List[Path] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        # metrics.json 에 들어가는 필드만
        return {key: getattr(self, key) for key in REPORT_SCHEMA}


def validate_report(doc: Dict[str, Any]) -> None:
    """
    metrics.json 스키마 검사. 필드 누락 / 타입 불일치면 DataFormatError.
    """
    missing = [key for key in REPORT_SCHEMA if key not in doc]
    if missing:
        raise DataFormatError(f"report is missing fields {missing}")
    for key, types in REPORT_SCHEMA.items():
        value = doc[key]
        if isinstance(value, bool) or not isinstance(value, types):
            raise DataFormatError(f"report field {key!r} has type {type(value).__name__}")

    times = doc["wall_times"]
    for key in REQUIRED_TIMES + ("total",):
        if key not in times:
            raise DataFormatError(f"wall_times is missing {key!r}")
    for key, value in times.items():
        if value is not None and (isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0):
            raise DataFormatError(f"wall_times[{key!r}] must be a nonnegative number or null, got {value!r}")
    if not all(isinstance(x, (int, float)) for x in doc["loss_history"]):
        raise DataFormatError("loss_history must be a list of numbers")


@contextmanager
def _stage(name: str, times: Dict[str, Optional[float]]):
    t0 = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except Exception as ex:
        raise StageError(name, ex) from ex
    finally:
        times[name] = time.perf_counter() - t0
    logger.info("[STAGE] %-9s %.3fs", name, times[name])


def _write_outputs(report: RunReport, dataset: Dataset, out_dir: Path, written: List[Path]) -> None:
    """
    labels.csv / points.csv / metrics.json. 쓴 파일은 바로 written 에 넣는다 (실패 시 정리용).
    """
    doc = report.to_dict()
    validate_report(doc)

    labels_path = out_dir / "labels.csv"
    written.append(labels_path)
    pd.DataFrame({"point_index": np.arange(dataset.n), "cluster": report.labels}).to_csv(labels_path, index=False)

    if dataset.d == 2:
        points = pd.DataFrame({
            "x": dataset.features[:, 0],
            "y": dataset.features[:, 1],
            "label": dataset.labels if dataset.labels is not None else -1,
            "cluster": report.labels,
        })
        points_path = out_dir / "points.csv"
        written.append(points_path)
        points.to_csv(points_path, index=False, float_format="%.17g")

    metrics_path = out_dir / "metrics.json"
    written.append(metrics_path)
    with metrics_path.open("w", encoding="utf-8") as f:
        json.dump(doc, f, ensure_ascii=False, indent=2)


def _cleanup(paths: Sequence[Path], out_dir: Path, created: bool) -> None:
    for path in paths:
        path.unlink(missing_ok=True)
    if created and out_dir.exists() and not any(out_dir.iterdir()):
        out_dir.rmdir()


def run_pipeline(config: PipelineConfig, dataset: Optional[Dataset] = None) -> RunReport:
    """
    config 대로 한 번 실행하고 out_dir 에 결과를 쓴다.
    dataset 을 넘기면 load 단계를 건너뛴다 (sweep 에서 데이터 고정용).
    stage 에서 난 에러는 StageError(stage, cause) 로 감싸고, 이미 쓴 파일은 지운다.
    """
    config.validate()
    times: Dict[str, Optional[float]] = {name: None for name in STAGES}
    t_start = time.perf_counter()

    if dataset is None:
        with _stage("load", times):
            dataset = load_dataset(config.dataset, seed=config.seed)
    config.validate(n=dataset.n)

    out_dir = Path(config.out_dir)
    created = not out_dir.exists()
    out_dir.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []

    try:
        sigma: Optional[float] = None
        architecture: Optional[List[int]] = None
        loss_history: List[float] = []

        if config.method in LANDMARK_METHOD:
            with _stage("landmarks", times):
                landmarks = select_landmarks(dataset, config.p, LANDMARK_METHOD[config.method],
                                             seed=config.seed, max_iter=config.landmark_max_iter)
            with _stage("affinity", times):
                sq = landmark_sq_distances(dataset, landmarks)
                sigma = median_bandwidth(dataset, landmarks, sq_dist=sq, scale=config.sigma_scale)
                w = build_affinity(dataset, landmarks, sigma, sq_dist=sq)
            with _stage("degree", times):
                deg = degree_vector(w)
            with _stage("scaled", times):
                s = scaled_input(w, deg).s
                if config.input_scale == "max" and s.max() > 0:
                    s = s * (INPUT_SCALE_TARGET / s.max())

            hidden = auto_architecture(config.p, config.k) if config.architecture == "auto" else config.architecture
            with _stage("train", times):
                sizes = layer_sizes_for(config.p, hidden)
                params = init_network(sizes, seed=config.seed)
                train_cfg = replace(config.train, seed=config.seed,
                                    batch_size=min(config.train.batch_size, dataset.n))
                params, loss_history = train(params, s, train_cfg)
            with _stage("encode", times):
                z = encode(params, s).z.T
            with _stage("cluster", times):
                result = fit_kmeans(z, config.k, seed=config.seed, restarts=config.kmeans_restarts)
            architecture = list(sizes)

            artifacts = []
            if config.save_model:
                artifacts.append((out_dir / "model.laen", lambda path: save_checkpoint(params, path)))
            if config.dump_matrices:
                artifacts.append((out_dir / "W.lspc", lambda path: save_matrix(w.w, path)))
                artifacts.append((out_dir / "S.lspc", lambda path: save_matrix(s, path)))
            with _stage("report", {}):
                for path, save in artifacts:
                    written.append(path)
                    save(path)

        elif config.method == "kmeans_baseline":
            with _stage("cluster", times):
                result = fit_kmeans(dataset.features, config.k, seed=config.seed, restarts=config.kmeans_restarts)

        else:
            with _stage("affinity", times):
                sigma = pairwise_median_bandwidth(dataset, scale=config.sigma_scale)
            with _stage("cluster", times):
                result = spectral_cluster_exact(dataset, config.k, sigma=sigma, seed=config.seed,
                                                restarts=config.kmeans_restarts, cap=config.oracle_cap)

        times["total"] = time.perf_counter() - t_start

        has_labels = dataset.labels is not None
        report = RunReport(
            dataset=dataset.name,
            method=config.method,
            p=config.p if config.method in LANDMARK_METHOD else None,
            k=config.k,
            seed=config.seed,
            purity=purity(result, dataset.labels) if has_labels else None,
            nmi=nmi(result, dataset.labels) if has_labels else None,
            wall_times=times,
            n=dataset.n,
            d=dataset.d,
            sigma=sigma,
            architecture=architecture,
            loss_history=[float(x) for x in loss_history],
            objective=float(result.objective),
            labels=result.labels,
            out_dir=out_dir,
        )
        with _stage("report", {}):
            _write_outputs(report, dataset, out_dir, written)

        if config.plot and dataset.d == 2:
            from viz_clusters import plot_clusters

            written.append(plot_clusters(out_dir / "points.csv", out_dir / "clusters.png"))
    except Exception:
        _cleanup(written, out_dir, created)
        raise

    report.files = written
    logger.info("[DONE] %s method=%s p=%s purity=%s nmi=%s total=%.2fs",
                report.dataset, report.method, report.p,
                None if report.purity is None else f"{report.purity:.4f}",
                None if report.nmi is None else f"{report.nmi:.4f}",
                times["total"])
    return report


# -----------------------
# sweep
# -----------------------
def _run_cell(args: Tuple[PipelineConfig, Dataset, int, int]) -> Dict[str, Any]:
    config, dataset, p, repeat = args
    row: Dict[str, Any] = {"p": p, "repeat": repeat, "seed": config.seed, "method": config.method}
    try:
        report = run_pipeline(config, dataset=dataset)
    except ScalError as ex:
        logger.warning("[WARN] sweep cell p=%d repeat=%d failed: %s", p, repeat, ex)
        row.update(status="failed", error=str(ex))
        return row

    row.update(status="ok", error="", purity=report.purity, nmi=report.nmi, objective=report.objective)
    row.update({name: report.wall_times.get(name) for name in STAGES[1:] + ("total",)})
    return row


def _normalize_times(df: pd.DataFrame) -> pd.DataFrame:
    ok = df[df["status"] == "ok"]
    for name in NORM_STAGES:
        col = f"{name}_norm"
        df[col] = np.nan
        if ok.empty or name not in ok or ok[name].isna().all():
            continue
        ref = ok.loc[ok["p"] == ok["p"].max(), name].median()
        if ref and np.isfinite(ref):
            df[col] = df[name] / ref
    return df


def sweep(config: PipelineConfig, p_values: Sequence[int], repeats: int = 1, jobs: int = 1,
          progress: bool = False) -> pd.DataFrame:
    """
    p 별로 repeats 번 실행. repeat r 의 seed 는 config.seed + r, 데이터는 config.seed 로 한 번만 만든다.
    실패한 cell 은 status=failed 로 남기고 계속 진행.
    시간은 가장 큰 p 의 (repeat 중앙값) 기준으로 정규화한 *_norm 컬럼도 같이.
    """
    p_values = [int(p) for p in p_values]
    if not p_values:
        raise ParameterError("sweep needs at least one p value")
    if repeats < 1:
        raise ParameterError(f"repeats must be >= 1, got {repeats}")
    config.validate()

    dataset = load_dataset(config.dataset, seed=config.seed)
    pinned = replace(config.dataset, seed=config.seed if config.dataset.seed is None else config.dataset.seed)
    out_dir = Path(config.out_dir)

    cells = []
    for p in p_values:
        for r in range(repeats):
            cell_cfg = replace(
                config,
                dataset=pinned,
                p=p,
                seed=config.seed + r,
                out_dir=str(out_dir / f"p{p}_r{r}"),
                train=replace(config.train, progress=False),
                plot=False,
            )
            cells.append((cell_cfg, dataset, p, r))

    logger.info("[SWEEP] %s method=%s p=%s repeats=%d cells=%d jobs=%d",
                dataset.name, config.method, p_values, repeats, len(cells), jobs)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(tqdm(ex.map(_run_cell, cells), total=len(cells), desc="sweep", disable=not progress))
    else:
        rows = [_run_cell(c) for c in tqdm(cells, desc="sweep", disable=not progress)]

    df = pd.DataFrame(rows)
    for name in ("purity", "nmi", "objective") + STAGES[1:] + ("total",):
        if name not in df:
            df[name] = np.nan
    df = _normalize_times(df)

    out_dir.mkdir(parents=True, exist_ok=True)
    sweep_path = out_dir / "sweep.csv"
    df.to_csv(sweep_path, index=False, encoding="utf-8-sig")
    logger.info("[SAVE] %s (%d rows, %d failed)", sweep_path, len(df), int((df["status"] != "ok").sum()))

    if config.plot:
        from viz_clusters import plot_sweep

        plot_sweep(sweep_path, out_dir / "sweep.png")
    return df


# -----------------------
# CLI
# -----------------------
def parse_p_values(text: str) -> List[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParameterError(f"cannot parse p values {text!r} (expected e.g. 100,200,500)")
    if not values or any(v < 1 for v in values):
        raise ParameterError(f"p values must be positive integers, got {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description="landmark spectral clustering + autoencoder")
    ap.add_argument("--config", help="PipelineConfig 구조의 JSON 파일 (flag 가 우선)")

    g = ap.add_argument_group("dataset")
    g.add_argument("--dataset", choices=["two_moons", "two_circles", "moon_circle", "rings", "csv", "idx"])
    g.add_argument("--n", type=int)
    g.add_argument("--noise", type=float)
    g.add_argument("--rings", type=int)
    g.add_argument("--csv-path")
    g.add_argument("--label-column", type=int)
    g.add_argument("--idx-images")
    g.add_argument("--idx-labels")
    g.add_argument("--no-scale", action="store_true", help="파일 데이터 min-max 스케일링 끄기")

    g = ap.add_argument_group("method")
    g.add_argument("--method", choices=["scal_r", "scal_k", "kmeans", "exact"])
    g.add_argument("--landmarks", type=int, help="landmark 수 p")
    g.add_argument("--clusters", type=int, help="cluster 수 k")
    g.add_argument("--arch", help='hidden 5층 "64-32-2-32-64" 또는 "auto"')
    g.add_argument("--input-scale", choices=["max", "none"])
    g.add_argument("--bandwidth-scale", type=float, help="sigma = median x 이 값 (기본: toy 0.05, 파일 1.0)")

    g = ap.add_argument_group("training")
    g.add_argument("--epochs", type=int)
    g.add_argument("--batch-size", type=int)
    g.add_argument("--lr", type=float)
    g.add_argument("--seed", type=int)

    g = ap.add_argument_group("output")
    g.add_argument("--out-dir")
    g.add_argument("--sweep", nargs="?", const=",".join(str(p) for p in DEFAULT_SWEEP),
                   help="p1,p2,... (값 없이 주면 100,200,500,1000)")
    g.add_argument("--repeats", type=int, default=1)
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--save-model", action="store_true")
    g.add_argument("--dump-matrices", action="store_true")
    g.add_argument("--plot", action="store_true")
    g.add_argument("--log-level")
    g.add_argument("--no-progress", action="store_true")
    return ap


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    """
    defaults < env < --config JSON < flag
    """
    cfg = PipelineConfig.from_env()
    if args.config:
        cfg = load_config_file(args.config, base=cfg)

    ds: Dict[str, Any] = {}
    if args.dataset is not None:
        ds["kind"] = DATASET_ALIASES.get(args.dataset, args.dataset)
    for key in ("n", "noise", "rings", "csv_path", "label_column", "idx_images", "idx_labels"):
        value = getattr(args, key)
        if value is not None:
            ds[key] = value
    if args.no_scale:
        ds["scale"] = False

    tr: Dict[str, Any] = {"progress": not args.no_progress}
    for key, attr in (("epochs", "epochs"), ("batch_size", "batch_size"), ("learning_rate", "lr")):
        value = getattr(args, attr)
        if value is not None:
            tr[key] = value

    top: Dict[str, Any] = {}
    if args.method is not None:
        top["method"] = METHOD_ALIASES.get(args.method, args.method)
    for key, attr in (("p", "landmarks"), ("k", "clusters"), ("seed", "seed"),
                      ("out_dir", "out_dir"), ("input_scale", "input_scale"),
                      ("bandwidth_scale", "bandwidth_scale")):
        value = getattr(args, attr)
        if value is not None:
            top[key] = value
    if args.arch is not None:
        top["architecture"] = parse_architecture(args.arch)
    for flag in ("save_model", "dump_matrices", "plot"):
        if getattr(args, flag):
            top[flag] = True

    return PipelineConfig.from_dict({"dataset": ds, "train": tr, **top}, base=cfg)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)

    try:
        cfg = config_from_args(args)
        if args.sweep:
            df = sweep(cfg, parse_p_values(args.sweep), repeats=args.repeats, jobs=args.jobs,
                       progress=not args.no_progress)
            summary = (
                df[df["status"] == "ok"]
                .groupby("p", as_index=False)
                .agg(purity=("purity", "median"), total=("total", "median"), runs=("status", "size"))
            )
            print(summary.to_string(index=False))
        else:
            report = run_pipeline(cfg)
            print(json.dumps(report.to_dict(), ensure_ascii=False, indent=2))
    except ScalError as ex:
        logger.error("[FAIL] %s", ex)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
