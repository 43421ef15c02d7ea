# compare_methods.py
# -*- coding: utf-8 -*-
"""
kmeans 기준선 / scal_r / scal_k 를 여러 p, 여러 seed 로 돌려서 purity 비교표 만들기.

  python research/compare_methods.py --dataset idx \
      --idx-images data/mnist/train-images-idx3-ubyte.gz --idx-labels data/mnist/train-labels-idx1-ubyte.gz \
      --clusters 10 --p 500,1000 --seeds 0,1,2
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))  # repo root 모듈 import

from config import DatasetSpec, PipelineConfig, setup_logging
from data import load_dataset
from errors import ParameterError, ScalError
from run_pipeline import DATASET_ALIASES, LANDMARK_METHOD, run_pipeline

logger = logging.getLogger(__name__)

DEFAULT_METHODS = ("kmeans_baseline", "scal_r", "scal_k")


def run(spec: DatasetSpec, methods: Sequence[str] = DEFAULT_METHODS, p_values: Sequence[int] = (500,),
        seeds: Sequence[int] = (0,), base: Optional[PipelineConfig] = None) -> pd.DataFrame:
    """
    returns: method, p, seed, status, purity, nmi, total (행 = 실행 1회)
    데이터는 첫 seed 로 한 번만 만들어서 모든 실행이 같은 점을 쓴다.
    """
    if not seeds:
        raise ParameterError("need at least one seed")
    base = base or PipelineConfig()
    base = replace(base, dataset=spec)
    base.validate()
    dataset = load_dataset(spec, seed=seeds[0])
    out_root = Path(base.out_dir)

    rows = []
    for method in methods:
        grid = p_values if method in LANDMARK_METHOD else (None,)
        for p in grid:
            for seed in seeds:
                label = f"{method}_p{p}_s{seed}" if p is not None else f"{method}_s{seed}"
                cfg = replace(base, method=method, p=p if p is not None else base.p, seed=seed,
                              out_dir=str(out_root / label))
                row = {"method": method, "p": p, "seed": seed}
                try:
                    report = run_pipeline(cfg, dataset=dataset)
                except ScalError as ex:
                    logger.warning("[WARN] %s failed: %s", label, ex)
                    rows.append({**row, "status": "failed", "error": str(ex)})
                    continue
                rows.append({**row, "status": "ok", "error": "", "purity": report.purity, "nmi": report.nmi,
                             "total": report.wall_times["total"]})

    df = pd.DataFrame(rows)
    for col in ("purity", "nmi", "total"):
        if col not in df:
            df[col] = float("nan")
    return df


def summarize(df: pd.DataFrame) -> pd.DataFrame:
    # method x p 별 seed 중앙값
    ok = df[df["status"] == "ok"].copy()
    ok["p"] = ok["p"].map(lambda v: "-" if pd.isna(v) else str(int(v)))
    return (
        ok.groupby(["method", "p"], as_index=False)
          .agg(purity=("purity", "median"), nmi=("nmi", "median"), total=("total", "median"), runs=("seed", "size"))
    )


def main(argv=None):
    ap = argparse.ArgumentParser(description="clustering 방법 비교표")
    ap.add_argument("--dataset", default="two_moons")
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--idx-images")
    ap.add_argument("--idx-labels")
    ap.add_argument("--csv-path")
    ap.add_argument("--label-column", type=int)
    ap.add_argument("--clusters", type=int, default=2)
    ap.add_argument("--methods", default=",".join(DEFAULT_METHODS))
    ap.add_argument("--p", default="200,500")
    ap.add_argument("--seeds", default="0,1,2")
    ap.add_argument("--epochs", type=int, default=10)
    ap.add_argument("--arch", default="auto")
    ap.add_argument("--out-dir", default="out/compare_methods")
    args = ap.parse_args(argv)

    setup_logging()
    kind = DATASET_ALIASES.get(args.dataset, args.dataset)
    spec = DatasetSpec(kind=kind, n=args.n, csv_path=args.csv_path, label_column=args.label_column,
                       idx_images=args.idx_images, idx_labels=args.idx_labels)
    base = PipelineConfig.from_dict({
        "k": args.clusters,
        "architecture": args.arch,
        "out_dir": args.out_dir,
        "train": {"epochs": args.epochs},
    })
    df = run(
        spec,
        methods=args.methods.split(","),
        p_values=[int(x) for x in args.p.split(",")],
        seeds=[int(x) for x in args.seeds.split(",")],
        base=base,
    )

    out = Path(args.out_dir) / "compare_methods.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(out, index=False, encoding="utf-8-sig")
    print(summarize(df).to_string(index=False))
    print(f"[SAVE] {out}")


if __name__ == "__main__":
    main()
