# bench_scaling.py
# -*- coding: utf-8 -*-
"""
p 고정, n 만 키워가며 degree -> S -> 학습 1 epoch 시간이 n 에 선형인지 확인.

  python research/bench_scaling.py --ns 5000,10000,20000 --p 200 --repeats 3
"""

import argparse
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Dict, Sequence, Tuple

import pandas as pd
from scipy.stats import linregress

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))  # repo root 모듈 import

from affinity import build_affinity, degree_vector, landmark_sq_distances, median_bandwidth, scaled_input
from autoencoder import TOY_HIDDEN, TrainConfig, init_network, layer_sizes_for, train
from config import setup_logging
from data import generate_synthetic
from errors import ParameterError
from landmarks import select_random

logger = logging.getLogger(__name__)


def time_stages(n: int, p: int, seed: int = 0, noise: float = 0.05, batch_size: int = 256) -> Dict[str, float]:
    ds = generate_synthetic("two_moons", n, noise=noise, seed=seed)
    lm = select_random(ds, p, seed=seed)
    sq = landmark_sq_distances(ds, lm)
    w = build_affinity(ds, lm, median_bandwidth(ds, lm, sq_dist=sq), sq_dist=sq)

    t0 = time.perf_counter()
    deg = degree_vector(w)
    t1 = time.perf_counter()
    s = scaled_input(w, deg).s
    s = s * (1.0 / s.max())
    t2 = time.perf_counter()
    params = init_network(layer_sizes_for(p, TOY_HIDDEN), seed=seed)
    train(params, s, replace(TrainConfig(), epochs=1, batch_size=min(batch_size, n), seed=seed))
    t3 = time.perf_counter()

    return {"degree": t1 - t0, "scaled": t2 - t1, "train_epoch": t3 - t2, "stages": t3 - t0}


def fit_linear(df: pd.DataFrame, column: str = "stages") -> Dict[str, float]:
    if df["n"].nunique() < 2:
        raise ParameterError("linear fit needs at least two distinct n")
    fit = linregress(df["n"].to_numpy(dtype=float), df[column].to_numpy(dtype=float))
    return {"slope": float(fit.slope), "intercept": float(fit.intercept), "r2": float(fit.rvalue ** 2)}


def run(ns: Sequence[int], p: int = 200, repeats: int = 3, seed: int = 0) -> Tuple[pd.DataFrame, Dict[str, float]]:
    """
    n 마다 repeats 번. 같은 repeat 의 seed 는 n 에 상관없이 seed + repeat.
    returns: (n, repeat, degree, scaled, train_epoch, stages) 표, stages 에 대한 선형 fit
    """
    if repeats < 1:
        raise ParameterError(f"repeats must be >= 1, got {repeats}")
    rows = []
    for n in ns:
        for r in range(repeats):
            times = time_stages(int(n), p, seed=seed + r)
            rows.append({"n": int(n), "repeat": r, **times})
            logger.info("[BENCH] n=%d repeat=%d stages=%.3fs", n, r, times["stages"])

    df = pd.DataFrame(rows)
    fit = fit_linear(df)
    logger.info("[FIT] time ~ %.3g * n + %.3g  (R^2=%.4f)", fit["slope"], fit["intercept"], fit["r2"])
    return df, fit


def main(argv=None):
    ap = argparse.ArgumentParser(description="O(np) 스케일링 벤치마크")
    ap.add_argument("--ns", default="5000,10000,20000")
    ap.add_argument("--p", type=int, default=200)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--out", default="out/bench_scaling.csv")
    args = ap.parse_args(argv)

    setup_logging()
    df, fit = run([int(x) for x in args.ns.split(",")], p=args.p, repeats=args.repeats)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(out, index=False, encoding="utf-8-sig")
    print(df.groupby("n")[["degree", "scaled", "train_epoch", "stages"]].median().to_string())
    print(f"\nslope={fit['slope']:.3g}s/point  intercept={fit['intercept']:.3g}s  R^2={fit['r2']:.4f}")
    print(f"[SAVE] {out}")


if __name__ == "__main__":
    main()
