#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
run_pipeline.py 가 떨군 CSV 로 그림 그리기.

- points.csv  -> 2D 점 산점도 (cluster 색)     : toy 데이터 결과 확인용
- sweep.csv   -> landmark 수 p 대비 purity / 정규화 실행시간
"""

import argparse
import logging
from pathlib import Path
from typing import Optional, Union

import matplotlib as mpl

mpl.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns
from matplotlib import font_manager as fm

from config import setup_logging
from errors import DataFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


# -----------------------
# 1) 폰트 세팅 (한글 라벨 네모 깨짐 방지)
# -----------------------
def setup_font():
    candidates = [
        "Apple SD Gothic Neo",
        "AppleGothic",
        "NanumGothic",
        "Noto Sans CJK KR",
        "Noto Sans KR",
        "Malgun Gothic",
    ]

    installed = {f.name for f in fm.fontManager.ttflist}
    chosen = next((name for name in candidates if name in installed), None)
    if not chosen:
        logger.debug("[FONT] 한글 폰트 없음 -> DejaVu Sans")
        chosen = "DejaVu Sans"

    mpl.rcParams["font.family"] = "sans-serif"
    mpl.rcParams["font.sans-serif"] = [chosen, "DejaVu Sans"]
    mpl.rcParams["axes.unicode_minus"] = False
    sns.set_theme(style="whitegrid", font=chosen)
    return chosen


def _read(path: PathLike, required) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"파일이 없습니다: {path}")
    df = pd.read_csv(path)
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise DataFormatError(f"{path}: 필요한 컬럼이 없습니다 {missing} (현재 컬럼: {list(df.columns)})")
    return df


# -----------------------
# 2) 2D 점 + cluster
# -----------------------
def plot_clusters(points_csv: PathLike, out_png: Optional[PathLike] = None, title: Optional[str] = None) -> Path:
    df = _read(points_csv, ["x", "y", "cluster"])
    out_png = Path(out_png) if out_png else Path(points_csv).with_suffix(".png")
    out_png.parent.mkdir(parents=True, exist_ok=True)

    setup_font()
    plt.figure(figsize=(7, 7))
    ax = sns.scatterplot(
        data=df,
        x="x",
        y="y",
        hue="cluster",
        palette="tab10",
        s=8,
        linewidth=0,
        alpha=0.85,
        legend="full",
    )
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_title(title or f"cluster 결과 (n={len(df)})", pad=12)

    plt.tight_layout()
    plt.savefig(out_png, dpi=180)
    plt.close()
    logger.info("[SAVE] %s", out_png)
    return out_png


# -----------------------
# 3) sweep: purity / 정규화 실행시간 vs p
# -----------------------
def plot_sweep(sweep_csv: PathLike, out_png: Optional[PathLike] = None) -> Path:
    df = _read(sweep_csv, ["p", "method", "status", "purity", "total_norm"])
    df = df[df["status"] == "ok"]
    if df.empty:
        raise DataFormatError(f"{sweep_csv}: 성공한 cell 이 없습니다")

    out_png = Path(out_png) if out_png else Path(sweep_csv).with_suffix(".png")
    out_png.parent.mkdir(parents=True, exist_ok=True)

    setup_font()
    fig, axes = plt.subplots(1, 2, figsize=(13, 5))

    sns.lineplot(data=df, x="p", y="purity", hue="method", marker="o", errorbar="sd", ax=axes[0])
    axes[0].set_title("landmark 수 대비 clustering purity", pad=10)
    axes[0].set_xlabel("landmark 수 p")
    axes[0].set_ylabel("purity")

    sns.lineplot(data=df, x="p", y="total_norm", hue="method", marker="o", errorbar="sd", ax=axes[1])
    axes[1].set_title("landmark 수 대비 실행시간 (최대 p 기준 정규화)", pad=10)
    axes[1].set_xlabel("landmark 수 p")
    axes[1].set_ylabel("정규화 실행시간")

    plt.tight_layout()
    plt.savefig(out_png, dpi=180)
    plt.close(fig)
    logger.info("[SAVE] %s", out_png)
    return out_png


def main(argv=None):
    ap = argparse.ArgumentParser(description="run_pipeline 결과 CSV 시각화")
    ap.add_argument("--points", help="points.csv (x, y, cluster)")
    ap.add_argument("--sweep", help="sweep.csv")
    ap.add_argument("--out", help="출력 PNG 경로 (기본: CSV 옆)")
    args = ap.parse_args(argv)

    setup_logging()
    if not args.points and not args.sweep:
        ap.error("--points 또는 --sweep 중 하나는 필요")

    if args.points:
        plot_clusters(args.points, args.out if not args.sweep else None)
    if args.sweep:
        plot_sweep(args.sweep, args.out if not args.points else None)


if __name__ == "__main__":
    main()
