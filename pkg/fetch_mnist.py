# fetch_mnist.py
# -*- coding: utf-8 -*-
"""
MNIST IDX(gzip) 4개 파일 내려받기.

  python fetch_mnist.py                 # SCAL_DATA_DIR (기본 data/mnist)
  python fetch_mnist.py --out-dir /tmp/mnist --overwrite

내려받은 파일은 data.load_idx 가 .gz 그대로 읽는다.
"""

import argparse
import logging
from pathlib import Path
from typing import Dict, Optional, Union

import requests
from tqdm import tqdm

from config import getenv_any, setup_logging

logger = logging.getLogger(__name__)

DEFAULT_MIRROR = "https://ossci-datasets.s3.amazonaws.com/mnist/"

FILES = {
    "train_images": "train-images-idx3-ubyte.gz",
    "train_labels": "train-labels-idx1-ubyte.gz",
    "test_images": "t10k-images-idx3-ubyte.gz",
    "test_labels": "t10k-labels-idx1-ubyte.gz",
}

HEADERS = {
    "User-Agent": "Mozilla/5.0 (Macintosh; Intel Mac OS X 10_15_7) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/120 Safari/537.36",
    "Accept": "application/octet-stream, */*",
}

CHUNK = 1 << 16


def default_out_dir() -> Path:
    return Path(getenv_any("SCAL_DATA_DIR", default="data/mnist"))


def default_mirror() -> str:
    return getenv_any("SCAL_MNIST_MIRROR", default=DEFAULT_MIRROR)


def _download(url: str, dest: Path, progress: bool) -> None:
    # .part 에 받고 끝까지 받았을 때만 rename
    tmp = dest.with_name(dest.name + ".part")
    try:
        with requests.get(url, headers=HEADERS, timeout=60, stream=True) as r:
            r.raise_for_status()
            total = int(r.headers.get("content-length") or 0) or None
            with tmp.open("wb") as f, tqdm(total=total, unit="B", unit_scale=True,
                                           desc=dest.name, disable=not progress) as bar:
                for chunk in r.iter_content(chunk_size=CHUNK):
                    if chunk:
                        f.write(chunk)
                        bar.update(len(chunk))
        tmp.replace(dest)
    except requests.RequestException:
        logger.error("[FAIL] %s", url)
        raise
    finally:
        tmp.unlink(missing_ok=True)


def fetch_mnist(out_dir: Optional[Union[str, Path]] = None, mirror: Optional[str] = None,
                overwrite: bool = False, progress: bool = False) -> Dict[str, Path]:
    out_dir = Path(out_dir) if out_dir is not None else default_out_dir()
    mirror = mirror or default_mirror()
    if not mirror.endswith("/"):
        mirror += "/"
    out_dir.mkdir(parents=True, exist_ok=True)

    paths = {}
    for key, name in FILES.items():
        dest = out_dir / name
        paths[key] = dest
        if dest.exists() and not overwrite:
            logger.info("[SKIP] %s (이미 있음)", dest)
            continue
        _download(mirror + name, dest, progress)
        logger.info("[SAVE] %s", dest)
    return paths


def main(argv=None):
    ap = argparse.ArgumentParser(description="MNIST IDX 파일 다운로드")
    ap.add_argument("--out-dir", help="저장 폴더 (기본: SCAL_DATA_DIR 또는 data/mnist)")
    ap.add_argument("--mirror", help="다운로드 base URL (기본: SCAL_MNIST_MIRROR)")
    ap.add_argument("--overwrite", action="store_true")
    args = ap.parse_args(argv)

    setup_logging()
    paths = fetch_mnist(args.out_dir, args.mirror, overwrite=args.overwrite, progress=True)
    print("python run_pipeline.py --dataset idx "
          f"--idx-images {paths['train_images']} --idx-labels {paths['train_labels']} "
          "--method scal_k --landmarks 500 --clusters 10 --arch auto")


if __name__ == "__main__":
    main()
