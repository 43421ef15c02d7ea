# -*- coding: utf-8 -*-

import gzip
import struct

import numpy as np
import pytest

from config import DatasetSpec
from data import (LOWER_MOON_CENTER, Dataset, generate_synthetic, load_csv, load_dataset, load_idx,
                  min_max_scale, write_csv)
from errors import DataFormatError, ParameterError


# -----------------------
# synthetic
# -----------------------
@pytest.mark.parametrize("shape, k", [("two_moons", 2), ("two_circles", 2), ("moon_circle", 2), ("concentric_rings", 3)])
def test_synthetic_shapes_and_labels(shape, k):
    ds = generate_synthetic(shape, 301, noise=0.05, seed=3)
    assert ds.features.shape == (301, 2)
    assert ds.n_classes == k
    counts = np.bincount(ds.labels)
    # 나머지는 앞 component 부터
    assert counts.max() - counts.min() <= 1
    assert counts[0] == counts.max()
    assert ds.params["shape"] == shape


def test_synthetic_is_deterministic_per_seed():
    a = generate_synthetic("two_moons", 200, noise=0.1, seed=5)
    b = generate_synthetic("two_moons", 200, noise=0.1, seed=5)
    c = generate_synthetic("two_moons", 200, noise=0.1, seed=6)
    np.testing.assert_array_equal(a.features, b.features)
    assert not np.array_equal(a.features, c.features)


def test_noise_free_moons_lie_on_their_arcs():
    ds = generate_synthetic("two_moons", 400, noise=0.0, seed=1)
    upper = ds.features[ds.labels == 0]
    lower = ds.features[ds.labels == 1]
    np.testing.assert_allclose(np.linalg.norm(upper, axis=1), 1.0)
    np.testing.assert_allclose(np.linalg.norm(lower - np.array(LOWER_MOON_CENTER), axis=1), 1.0)
    assert upper[:, 1].min() >= -1e-12
    assert lower[:, 1].max() <= LOWER_MOON_CENTER[1] + 1e-12


def test_noise_free_rings_radii():
    ds = generate_synthetic("concentric_rings", 400, noise=0.0, seed=2, rings=4)
    radii = np.linalg.norm(ds.features, axis=1)
    for ring in range(4):
        np.testing.assert_allclose(radii[ds.labels == ring], ring + 1.0)


def test_two_circles_radii():
    ds = generate_synthetic("two_circles", 100, noise=0.0)
    radii = np.linalg.norm(ds.features, axis=1)
    np.testing.assert_allclose(radii[ds.labels == 0], 1.0)
    np.testing.assert_allclose(radii[ds.labels == 1], 2.0)


def test_synthetic_rejects_bad_arguments():
    with pytest.raises(ParameterError):
        generate_synthetic("two_moons", 100, noise=-0.1)
    with pytest.raises(ParameterError):
        generate_synthetic("two_moons", 1)
    with pytest.raises(ParameterError):
        generate_synthetic("spiral", 100)


def test_dataset_is_read_only():
    ds = generate_synthetic("two_moons", 10)
    with pytest.raises(ValueError):
        ds.features[0, 0] = 1.0


def test_dataset_rejects_non_finite():
    with pytest.raises(ParameterError, match="row 1"):
        Dataset(features=np.array([[0.0, 1.0], [np.nan, 2.0]]))


# -----------------------
# CSV
# -----------------------
def test_load_csv_with_header_and_labels(tmp_path):
    path = tmp_path / "pts.csv"
    path.write_text("x,y,cls\n0.5,1.0,b\n1.5,2.0,a\n2.5,3.0,b\n")
    ds = load_csv(path, label_column=2)
    np.testing.assert_array_equal(ds.features, [[0.5, 1.0], [1.5, 2.0], [2.5, 3.0]])
    # 등장 순서대로 0, 1
    np.testing.assert_array_equal(ds.labels, [0, 1, 0])
    assert ds.name == "pts"


def test_load_csv_without_header(tmp_path):
    path = tmp_path / "raw.csv"
    path.write_text("1,2\n3,4\n")
    ds = load_csv(path)
    assert ds.features.shape == (2, 2)
    assert ds.labels is None


def test_load_csv_ragged_rows(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1,2,3\n4,5\n")
    with pytest.raises(DataFormatError, match="ragged"):
        load_csv(path)


def test_load_csv_non_numeric_cell_names_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n3,oops\n")
    with pytest.raises(DataFormatError, match="line 3"):
        load_csv(path)


def test_load_csv_missing_and_empty(tmp_path):
    with pytest.raises(DataFormatError):
        load_csv(tmp_path / "nope.csv")
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(DataFormatError):
        load_csv(empty)


def test_write_csv_reads_back(tmp_path):
    ds = generate_synthetic("moon_circle", 50, noise=0.05, seed=4)
    path = write_csv(ds, tmp_path / "out" / "mc.csv")
    back = load_csv(path, label_column=2)
    np.testing.assert_array_equal(back.features, ds.features)
    np.testing.assert_array_equal(back.labels, ds.labels)


def test_write_csv_round_trip_random_matrices(tmp_path):
    r = np.random.default_rng(11)
    for i in range(5):
        x = r.normal(scale=10.0 ** r.integers(-6, 7), size=(20, 4))
        path = write_csv(Dataset(features=x), tmp_path / f"m{i}.csv")
        back = load_csv(path)
        # 12 유효숫자
        np.testing.assert_allclose(back.features, x, rtol=1e-12, atol=0)
        np.testing.assert_array_equal(back.features, x)


# -----------------------
# IDX
# -----------------------
def _idx_files(tmp_path, images, labels, compress=False, image_magic=0x803, label_count=None):
    count, rows, cols = images.shape
    ibytes = struct.pack(">IIII", image_magic, count, rows, cols) + images.astype(np.uint8).tobytes()
    lbytes = struct.pack(">II", 0x801, len(labels) if label_count is None else label_count) + bytes(labels)
    suffix = ".gz" if compress else ""
    ipath, lpath = tmp_path / f"images-idx3-ubyte{suffix}", tmp_path / f"labels-idx1-ubyte{suffix}"
    opener = gzip.open if compress else open
    with opener(ipath, "wb") as f:
        f.write(ibytes)
    with opener(lpath, "wb") as f:
        f.write(lbytes)
    return ipath, lpath


@pytest.mark.parametrize("compress", [False, True])
def test_load_idx(tmp_path, compress):
    images = np.arange(3 * 2 * 2).reshape(3, 2, 2) * 20
    ipath, lpath = _idx_files(tmp_path, images, [7, 0, 3], compress=compress)
    ds = load_idx(ipath, lpath)
    assert ds.features.shape == (3, 4)
    np.testing.assert_allclose(ds.features, images.reshape(3, 4) / 255.0)
    np.testing.assert_array_equal(ds.labels, [7, 0, 3])


def test_load_idx_bad_magic(tmp_path):
    ipath, lpath = _idx_files(tmp_path, np.zeros((2, 2, 2)), [0, 1], image_magic=0x804)
    with pytest.raises(DataFormatError, match="magic"):
        load_idx(ipath, lpath)


def test_load_idx_count_mismatch(tmp_path):
    ipath, lpath = _idx_files(tmp_path, np.zeros((2, 2, 2)), [0], label_count=1)
    with pytest.raises(DataFormatError, match="count mismatch"):
        load_idx(ipath, lpath)


def test_load_idx_truncated(tmp_path):
    ipath, lpath = _idx_files(tmp_path, np.zeros((2, 2, 2)), [0, 1])
    ipath.write_bytes(ipath.read_bytes()[:-3])
    with pytest.raises(DataFormatError, match="truncated"):
        load_idx(ipath, lpath)


# -----------------------
# scaling / dispatch
# -----------------------
def test_min_max_scale_constant_column():
    ds = Dataset(features=np.array([[1.0, 5.0], [3.0, 5.0], [2.0, 5.0]]))
    scaled = min_max_scale(ds)
    np.testing.assert_allclose(scaled.features[:, 0], [0.0, 1.0, 0.5])
    np.testing.assert_array_equal(scaled.features[:, 1], 0.0)


def test_min_max_scale_random_columns_hit_zero_and_one():
    x = np.random.default_rng(3).uniform(-50.0, 50.0, size=(200, 6))
    scaled = min_max_scale(Dataset(features=x)).features
    np.testing.assert_array_equal(scaled.min(axis=0), 0.0)
    np.testing.assert_allclose(scaled.max(axis=0), 1.0, atol=1e-12)


def test_min_max_scale_is_idempotent():
    x = np.random.default_rng(4).normal(size=(100, 3))
    once = min_max_scale(Dataset(features=x))
    twice = min_max_scale(once)
    np.testing.assert_allclose(twice.features, once.features, atol=1e-12)


def test_load_dataset_dispatch(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("10,0\n20,1\n30,0\n")
    ds = load_dataset(DatasetSpec(kind="csv", csv_path=str(path), label_column=1))
    np.testing.assert_allclose(ds.features[:, 0], [0.0, 0.5, 1.0])

    raw = load_dataset(DatasetSpec(kind="csv", csv_path=str(path), label_column=1, scale=False))
    np.testing.assert_allclose(raw.features[:, 0], [10.0, 20.0, 30.0])

    a = load_dataset(DatasetSpec(kind="two_moons", n=50), seed=1)
    b = load_dataset(DatasetSpec(kind="two_moons", n=50, seed=1), seed=99)
    np.testing.assert_array_equal(a.features, b.features)


def test_load_dataset_needs_paths():
    with pytest.raises(ParameterError):
        load_dataset(DatasetSpec(kind="csv"))
    with pytest.raises(ParameterError):
        load_dataset(DatasetSpec(kind="idx", idx_images="a"))
