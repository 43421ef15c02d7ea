# -*- coding: utf-8 -*-

import warnings

import numpy as np
import pytest

from affinity import TOY_BANDWIDTH_SCALE
from data import Dataset, generate_synthetic
from errors import DegenerateInputError, NumericalError, OracleScaleError, ParameterError
from metrics import purity
from oracle import (SymmetricMatrix, full_affinity, pairwise_median_bandwidth, spectral_cluster_exact,
                    symmetric_eigs)


def _count_below(a, x):
    """
    A - xI 의 (피벗 없는) LDL^T 음수 피벗 개수 = x 보다 작은 고유값 개수 (Sylvester 관성).
    """
    m = a - x * np.eye(a.shape[0])
    negatives = 0
    for k in range(m.shape[0]):
        pivot = m[k, k]
        if pivot < 0:
            negatives += 1
        m[k + 1:, k + 1:] -= np.outer(m[k + 1:, k], m[k, k + 1:]) / pivot
    return negatives


def _random_symmetric(r, n):
    b = r.normal(size=(n, n))
    return (b + b.T) / 2


def test_eigs_residual_and_orthonormality():
    r = np.random.default_rng(0)
    for _ in range(50):
        n = int(r.integers(1, 51))
        a = _random_symmetric(r, n)
        eig = symmetric_eigs(a, n)
        fro = np.linalg.norm(a)
        for i in range(n):
            v = eig.vectors[:, i]
            assert np.linalg.norm(a @ v - eig.values[i] * v) <= 1e-8 * fro
        assert np.max(np.abs(eig.vectors.T @ eig.vectors - np.eye(n))) <= 1e-10
        assert np.all(np.diff(eig.values) <= 0)


def test_eigs_match_inertia_counts():
    r = np.random.default_rng(5)
    for _ in range(10):
        n = int(r.integers(2, 30))
        a = _random_symmetric(r, n)
        values = np.sort(symmetric_eigs(a, n).values)
        for lo, hi in zip(values[:-1], values[1:]):
            if hi - lo < 1e-6:
                continue
            mid = (lo + hi) / 2
            assert _count_below(a, mid) == int(np.sum(values < mid))
        assert _count_below(a, values[0] - 1.0) == 0
        assert _count_below(a, values[-1] + 1.0) == n


def test_eigs_top_r_and_trivial_cases():
    a = np.diag([1.0, 5.0, 3.0])
    eig = symmetric_eigs(a, 2)
    np.testing.assert_array_equal(eig.values, [5.0, 3.0])
    assert eig.sweeps == 0
    one = symmetric_eigs(np.array([[2.5]]), 1)
    assert one.values[0] == 2.5


def test_eigs_bad_input():
    with pytest.raises(ParameterError):
        symmetric_eigs(np.array([[1.0, 2.0], [0.0, 1.0]]), 1)
    with pytest.raises(ParameterError):
        symmetric_eigs(np.eye(3), 4)
    with pytest.raises(ParameterError):
        SymmetricMatrix(a=np.ones((2, 3)))


def test_eigs_sweep_limit():
    a = _random_symmetric(np.random.default_rng(1), 20)
    with pytest.raises(NumericalError):
        symmetric_eigs(a, 3, max_sweeps=1)


def test_eigs_two_by_two_analytic():
    eig = symmetric_eigs(np.array([[2.0, 1.0], [1.0, 2.0]]), 2)
    np.testing.assert_allclose(eig.values, [3.0, 1.0], atol=1e-12)
    # 부호는 자유
    np.testing.assert_allclose(np.abs(eig.vectors[:, 0]), [2 ** -0.5, 2 ** -0.5], atol=1e-12)
    np.testing.assert_allclose(np.abs(eig.vectors[:, 1]), [2 ** -0.5, 2 ** -0.5], atol=1e-12)
    assert eig.vectors[0, 1] * eig.vectors[1, 1] < 0


def test_eigs_reconstruct_matrix():
    r = np.random.default_rng(9)
    for n in (3, 8, 17):
        a = _random_symmetric(r, n)
        eig = symmetric_eigs(a, n)
        back = eig.vectors @ np.diag(eig.values) @ eig.vectors.T
        np.testing.assert_allclose(back, a, atol=1e-10 * np.linalg.norm(a))


def test_eigs_tiny_off_diagonal_no_overflow():
    a = np.array([[1.0, 0.5, 1e-310], [0.5, 2.0, 0.0], [1e-310, 0.0, 3.0]])
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        eig = symmetric_eigs(a, 3)
    for i in range(3):
        v = eig.vectors[:, i]
        assert np.linalg.norm(a @ v - eig.values[i] * v) <= 1e-8 * np.linalg.norm(a)


def test_full_affinity(moons):
    sigma = pairwise_median_bandwidth(moons)
    w = full_affinity(moons, sigma, cap=1000).a
    assert w.shape == (moons.n, moons.n)
    np.testing.assert_array_equal(np.diag(w), 1.0)
    np.testing.assert_array_equal(w, w.T)
    with pytest.raises(OracleScaleError):
        full_affinity(moons, sigma, cap=moons.n - 1)


def test_spectral_cluster_exact_on_blobs(blobs):
    result = spectral_cluster_exact(blobs, 3, seed=0, cap=500)
    assert purity(result, blobs.labels) == 1.0


def test_spectral_cluster_exact_on_circles():
    ds = generate_synthetic("two_circles", 120, noise=0.0, seed=0)
    # 좁은 bandwidth 면 두 원이 분리된다
    result = spectral_cluster_exact(ds, 2, sigma=0.1, seed=0, cap=500)
    assert purity(result, ds.labels) == 1.0


def test_spectral_cluster_exact_bad_k(blobs):
    with pytest.raises(ParameterError):
        spectral_cluster_exact(blobs, 0)
    with pytest.raises(ParameterError):
        spectral_cluster_exact(blobs, blobs.n + 1)


def test_spectral_cluster_exact_single_cluster(blobs):
    result = spectral_cluster_exact(blobs, 1, seed=0, cap=500)
    np.testing.assert_array_equal(result.labels, 0)


def test_spectral_cluster_exact_bandwidth_scale_on_moons():
    ds = generate_synthetic("two_moons", 200, noise=0.05, seed=0)
    result = spectral_cluster_exact(ds, 2, seed=0, cap=500, bandwidth_scale=TOY_BANDWIDTH_SCALE)
    assert purity(result, ds.labels) >= 0.95


def test_pairwise_bandwidth_degenerate():
    with pytest.raises(DegenerateInputError):
        pairwise_median_bandwidth(Dataset(features=np.zeros((3, 2))))
