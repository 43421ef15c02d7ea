# -*- coding: utf-8 -*-

from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import ParameterError
from kmeans import assign, fit_kmeans, kmeanspp_init, lloyd


def _brute_force_two_partition(x):
    # 점 0 은 항상 cluster 0 (대칭 제거)
    best = np.inf
    n = x.shape[0]
    for bits in product([0, 1], repeat=n - 1):
        labels = np.array((0,) + bits)
        if labels.min() == labels.max():
            continue
        cost = sum(((x[labels == j] - x[labels == j].mean(axis=0)) ** 2).sum() for j in (0, 1))
        best = min(best, cost)
    return best


def test_kmeanspp_distinct_centroids():
    x = np.random.default_rng(0).normal(size=(40, 2))
    for seed in range(100):
        c = kmeanspp_init(x, 2, seed=seed)
        assert not np.array_equal(c[0], c[1])


def test_kmeanspp_all_duplicates():
    x = np.ones((5, 3))
    c = kmeanspp_init(x, 3, seed=1)
    assert c.shape == (3, 3)
    result = lloyd(x, 3, c)
    assert result.objective == 0.0


def test_assign_ties_go_to_lowest_index():
    labels, dist = assign(np.array([[0.5]]), np.array([[0.0], [1.0]]))
    assert labels[0] == 0
    assert dist[0] == pytest.approx(0.25)


def test_empty_cluster_is_reseeded():
    x = np.array([[0.0], [1.0], [10.0], [11.0]])
    result = lloyd(x, 3, np.array([[0.0], [1.0], [100.0]]))
    assert set(result.labels.tolist()) == {0, 1, 2}
    assert result.objective == pytest.approx(0.5)
    assert result.k == 3


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), k=st.integers(1, 6))
def test_lloyd_objective_nonincreasing(seed, k):
    r = np.random.default_rng(seed)
    x = r.normal(size=(30, 3))
    result = lloyd(x, k, kmeanspp_init(x, k, seed=seed))
    hist = np.array(result.objective_history)
    assert np.all(np.diff(hist) <= 1e-9 * hist[:-1])
    assert result.objective == pytest.approx(hist[-1])
    assert result.labels.min() >= 0 and result.labels.max() < k


def test_fit_kmeans_matches_brute_force():
    r = np.random.default_rng(2024)
    matched = 0
    for _ in range(100):
        x = r.normal(size=(6, 2))
        best = _brute_force_two_partition(x)
        result = fit_kmeans(x, 2, seed=int(r.integers(1000)), restarts=10)
        matched += result.objective <= best * (1 + 1e-9) + 1e-12
    assert matched >= 95


def test_fit_kmeans_on_blobs(blobs):
    result = fit_kmeans(blobs.features, 3, seed=0)
    # 각 덩어리는 한 cluster
    for c in range(3):
        assert len(np.unique(result.labels[blobs.labels == c])) == 1
    assert len(np.unique(result.labels)) == 3


def test_fit_kmeans_deterministic(moons):
    a = fit_kmeans(moons.features, 4, seed=3, restarts=3)
    b = fit_kmeans(moons.features, 4, seed=3, restarts=3)
    np.testing.assert_array_equal(a.labels, b.labels)


def test_labels_invariant_under_uniform_rescaling():
    x = np.random.default_rng(12).normal(size=(60, 3))
    c = 4.0
    init = kmeanspp_init(x, 4, seed=2)
    np.testing.assert_array_equal(lloyd(x * c, 4, init * c).labels, lloyd(x, 4, init).labels)
    np.testing.assert_array_equal(fit_kmeans(x * c, 4, seed=2, restarts=3).labels,
                                  fit_kmeans(x, 4, seed=2, restarts=3).labels)

def test_bad_arguments():
    x = np.zeros((3, 2))
    with pytest.raises(ParameterError):
        kmeanspp_init(x, 4)
    with pytest.raises(ParameterError):
        lloyd(x, 2, np.zeros((3, 2)))
    with pytest.raises(ParameterError):
        fit_kmeans(x, 2, restarts=0)
    with pytest.raises(ParameterError):
        fit_kmeans(np.array([[np.nan, 1.0]]), 1)
