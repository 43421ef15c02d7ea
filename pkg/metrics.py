# -*- coding: utf-8 -*-

"""
clustering 평가 지표.

  purity = (1/n) * sum_j max_i |C^i ∩ X^j|
  nmi    = I(C; X) / sqrt(H(C) H(X))   (자연로그, 기하평균 정규화)
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import entropy
from sklearn.metrics import mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from errors import ParameterError


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray    # L x K (class x cluster)
    classes: np.ndarray
    clusters: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())


def _cluster_labels(assignment) -> np.ndarray:
    # ClusterAssignment 또는 label 배열 둘 다 받음
    return np.asarray(getattr(assignment, "labels", assignment)).ravel()


def contingency_table(assignment, labels) -> ContingencyTable:
    pred = _cluster_labels(assignment)
    true = np.asarray(labels).ravel()
    if pred.shape != true.shape:
        raise ParameterError(f"length mismatch: {pred.size} cluster labels vs {true.size} class labels")
    if pred.size == 0:
        raise ParameterError("need at least one point")
    counts = contingency_matrix(true, pred)
    return ContingencyTable(counts=np.asarray(counts), classes=np.unique(true), clusters=np.unique(pred))


def purity(assignment, labels) -> float:
    table = contingency_table(assignment, labels)
    return float(table.counts.max(axis=0).sum() / table.n)


def nmi(assignment, labels) -> float:
    table = contingency_table(assignment, labels)
    counts = table.counts
    h_class = entropy(counts.sum(axis=1))
    h_cluster = entropy(counts.sum(axis=0))

    # 둘 다 한 덩어리면 완전 일치로 본다 (0/0 -> 1)
    if h_class == 0 and h_cluster == 0:
        return 1.0
    if h_class == 0 or h_cluster == 0:
        return 0.0

    mi = mutual_info_score(None, None, contingency=counts)
    return float(np.clip(mi / np.sqrt(h_class * h_cluster), 0.0, 1.0))
