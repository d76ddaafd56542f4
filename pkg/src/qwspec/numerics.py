"""
Small numerical helpers shared across modules.

Clustering of eigenvalues (on the real line and on the unit circle) and
multiset matching on the unit circle.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "cluster_real",
    "cluster_circle",
    "angular_distance",
    "match_circle_multisets",
    "operator_norm",
]


def operator_norm(a: np.ndarray) -> float:
    """Spectral norm; 0.0 for empty matrices."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def cluster_real(values, tol: float):
    """
    Greedy clustering of real values.

    Sorted values are chained into one cluster while consecutive gaps stay
    within ``tol``. Returns a list of index arrays (into ``values``) ordered
    by ascending value.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return []
    order = np.argsort(values, kind="stable")
    groups = [[order[0]]]
    for prev, cur in zip(order[:-1], order[1:]):
        if values[cur] - values[prev] <= tol:
            groups[-1].append(cur)
        else:
            groups.append([cur])
    return [np.array(g, dtype=int) for g in groups]


def angular_distance(a, b):
    """Absolute angle between unit complex numbers (broadcasting)."""
    return np.abs(np.angle(np.asarray(a) * np.conj(np.asarray(b))))


def cluster_circle(values, tol: float):
    """
    Greedy clustering of points on the unit circle by angle.

    Works like :func:`cluster_real` on the phases, then merges the first and
    last cluster when they touch across the branch cut at +-pi.
    """
    values = np.asarray(values, dtype=complex)
    if values.size == 0:
        return []
    phases = np.angle(values)
    groups = [list(g) for g in cluster_real(phases, tol)]
    if len(groups) > 1:
        first, last = groups[0], groups[-1]
        gap = phases[first[0]] + 2.0 * np.pi - phases[last[-1]]
        if gap <= tol:
            groups[0] = last + first
            groups.pop()
    return [np.array(g, dtype=int) for g in groups]


def _cyclic_sorted_bottleneck(a: np.ndarray, b: np.ndarray) -> float:
    """Best maximum displacement over the cyclic shifts of the sorted phases."""
    pa = np.sort(np.mod(np.angle(a), 2.0 * np.pi))
    pb = np.sort(np.mod(np.angle(b), 2.0 * np.pi))
    best = np.inf
    for s in range(pa.size):
        diff = np.abs(pa - np.roll(pb, s))
        best = min(best, float(np.minimum(diff, 2.0 * np.pi - diff).max()))
    return best


def match_circle_multisets(a, b) -> float:
    """
    Maximum angular displacement of a matching between two equal-size
    multisets of unit complex numbers.

    Two candidate matchings are tried, the minimum-total-cost assignment and
    the best order-preserving matching of the sorted phases, and the smaller
    maximum displacement is returned. The result is therefore an upper bound
    on the bottleneck distance that is tight in practice. Returns ``inf`` if
    the sizes differ.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        return float("inf")
    if a.size == 0:
        return 0.0
    cost = angular_distance(a[:, None], b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return min(float(cost[rows, cols].max()), _cyclic_sorted_bottleneck(a, b))
