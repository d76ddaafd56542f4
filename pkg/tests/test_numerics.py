import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from qwspec.numerics import (
    angular_distance,
    cluster_circle,
    cluster_real,
    match_circle_multisets,
    operator_norm,
)


def test_cluster_real_groups_and_order():
    groups = cluster_real([0.5, -1.0, 0.5 + 1e-12, -1.0 + 3e-12, 0.1], 1e-9)
    assert [sorted(g.tolist()) for g in groups] == [[1, 3], [4], [0, 2]]


def test_cluster_real_empty():
    assert cluster_real([], 1e-8) == []


def test_cluster_circle_merges_across_branch_cut():
    z = np.exp(1j * np.array([np.pi - 1e-12, -np.pi + 1e-12, 0.0]))
    groups = cluster_circle(z, 1e-9)
    assert sorted(sorted(g.tolist()) for g in groups) == [[0, 1], [2]]


def test_angular_distance_wraps():
    assert np.isclose(angular_distance(np.exp(3.1j), np.exp(-3.1j)), 2 * np.pi - 6.2)


def test_match_multiset_permutation_invariant(rng):
    a = np.exp(1j * rng.uniform(0, 2 * np.pi, 9))
    assert match_circle_multisets(a, rng.permutation(a)) <= 1e-15


def test_match_detects_multiplicity_difference():
    a = np.array([1, 1, -1], dtype=complex)
    b = np.array([1, -1, -1], dtype=complex)
    assert np.isclose(match_circle_multisets(a, b), np.pi)
    assert match_circle_multisets(a, b[:2]) == float("inf")
    assert match_circle_multisets([], []) == 0.0


@given(st.lists(st.floats(-np.pi, np.pi), min_size=1, max_size=8), st.floats(0, 1e-3))
def test_match_bounded_by_rotation(phases, shift):
    a = np.exp(1j * np.asarray(phases))
    assert match_circle_multisets(a, a * np.exp(1j * shift)) <= shift + 1e-12


def test_operator_norm():
    assert operator_norm(np.zeros((0, 0))) == 0.0
    assert np.isclose(operator_norm(np.diag([3.0, -4.0])), 4.0)
