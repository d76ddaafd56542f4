import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwspec.coins import (
    CoinAssignment,
    certify_two_point_spectrum,
    coins_from_json,
    from_flipflop_coin,
    grover_coins,
    grover_matrix,
    kernel_cons,
    load_coins,
    moving_grover_coins,
    moving_shift_coin,
    random_two_point_coin,
    to_flipflop_coin,
)
from qwspec.exceptions import CoinError, MultiplicityViolation, ShiftError, SpectrumViolation
from qwspec.graph import ArcPermutation, bouquet, complete, cycle, random_shift_permutation
from qwspec.lattice import torus_moving_walk
from qwspec.walk import walk_matrix


def eig_mults(m, tol=1e-8):
    """Independent multiplicity count of eigenvalues +1 and -1."""
    ev = np.linalg.eigvals(m)
    return int((abs(ev - 1) < tol).sum()), int((abs(ev + 1) < tol).sum())


def span_projector(v):
    q, _ = np.linalg.qr(v)
    return q @ q.conj().T


def test_grover_two_is_swap():
    assert np.array_equal(grover_matrix(2), np.array([[0, 1], [1, 0]]))


def test_grover_four_entries():
    g = grover_matrix(4)
    assert np.allclose(np.diag(g), -0.5)
    assert np.allclose(g[~np.eye(4, dtype=bool)], 0.5)


def test_grover_six_spectrum():
    assert eig_mults(grover_matrix(6)) == (1, 5)


def test_grover_rejects_zero():
    with pytest.raises(CoinError):
        grover_matrix(0)


def test_moving_coin_d1_is_identity():
    assert np.allclose(moving_shift_coin(1), np.eye(2))


@pytest.mark.parametrize("d,expected", [(2, (3, 1)), (3, (4, 2))])
def test_moving_coin_kernels(d, expected):
    assert eig_mults(moving_shift_coin(d)) == expected


@given(st.integers(1, 6))
def test_moving_coin_spectrum_property(d):
    c = moving_shift_coin(d)
    assert np.abs(c.conj().T @ c - np.eye(2 * d)).max() < 1e-12
    ev = np.linalg.eigvals(c)
    assert np.all(np.minimum(abs(ev - 1), abs(ev + 1)) < 1e-10)
    assert eig_mults(c) == (d + 1, d - 1)


def test_certify_grover_k4():
    assert certify_two_point_spectrum(grover_coins(complete(4))) == [(1, 2)] * 4


def test_certify_moving_case_i_bouquet():
    coins = moving_grover_coins(bouquet(3), kappa=-1.0, kappa_prime=1.0)
    assert coins.p == 2
    assert certify_two_point_spectrum(coins) == [(2, 4)]


def test_certify_rejects_stray_eigenvalue():
    c = np.diag([1.0, 1j, -1.0])
    coins = CoinAssignment((c,), kappa=1.0, kappa_prime=-1.0, p=1)
    with pytest.raises(SpectrumViolation) as info:
        certify_two_point_spectrum(coins)
    assert info.value.vertex == 0


def test_certify_rejects_wrong_multiplicity():
    coins = CoinAssignment((grover_matrix(3),), kappa=1.0, kappa_prime=-1.0, p=2)
    with pytest.raises(MultiplicityViolation):
        certify_two_point_spectrum(coins)


@pytest.mark.parametrize(
    "kwargs",
    [dict(kappa=1.0, kappa_prime=1.0), dict(kappa=2.0, kappa_prime=-1.0), dict(p=0)],
)
def test_assignment_parameter_checks(kwargs):
    with pytest.raises(CoinError):
        CoinAssignment((grover_matrix(3),), **kwargs)


def test_assignment_rejects_non_unitary():
    with pytest.raises(CoinError, match="unitary"):
        CoinAssignment((np.ones((2, 2)),))


def test_check_graph_sizes_and_p():
    g = cycle(4)
    with pytest.raises(CoinError, match="degree"):
        CoinAssignment(tuple(grover_matrix(3) for _ in range(4))).check_graph(g)
    with pytest.raises(CoinError, match="minimum degree"):
        CoinAssignment(tuple(grover_matrix(2) for _ in range(4)), p=3).check_graph(g)


def test_cons_case_i_span():
    coins = moving_grover_coins(bouquet(3), kappa=-1.0, kappa_prime=1.0)
    alpha = kernel_cons(coins).vectors[0]
    omega = np.exp(2j * np.pi / 3)
    ref = np.column_stack([np.kron(omega ** (j * np.arange(3)), [1, 1]) for j in (1, 2)]) / np.sqrt(6)
    assert np.allclose(span_projector(alpha), span_projector(ref), atol=1e-12)


def test_cons_case_ii_span():
    coins = moving_grover_coins(bouquet(3), kappa=1.0, kappa_prime=-1.0)
    alpha = kernel_cons(coins).vectors[0]
    cols = [np.ones(6) / np.sqrt(6)]
    for j in range(3):
        v = np.zeros(6)
        v[2 * j], v[2 * j + 1] = 1, -1
        cols.append(v / np.sqrt(2))
    assert np.allclose(span_projector(alpha), span_projector(np.column_stack(cols)), atol=1e-12)


def test_cons_grover_is_uniform():
    alpha = kernel_cons(grover_coins(complete(4))).vectors[0]
    assert np.allclose(alpha[:, 0], np.ones(3) / np.sqrt(3))


def test_cons_is_deterministic_and_canonical(rng):
    g = complete(5)
    mats = tuple(random_two_point_coin(4, 2, 1j, -1.0, rng) for _ in range(5))
    coins = CoinAssignment(mats, kappa=1j, kappa_prime=-1.0, p=2)
    a, b = kernel_cons(coins), kernel_cons(coins)
    coins.check_graph(g)
    a.check(coins)
    for va, vb in zip(a.vectors, b.vectors):
        assert np.array_equal(va, vb)
        pivots = [int(np.flatnonzero(abs(col) > 1e-12)[0]) for col in va.T]
        assert pivots == sorted(pivots)
        for col, piv in zip(va.T, pivots):
            assert abs(col[piv].imag) < 1e-14 and col[piv].real > 0


def test_random_two_point_coin_spectrum(rng):
    c = random_two_point_coin(5, 2, np.exp(0.3j), np.exp(2.1j), rng)
    ev = np.linalg.eigvals(c)
    assert int((abs(ev - np.exp(0.3j)) < 1e-10).sum()) == 2
    assert int((abs(ev - np.exp(2.1j)) < 1e-10).sum()) == 3


def test_flipflop_conversion_identity_for_flipflop():
    g = complete(4)
    coins = grover_coins(g)
    conv = to_flipflop_coin(g, ArcPermutation(g.inv), coins)
    for a, b in zip(coins.matrices, conv.matrices):
        assert np.array_equal(a, b)


def test_flipflop_conversion_torus_gives_sigma_grover():
    tw = torus_moving_walk(3, 3)
    g = tw.graph
    conv = to_flipflop_coin(g, tw.shift, tw.moving_coins)
    pos = g.local_index()
    target = moving_shift_coin(3)
    for u in range(g.n_vertices):
        idx = pos[tw.order[u]]
        assert np.allclose(conv.matrices[u][np.ix_(idx, idx)], target, atol=1e-14)


def test_flipflop_conversion_random_c4(rng):
    g = cycle(4)
    for _ in range(5):
        pi = random_shift_permutation(g, rng)
        coins = CoinAssignment(tuple(random_two_point_coin(2, 1, 1, -1, rng) for _ in range(4)))
        lhs = walk_matrix(g, coins, pi)
        rhs = walk_matrix(g, to_flipflop_coin(g, pi, coins))
        assert np.abs(lhs - rhs).max() <= 1e-12


def test_from_flipflop_inverts(rng):
    g = complete(4)
    pi = random_shift_permutation(g, rng)
    coins = CoinAssignment(tuple(random_two_point_coin(3, 1, 1, -1, rng) for _ in range(4)))
    back = to_flipflop_coin(g, pi, from_flipflop_coin(g, pi, coins))
    for a, b in zip(coins.matrices, back.matrices):
        assert np.allclose(a, b, atol=1e-15)


def test_flipflop_conversion_rejects_bad_shift():
    g = cycle(4)
    with pytest.raises(ShiftError):
        to_flipflop_coin(g, ArcPermutation(np.arange(8)), grover_coins(g))


def test_coin_json_kinds(tmp_path):
    g = complete(4)
    assert coins_from_json({"kind": "grover"}, g).p == 1
    b = bouquet(3)
    mg = coins_from_json({"kind": "moving_grover", "kappa": [-1, 0], "kappa_prime": [1, 0]}, b)
    assert mg.p == 2
    mat = [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"kind": "custom", "p": 1, "matrices": [mat] * 4}))
    custom = load_coins(path, cycle(4))
    assert np.allclose(custom.matrices[0], grover_matrix(2))


def test_coin_json_errors():
    with pytest.raises(CoinError):
        coins_from_json({"kind": "custom", "p": 1}, cycle(3))
    with pytest.raises(CoinError):
        coins_from_json({"kind": "hadamard"}, cycle(3))
