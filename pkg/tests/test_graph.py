import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwspec.exceptions import GraphError, ShiftError
from qwspec.graph import (
    ArcPermutation,
    bouquet,
    build_graph,
    complete,
    cycle,
    flipflop_permutation,
    graph_to_json,
    hypercubic_torus,
    load_graph,
    random_connected_graph,
    random_shift_permutation,
    standard_graph,
    torus_coordinates,
    validate_shift_permutation,
)
from qwspec.lattice import torus_moving_walk


def test_single_edge():
    g = build_graph([(0, 1)], 2)
    assert g.n_arcs == 2
    assert g.inv.tolist() == [1, 0]
    assert g.degree(0) == g.degree(1) == 1


def test_cycle_four_degrees():
    g = build_graph([(0, 1), (1, 2), (2, 3), (3, 0)], 4)
    assert g.n_arcs == 8
    assert g.degrees.tolist() == [2, 2, 2, 2]


def test_bouquet_loops_give_two_arcs_each():
    g = build_graph([(0, 0)] * 3, 1)
    assert (g.n_vertices, g.n_arcs, g.degree(0)) == (1, 6, 6)
    assert not np.any(g.inv == np.arange(6))
    assert bouquet(3).edges == g.edges


def test_complete_four():
    g = standard_graph("complete", 4)
    assert (g.n_edges, g.n_arcs) == (6, 12)
    assert set(g.degrees.tolist()) == {3}


def test_torus_three_by_four():
    g = hypercubic_torus(3, 4)
    assert g.n_vertices == 64
    assert set(g.degrees.tolist()) == {6}
    assert g.is_connected()


@pytest.mark.parametrize("N", [1, 2])
def test_small_torus_rejected(N):
    with pytest.raises(GraphError):
        hypercubic_torus(2, N)


def test_out_of_range_vertex():
    with pytest.raises(GraphError, match="out of range"):
        build_graph([(0, 2)], 2)


@pytest.mark.parametrize("kind,params", [("cycle", (0,)), ("wheel", (3,)), ("complete", (1,))])
def test_standard_graph_bad_input(kind, params):
    with pytest.raises(GraphError):
        standard_graph(kind, *params)


def test_torus_coordinates_round_trip():
    d, N = 3, 4
    g = hypercubic_torus(d, N)
    for a in range(g.n_arcs):
        diff = (np.array(torus_coordinates(g.terminus[a], d, N))
                - torus_coordinates(g.origin[a], d, N)) % N
        assert sorted(diff.tolist()) in ([0, 0, 1], [0, 0, N - 1])


def test_flipflop_always_valid():
    for g in (cycle(4), complete(5), bouquet(2), hypercubic_torus(2, 3)):
        validate_shift_permutation(g, flipflop_permutation(g))


def test_identity_permutation_rejected_with_arc():
    g = cycle(4)
    with pytest.raises(ShiftError) as info:
        validate_shift_permutation(g, ArcPermutation(np.arange(g.n_arcs)))
    assert info.value.arc == 0


def test_non_bijective_permutation_rejected():
    g = cycle(3)
    perm = g.inv.copy()
    perm[1] = perm[0]
    with pytest.raises(ShiftError, match="injective"):
        validate_shift_permutation(g, ArcPermutation(perm))


def test_moving_shift_valid_on_torus():
    tw = torus_moving_walk(3, 4)
    g = tw.graph
    validate_shift_permutation(g, tw.shift)
    # independent check: every arc continues in its own direction
    for a in range(g.n_arcs):
        b = tw.shift.perm[a]
        assert g.origin[b] == g.terminus[a]
        assert tw.labels[b] == tw.labels[a]


def test_random_shift_permutation_valid(rng):
    for _ in range(5):
        g = random_connected_graph(7, 4, rng)
        validate_shift_permutation(g, random_shift_permutation(g, rng))


def test_json_round_trip(tmp_path):
    g = build_graph([(0, 1), (1, 1), (1, 2), (0, 1)], 3)
    path = tmp_path / "g.json"
    path.write_text(json.dumps(graph_to_json(g)))
    h = load_graph(path)
    assert h.edges == g.edges
    assert np.array_equal(h.terminus, g.terminus)


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"edges": [[0, 1]]}))
    with pytest.raises(GraphError):
        load_graph(path)


def test_disconnected_detected():
    assert not build_graph([(0, 1), (2, 3)], 4).is_connected()
    assert cycle(1).is_connected()


edge_lists = st.integers(1, 6).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), min_size=1, max_size=12),
    )
)


@given(edge_lists)
def test_structural_invariants(data):
    n, edges = data
    used = {u for e in edges for u in e}
    # relabel to avoid isolated vertices, which the model rejects
    remap = {u: i for i, u in enumerate(sorted(used))}
    g = build_graph([(remap[u], remap[v]) for u, v in edges], len(used))
    a = np.arange(g.n_arcs)
    assert np.array_equal(g.inv[g.inv], a)
    assert np.array_equal(g.origin[g.inv], g.terminus)
    assert np.array_equal(g.terminus[g.inv], g.origin)
    assert g.degrees.sum() == g.n_arcs == 2 * len(edges)
    assert sorted(np.concatenate(g.incoming).tolist()) == a.tolist()
