"""
Seeded random walk instances for the invariant suite.

The twenty instances cover cycles, complete graphs, bouquets, a small torus
and random connected graphs with at most twelve vertices. Coins are Grover,
moving-shift Grover and random two-point-spectrum unitaries, with both
generic eigenvalue pairs and antipodal ones (``kappa + kappa' = 0``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coins import (
    CoinAssignment,
    from_flipflop_coin,
    grover_coins,
    moving_grover_coins,
    random_two_point_coin,
)
from .graph import (
    ArcPermutation,
    Graph,
    bouquet,
    complete,
    cycle,
    hypercubic_torus,
    random_connected_graph,
    random_shift_permutation,
)
from .lattice import torus_moving_walk
from .walk import OneForm

__all__ = [
    "Instance",
    "random_instances",
    "random_shift_instances",
    "random_one_form",
    "random_coins",
    "random_kappas",
]


@dataclass
class Instance:
    """
    One walk ``U = S C``.

    ``coins`` are the coins applied together with ``shift``. For a general
    shift permutation their declared ``(kappa, kappa', p)`` describe the
    flip-flop form, which is what the spectral map acts on.
    """

    name: str
    graph: Graph
    coins: CoinAssignment
    shift: Optional[object] = None


def random_kappas(rng, antipodal: bool = False):
    """Two distinct unit-modulus numbers; ``antipodal`` forces ``kappa' = -kappa``."""
    xi = rng.uniform(0, 2 * np.pi)
    if antipodal:
        return np.exp(1j * xi), -np.exp(1j * xi)
    eta = xi + rng.uniform(0.3, 2 * np.pi - 0.3)
    return np.exp(1j * xi), np.exp(1j * eta)


def random_coins(g: Graph, p: int, rng, antipodal: bool = False) -> CoinAssignment:
    kappa, kappa_prime = random_kappas(rng, antipodal)
    mats = tuple(random_two_point_coin(g.degree(u), p, kappa, kappa_prime, rng)
                 for u in range(g.n_vertices))
    return CoinAssignment(mats, kappa=kappa, kappa_prime=kappa_prime, p=p)


def random_one_form(g: Graph, rng) -> OneForm:
    theta = np.empty(g.n_arcs)
    theta[0::2] = rng.uniform(0, 2 * np.pi, g.n_edges)
    theta[1::2] = -theta[0::2]
    return OneForm(theta)


def _general_shift(name, g, flipflop_coins, rng) -> Instance:
    pi = random_shift_permutation(g, rng)
    return Instance(name, g, from_flipflop_coin(g, pi, flipflop_coins), pi)


def random_instances(seed: int = 0, count: int = 20) -> list:
    """Deterministic list of instances for a seed; ``count`` may be at most 20."""
    rng = np.random.default_rng(seed)
    out = []

    g = cycle(5)
    out.append(Instance("cycle5_grover", g, grover_coins(g)))
    g = complete(4)
    out.append(Instance("complete4_grover", g, grover_coins(g)))
    g = complete(5)
    out.append(Instance("complete5_random_p2", g, random_coins(g, 2, rng)))
    g = bouquet(3)
    out.append(Instance("bouquet3_moving_case_i", g, moving_grover_coins(g, -1.0, 1.0)))
    g = bouquet(2)
    out.append(Instance("bouquet2_moving_case_ii", g, moving_grover_coins(g, 1.0, -1.0)))
    g = hypercubic_torus(2, 3)
    out.append(Instance("torus2x3_grover", g, grover_coins(g)))

    tw = torus_moving_walk(2, 3, "case_i")
    ff = tw.flipflop_coins
    labelled = CoinAssignment(tw.moving_coins.matrices, kappa=ff.kappa,
                              kappa_prime=ff.kappa_prime, p=ff.p)
    out.append(Instance("torus2x3_moving_shift", tw.graph, labelled, tw.shift))

    g = hypercubic_torus(2, 3)
    out.append(Instance("torus2x3_twisted_grover", g, grover_coins(g), random_one_form(g, rng)))
    g = random_connected_graph(8, 4, rng)
    out.append(Instance("random8_antipodal", g, random_coins(g, 1, rng, antipodal=True)))
    g = random_connected_graph(10, 6, rng)
    out.append(Instance("random10_grover", g, grover_coins(g)))
    g = cycle(6)
    out.append(Instance("cycle6_random", g, random_coins(g, 1, rng)))
    g = complete(6)
    out.append(Instance("complete6_random_p3", g, random_coins(g, 3, rng)))
    g = random_connected_graph(12, 8, rng)
    out.append(_general_shift("random12_general_shift", g, random_coins(g, 1, rng), rng))
    g = bouquet(4)
    out.append(Instance("bouquet4_twisted_random_p2", g, random_coins(g, 2, rng),
                        random_one_form(g, rng)))
    g = cycle(1)
    out.append(Instance("cycle1_grover", g, grover_coins(g)))
    g = complete(3)
    out.append(_general_shift("complete3_general_shift", g, grover_coins(g), rng))
    g = random_connected_graph(6, 3, rng)
    out.append(Instance("random6_antipodal_unit", g, random_coins(g, 1, rng, antipodal=True)))
    g = bouquet(3)
    out.append(Instance("bouquet3_twisted_case_ii", g, moving_grover_coins(g, 1.0, -1.0),
                        random_one_form(g, rng)))
    g = complete(7)
    out.append(Instance("complete7_grover", g, grover_coins(g)))
    g = random_connected_graph(9, 5, rng)
    out.append(Instance("random9_twisted", g, random_coins(g, 1, rng), random_one_form(g, rng)))

    if not 1 <= count <= len(out):
        raise ValueError(f"count must be between 1 and {len(out)}, got {count}")
    return out[:count]


def random_shift_instances(seed: int = 0, count: int = 20) -> list:
    """``(graph, pi, coins)`` triples with random shifts and random unitary coins."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        kind = i % 3
        if kind == 0:
            g = random_connected_graph(int(rng.integers(3, 10)), int(rng.integers(0, 6)), rng)
        elif kind == 1:
            g = complete(int(rng.integers(3, 7)))
        else:
            g = bouquet(int(rng.integers(1, 5)))
        pi: ArcPermutation = random_shift_permutation(g, rng)
        out.append((g, pi, random_coins(g, 1, rng)))
    return out
