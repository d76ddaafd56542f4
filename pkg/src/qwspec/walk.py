"""
Explicit evolution matrices ``U = S C`` on C^A and the dense spectral oracle.

Operators act on column vectors; entry ``(r, c)`` is ``<delta_r, X delta_c>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.linalg import schur

from .coins import CoinAssignment
from .exceptions import CapExceeded, CoinError, ShiftError
from .graph import ArcPermutation, Graph, validate_shift_permutation
from .numerics import cluster_circle

__all__ = [
    "OneForm",
    "ShiftMatrix",
    "EvolutionMatrix",
    "DenseSpectrum",
    "shift_matrix",
    "coin_matrix",
    "evolution",
    "walk_matrix",
    "dense_spectrum",
    "DENSE_CAP",
]

DENSE_CAP = 4096


@dataclass(frozen=True)
class OneForm:
    """Arc phases ``theta`` with ``theta(inv(a)) = -theta(a)``."""

    theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))

    def check(self, g: Graph, tol: float = 1e-12) -> None:
        if self.theta.shape != (g.n_arcs,):
            raise ShiftError(
                f"one-form has {self.theta.size} entries, graph has {g.n_arcs} arcs"
            )
        bad = np.flatnonzero(np.abs(self.theta[g.inv] + self.theta) > tol)
        if bad.size:
            a = int(bad[0])
            raise ShiftError(
                f"one-form is not antisymmetric at arc {a}: "
                f"theta(a) = {self.theta[a]}, theta(inv a) = {self.theta[g.inv[a]]}",
                arc=a,
            )


@dataclass(frozen=True)
class ShiftMatrix:
    """``tag`` is ``"flipflop"``, ``"general_permutation"`` or ``"twisted"``."""

    matrix: np.ndarray
    tag: str
    theta: Optional[np.ndarray] = None

    @property
    def is_involution(self) -> bool:
        return self.tag in ("flipflop", "twisted")


@dataclass(frozen=True)
class EvolutionMatrix:
    matrix: np.ndarray
    shift_tag: str


def shift_matrix(
    g: Graph, shift: Union[None, str, ArcPermutation, OneForm] = None
) -> ShiftMatrix:
    """
    Shift operator on C^A.

    ``None`` or ``"flipflop"`` gives ``S_0 delta_a = delta_{inv a}``; an
    :class:`ArcPermutation` gives ``S_pi delta_a = delta_{pi(a)}``; a
    :class:`OneForm` gives the twisted shift
    ``(S_theta psi)(a) = exp(i theta(a)) psi(inv a)``.
    """
    n = g.n_arcs
    a = np.arange(n)
    s = np.zeros((n, n), dtype=complex)
    if shift is None or (isinstance(shift, str) and shift == "flipflop"):
        s[g.inv, a] = 1.0
        return ShiftMatrix(s, "flipflop")
    if isinstance(shift, ArcPermutation):
        validate_shift_permutation(g, shift)
        s[shift.perm, a] = 1.0
        tag = "flipflop" if np.array_equal(shift.perm, g.inv) else "general_permutation"
        return ShiftMatrix(s, tag)
    if isinstance(shift, OneForm):
        shift.check(g)
        s[a, g.inv] = np.exp(1j * shift.theta)
        return ShiftMatrix(s, "twisted", shift.theta.copy())
    raise ShiftError(f"unsupported shift argument {shift!r}")


def coin_matrix(g: Graph, coins: CoinAssignment) -> np.ndarray:
    """Block-diagonal ``C = sum_u chi_u* C_u chi_u`` in arc-index basis."""
    coins.check_graph(g)
    c = np.zeros((g.n_arcs, g.n_arcs), dtype=complex)
    for u, inc in enumerate(g.incoming):
        c[np.ix_(inc, inc)] = coins.matrices[u]
    return c


def evolution(S, C) -> EvolutionMatrix:
    """``U = S C``."""
    s_mat = S.matrix if isinstance(S, ShiftMatrix) else np.asarray(S)
    c_mat = np.asarray(C)
    if s_mat.shape != c_mat.shape:
        raise CoinError(f"shift {s_mat.shape} and coin {c_mat.shape} sizes differ")
    tag = S.tag if isinstance(S, ShiftMatrix) else "matrix"
    return EvolutionMatrix(s_mat @ c_mat, tag)


def walk_matrix(g: Graph, coins: CoinAssignment, shift=None) -> np.ndarray:
    """Convenience: the bare evolution matrix for ``(g, coins, shift)``."""
    return evolution(shift_matrix(g, shift), coin_matrix(g, coins)).matrix


@dataclass
class DenseSpectrum:
    """
    Brute-force spectrum of a unitary matrix.

    ``eigenvalues[i]`` belongs to the orthonormal column ``eigenvectors[:, i]``;
    ``clusters`` lists ``(representative, multiplicity, diameter)``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clusters: list


def dense_spectrum(U, tol_cluster: float = 1e-8, cap: int = DENSE_CAP) -> DenseSpectrum:
    """
    Complex Schur decomposition of a unitary matrix.

    For a normal matrix the Schur form is diagonal, so the Schur vectors are
    orthonormal eigenvectors. Eigenvalues are projected onto the unit circle
    and clustered greedily by angle.
    """
    u = U.matrix if isinstance(U, EvolutionMatrix) else np.asarray(U, dtype=complex)
    n = u.shape[0]
    if n > cap:
        raise CapExceeded(f"matrix size {n} exceeds dense cap {cap}")
    if n == 0:
        return DenseSpectrum(np.zeros(0, complex), np.zeros((0, 0), complex), [])
    t, z = schur(u, output="complex")
    ev = np.diag(t).copy()
    ev = ev / np.abs(ev)
    clusters = []
    for idx in cluster_circle(ev, tol_cluster):
        vals = ev[idx]
        rep = vals.mean()
        rep = rep / abs(rep)
        diam = float(np.abs(np.angle(vals * np.conj(rep))).max() * 2) if idx.size > 1 else 0.0
        clusters.append((complex(rep), int(idx.size), diam))
    return DenseSpectrum(ev, z, clusters)
