"""
Boundary operator K and the discriminant T = K* S K.

``K`` maps C^{p|V|} (vertex-major, basis-index minor) into C^A. Row ``a`` is
supported on the ``p`` columns of ``t(a)`` and equals ``w(a)*`` there, where
``w(a)_i = conj(alpha_{t(a)}^(i)(a))``. Each block ``(T)_{u,v}`` is the sum
of the matrix weights ``W(a) = w(a) w(inv a)*`` over arcs from ``v`` to
``u``; a twisted shift multiplies ``W(a)`` by ``exp(i theta(a))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coins import KernelBasis
from .exceptions import ShiftError
from .graph import Graph
from .walk import ShiftMatrix

__all__ = [
    "BoundaryOperator",
    "Discriminant",
    "weight_vector",
    "matrix_weight",
    "build_boundary",
    "build_discriminant",
    "block_formula",
    "verify_coin_identity",
    "isometry_residual",
    "path_sum_check",
    "stochastic_sums",
    "conservation_residual",
]


@dataclass(frozen=True)
class BoundaryOperator:
    """The ``|A| x p|V|`` isometry built from the kernel CONS."""

    K: np.ndarray
    p: int
    n_vertices: int

    def block(self, u: int) -> slice:
        return slice(self.p * u, self.p * (u + 1))


@dataclass(frozen=True)
class Discriminant:
    """
    Hermitian ``p|V| x p|V|`` matrix with ``p x p`` blocks.

    ``block_residual`` records the entrywise gap between ``K* S K`` and the
    arc-sum block formula.
    """

    T: np.ndarray
    p: int
    block_residual: float = 0.0

    def block(self, u: int, v: int) -> np.ndarray:
        p = self.p
        return self.T[p * u:p * (u + 1), p * v:p * (v + 1)]

    @property
    def hermitian_residual(self) -> float:
        return float(np.abs(self.T - self.T.conj().T).max()) if self.T.size else 0.0


def weight_vector(g: Graph, cons: KernelBasis, a: int) -> np.ndarray:
    """``w(a) = [conj(alpha_{t(a)}^(i)(a))]_i``."""
    pos = g.local_index()[a]
    return np.conj(cons.vectors[g.terminus[a]][pos, :])


def matrix_weight(g: Graph, cons: KernelBasis, a: int) -> np.ndarray:
    """``W(a) = w(a) w(inv a)*``; rank at most one."""
    return np.outer(weight_vector(g, cons, a), np.conj(weight_vector(g, cons, g.inv[a])))


def build_boundary(g: Graph, cons: KernelBasis) -> BoundaryOperator:
    p = cons.p
    K = np.zeros((g.n_arcs, p * g.n_vertices), dtype=complex)
    pos = g.local_index()
    for a in range(g.n_arcs):
        u = g.terminus[a]
        K[a, p * u:p * (u + 1)] = cons.vectors[u][pos[a], :]
    return BoundaryOperator(K, p, g.n_vertices)


def _arc_phases(g: Graph, S: ShiftMatrix) -> np.ndarray:
    if not S.is_involution:
        raise ShiftError(
            "the discriminant needs a flip-flop or twisted shift; "
            "convert general permutations with to_flipflop_coin first"
        )
    return S.matrix[np.arange(g.n_arcs), g.inv]


def block_formula(g: Graph, boundary: BoundaryOperator, S: ShiftMatrix) -> np.ndarray:
    """Assemble ``T`` arc by arc (multi-edges and loops summed, never looked up)."""
    p = boundary.p
    K = boundary.K
    phase = _arc_phases(g, S)
    T = np.zeros((p * g.n_vertices, p * g.n_vertices), dtype=complex)
    for a in range(g.n_arcs):
        u, v, b = g.terminus[a], g.origin[a], g.inv[a]
        w_a = np.conj(K[a, p * u:p * (u + 1)])
        w_b = np.conj(K[b, p * v:p * (v + 1)])
        T[p * u:p * (u + 1), p * v:p * (v + 1)] += phase[a] * np.outer(w_a, np.conj(w_b))
    return T


def build_discriminant(g: Graph, boundary: BoundaryOperator, S: ShiftMatrix) -> Discriminant:
    """``T = K* S K``, cross-checked against :func:`block_formula`."""
    K = boundary.K
    if S.matrix.shape[0] != K.shape[0]:
        raise ShiftError(
            f"shift has size {S.matrix.shape[0]}, boundary operator has {K.shape[0]} rows"
        )
    T = K.conj().T @ S.matrix @ K
    blocks = block_formula(g, boundary, S)
    resid = float(np.abs(T - blocks).max()) if T.size else 0.0
    return Discriminant(T, boundary.p, resid)


def isometry_residual(boundary: BoundaryOperator) -> float:
    """``max |K*K - I|``."""
    K = boundary.K
    return float(np.abs(K.conj().T @ K - np.eye(K.shape[1])).max())


def verify_coin_identity(boundary: BoundaryOperator, C, kappa, kappa_prime) -> float:
    """Spectral norm of ``C - (kappa - kappa') K K* - kappa' I``."""
    K = boundary.K if isinstance(boundary, BoundaryOperator) else np.asarray(boundary)
    C = np.asarray(C)
    rhs = (kappa - kappa_prime) * (K @ K.conj().T) + kappa_prime * np.eye(C.shape[0])
    return float(np.linalg.norm(C - rhs, 2))


def path_sum_check(g: Graph, boundary: BoundaryOperator, S: ShiftMatrix, n: int) -> float:
    """
    Compare ``T^n`` with the explicit sum over arc paths of length ``n``.

    ``(T^n)_{u,v} = sum W(a_n) ... W(a_1)`` over paths with ``o(a_1) = v``,
    ``t(a_i) = o(a_{i+1})`` and ``t(a_n) = u``.
    """
    if not 1 <= n <= 4:
        raise ValueError(f"path sums are enumerated for 1 <= n <= 4, got {n}")
    p = boundary.p
    K = boundary.K
    phase = _arc_phases(g, S)
    weights = []
    for a in range(g.n_arcs):
        u, v, b = g.terminus[a], g.origin[a], g.inv[a]
        w_a = np.conj(K[a, p * u:p * (u + 1)])
        w_b = np.conj(K[b, p * v:p * (v + 1)])
        weights.append(phase[a] * np.outer(w_a, np.conj(w_b)))
    out_arcs = [g.outgoing(u) for u in range(g.n_vertices)]

    total = np.zeros((p * g.n_vertices, p * g.n_vertices), dtype=complex)
    stack = [(int(a), weights[a], int(g.origin[a]), 1) for a in range(g.n_arcs)]
    while stack:
        a, prod, start, length = stack.pop()
        if length == n:
            u = g.terminus[a]
            total[p * u:p * (u + 1), p * start:p * (start + 1)] += prod
            continue
        for b in out_arcs[g.terminus[a]]:
            stack.append((int(b), weights[b] @ prod, start, length + 1))

    T = K.conj().T @ S.matrix @ K
    return float(np.abs(np.linalg.matrix_power(T, n) - total).max())


def stochastic_sums(g: Graph, disc: Discriminant):
    """
    Max deviation of block-row sums ``sum_v (T)_{u,v}`` and block-column sums
    ``sum_u (T)_{u,v}`` from ``I_p``.

    Informative only: the doubly-stochastic property needs regular Grover-type
    coins with ``w(a) = w(inv a)``.
    """
    p, n = disc.p, g.n_vertices
    blocks = disc.T.reshape(n, p, n, p)
    row = blocks.sum(axis=2)  # (u, i, j)
    col = blocks.sum(axis=0)  # (i, v, j)
    eye = np.eye(p)
    row_res = max(float(np.abs(row[u] - eye).max()) for u in range(n))
    col_res = max(float(np.abs(col[:, v, :] - eye).max()) for v in range(n))
    return row_res, col_res


def conservation_residual(disc: Discriminant, f: np.ndarray) -> float:
    """``max_j |sum_u (Tf)_j(u) - sum_u f_j(u)|``."""
    p = disc.p
    f = np.asarray(f, dtype=complex)
    tf = disc.T @ f
    return float(np.abs(tf.reshape(-1, p).sum(axis=0) - f.reshape(-1, p).sum(axis=0)).max())
