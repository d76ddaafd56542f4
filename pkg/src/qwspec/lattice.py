"""
Fourier-space analysis of the Grover walk with moving shift on Z^d.

In momentum space the walk lives on the bouquet of ``d`` loops: the local
basis is ordered ``(+1, -1, +2, -2, ..., +d, -d)``, the coin in flip-flop
form is ``sigma Gr(2d)`` and the shift is the twisted flip-flop
``(S(k) g)(eps j) = exp(i eps k_j) g(-eps j)``.

Two eigenvalue labellings of the coin are supported:

``case_i``
    ``(kappa, kappa') = (-1, 1)``, ``p = d - 1``; ``T(k)`` is
    ``(d-1) x (d-1)``.
``case_ii``
    ``(kappa, kappa') = (1, -1)``, ``p = d + 1``; ``T(k)`` is the
    ``(d+1) x (d+1)`` arrow matrix.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from math import factorial

import numpy as np

from .coins import CoinAssignment, KernelBasis, moving_shift_coin
from .exceptions import CoinError, GraphError, OracleMismatch
from .graph import ArcPermutation, Graph, hypercubic_torus, torus_coordinates
from .spectral import TOL_ORACLE, analyze

__all__ = [
    "CONVENTIONS",
    "Momentum",
    "EigenPolyCoeffs",
    "BandRow",
    "TorusWalk",
    "convention_parameters",
    "fourier_shift",
    "fourier_evolution",
    "case_i_cons",
    "case_ii_cons",
    "fourier_cons",
    "fourier_discriminant",
    "discriminant_case_i",
    "discriminant_case_ii",
    "closed_discriminant",
    "case_i_quadratic",
    "moving_quartic",
    "moving_sextic",
    "sign_switch_residual",
    "case_ii_d3_spectrum",
    "elementary_symmetric",
    "eigenpoly_coeffs",
    "pm1_multiplicity",
    "exceptional_counts",
    "grid_momenta",
    "band_row",
    "band_scan",
    "write_band_csv",
    "torus_moving_walk",
]

CONVENTIONS = ("case_i", "case_ii")
COS_TOL = 1e-12
MULT_TOL = 1e-9


@dataclass(frozen=True)
class Momentum:
    """A wave vector with every component in ``[0, 2 pi)``."""

    k: np.ndarray

    def __post_init__(self):
        k = np.atleast_1d(np.asarray(self.k, dtype=float))
        if k.ndim != 1 or k.size == 0:
            raise ValueError(f"momentum must be a non-empty vector, got shape {k.shape}")
        if not np.all(np.isfinite(k)) or np.any(k < 0) or np.any(k >= 2 * np.pi):
            raise ValueError(f"momentum components must lie in [0, 2pi), got {k.tolist()}")
        object.__setattr__(self, "k", k)

    @property
    def d(self) -> int:
        return self.k.size


def _momentum(d: int, k) -> np.ndarray:
    m = k if isinstance(k, Momentum) else Momentum(k)
    if m.d != d:
        raise ValueError(f"momentum has {m.d} components, expected {d}")
    return m.k


def convention_parameters(d: int, convention: str):
    """``(kappa, kappa', p)`` for a convention on the ``2d``-regular lattice."""
    if convention == "case_i":
        if d < 2:
            raise CoinError("case_i needs d >= 2: the -1 eigenspace of sigma Gr(2) is trivial")
        return -1.0, 1.0, d - 1
    if convention == "case_ii":
        if d < 1:
            raise CoinError(f"d must be >= 1, got {d}")
        return 1.0, -1.0, d + 1
    raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def fourier_shift(d: int, k) -> np.ndarray:
    """``S(k)`` with entry ``(eps j, -eps j)`` equal to ``exp(i eps k_j)``."""
    k = _momentum(d, k)
    s = np.zeros((2 * d, 2 * d), dtype=complex)
    for j in range(d):
        s[2 * j, 2 * j + 1] = np.exp(1j * k[j])
        s[2 * j + 1, 2 * j] = np.exp(-1j * k[j])
    return s


def fourier_evolution(d: int, k) -> np.ndarray:
    """``U(k) = S(k) sigma Gr(2d)``."""
    return fourier_shift(d, k) @ moving_shift_coin(d)


def case_i_cons(d: int) -> np.ndarray:
    """
    Columns ``(2d)^(-1/2) [1, w^m, ..., w^(m(d-1))] (x) [1, 1]`` for
    ``m = 1..d-1`` with ``w = exp(2 pi i / d)``.
    """
    convention_parameters(d, "case_i")
    omega = np.exp(2j * np.pi / d)
    j = np.arange(d)
    cols = [np.kron(omega ** (m * j), [1.0, 1.0]) for m in range(1, d)]
    return np.column_stack(cols) / np.sqrt(2 * d)


def case_ii_cons(d: int) -> np.ndarray:
    """The uniform vector, then ``e_j (x) [1, -1] / sqrt(2)`` for each axis."""
    convention_parameters(d, "case_ii")
    cols = [np.full(2 * d, 1.0 / np.sqrt(2 * d), dtype=complex)]
    for j in range(d):
        v = np.zeros(2 * d, dtype=complex)
        v[2 * j], v[2 * j + 1] = 1.0, -1.0
        cols.append(v / np.sqrt(2.0))
    return np.column_stack(cols)


def fourier_cons(d: int, convention: str) -> np.ndarray:
    return case_i_cons(d) if convention == "case_i" else case_ii_cons(d)


def fourier_discriminant(d: int, k, convention: str) -> np.ndarray:
    """``K_o* S(k) K_o`` built from the convention's CONS."""
    ko = fourier_cons(d, convention)
    return ko.conj().T @ fourier_shift(d, k) @ ko


def discriminant_case_i(d: int, k) -> np.ndarray:
    """
    Closed form ``T(k)_{mn} = (1/d) sum_j cos(k_j) w^((n - m)(j - 1))``.

    Equivalently ``2 sum_j cos(k_j) W_j`` with ``W_j = w_j w_j*``.
    """
    convention_parameters(d, "case_i")
    k = _momentum(d, k)
    omega = np.exp(2j * np.pi / d)
    m = np.arange(1, d)
    diff = m[None, :] - m[:, None]
    j = np.arange(d)
    phases = omega ** (diff[:, :, None] * j[None, None, :])
    return (phases * np.cos(k)[None, None, :]).sum(axis=2) / d


def discriminant_case_ii(d: int, k) -> np.ndarray:
    """The arrow matrix: corner ``(1/d) sum cos k_j``, border ``-+ i sin k_j / sqrt(d)``, diagonal ``-cos k_j``."""
    convention_parameters(d, "case_ii")
    k = _momentum(d, k)
    t = np.zeros((d + 1, d + 1), dtype=complex)
    t[0, 0] = np.cos(k).sum() / d
    t[0, 1:] = -1j * np.sin(k) / np.sqrt(d)
    t[1:, 0] = 1j * np.sin(k) / np.sqrt(d)
    t[np.arange(1, d + 1), np.arange(1, d + 1)] = -np.cos(k)
    return t


def closed_discriminant(d: int, k, convention: str) -> np.ndarray:
    if convention == "case_i":
        return discriminant_case_i(d, k)
    if convention == "case_ii":
        return discriminant_case_ii(d, k)
    raise ValueError(f"unknown convention {convention!r}")


def _gammas(k):
    c = np.cos(np.asarray(k, dtype=float))
    g1 = c.sum()
    g2 = (g1 * g1 - (c * c).sum()) / 2.0
    return g1, g2


def case_i_quadratic(k) -> np.ndarray:
    """For ``d = 3``, case i: ``mu^2 - (2/3) g1 mu + g2 / 3``."""
    g1, g2 = _gammas(_momentum(3, k))
    return np.array([1.0, -2.0 * g1 / 3.0, g2 / 3.0])


def moving_quartic(k) -> np.ndarray:
    """``l^4 + (4/3) g1 l^3 + (2 + (4/3) g2) l^2 + (4/3) g1 l + 1`` for ``d = 3``."""
    g1, g2 = _gammas(_momentum(3, k))
    return np.array([1.0, 4 * g1 / 3, 2 + 4 * g2 / 3, 4 * g1 / 3, 1.0])


def moving_sextic(k, monic: bool = True) -> np.ndarray:
    """
    Sextic for ``d = 3``: the quartic times ``(l^2 - 1)``.

    ``monic=False`` returns the ``(1 - l^2)`` form, which has the same roots
    but leading coefficient ``-1``.
    """
    poly = np.polymul([1.0, 0.0, -1.0], moving_quartic(k))
    return poly if monic else -poly


def sign_switch_residual(k, lam) -> float:
    """
    ``|l^-2 quartic(l) - 4 q(-(l + 1/l)/2)|`` with ``q`` the case i quadratic.

    Replacing ``l`` by ``-l`` maps the quartic onto the quadratic in
    ``mu = (l + 1/l) / 2``; this residual is identically zero.
    """
    lam = complex(lam)
    lhs = np.polyval(moving_quartic(k), lam) / lam**2
    rhs = 4.0 * np.polyval(case_i_quadratic(k), -(lam + 1.0 / lam) / 2.0)
    return float(abs(lhs - rhs))


def case_ii_d3_spectrum(k, reading: str = "symmetric") -> np.ndarray:
    """
    Closed-form spectrum of the ``d = 3`` arrow matrix, ascending.

    ``reading="symmetric"`` uses ``3 + sum cos 2k_j - 2 sum_{i<j} cos k_i cos k_j``
    under the root; ``reading="printed"`` doubles the ``cos k_y cos k_z`` term.
    Only the symmetric reading agrees with the matrix.
    """
    k = _momentum(3, k)
    c = np.cos(k)
    c2 = np.cos(2 * k)
    cross = c[0] * c[1] + c[1] * c[2] + c[2] * c[0]
    if reading == "printed":
        cross = c[0] * c[1] + 2 * c[1] * c[2] + c[2] * c[0]
    elif reading != "symmetric":
        raise ValueError(f"unknown reading {reading!r}")
    rad = 3 + c2.sum() - 2 * cross
    centre = -c.sum() / 3
    half = np.sqrt(2) / 6 * np.sqrt(complex(rad))
    vals = [-1.0, 1.0, centre - half, centre + half]
    return np.array(sorted(vals, key=lambda z: (np.real(z), np.imag(z))), dtype=complex)


def elementary_symmetric(values) -> np.ndarray:
    """``[e_0, e_1, ..., e_n]`` with ``e_0 = 1``."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return np.array([1.0])
    return np.real(np.poly(-values))


@dataclass(frozen=True)
class EigenPolyCoeffs:
    """
    Coefficients ``eta_1 .. eta_{d+1}`` of ``P(x) = x^(d+1) + eta_1 x^d + ... + eta_{d+1}``.

    ``eta_literal`` evaluates the same formula with the empty symmetric sum
    set to 0 rather than 1; it disagrees with the characteristic polynomial
    from ``eta_2`` on and is kept only to document that difference.
    """

    d: int
    eta: np.ndarray
    gamma: np.ndarray = field(repr=False)
    eta_literal: np.ndarray = field(repr=False)

    @property
    def poly(self) -> np.ndarray:
        return np.concatenate([[1.0], self.eta])

    def __call__(self, x):
        return np.polyval(self.poly, x)

    def roots(self) -> np.ndarray:
        """Companion-matrix roots, ascending by real part."""
        r = np.roots(self.poly)
        return r[np.argsort(r.real)]


def _eta(d: int, k: np.ndarray, gamma0: float) -> np.ndarray:
    c = np.cos(k)
    gamma = elementary_symmetric(np.concatenate([[-c.sum() / d], c]))
    sin2 = np.sin(k) ** 2
    sub = []
    for s in range(d):
        e = elementary_symmetric(np.delete(c, s))
        e[0] = gamma0
        sub.append(e)
    eta = np.empty(d + 1)
    eta[0] = gamma[1]
    for j in range(2, d + 2):
        eta[j - 1] = gamma[j] - sum(sub[s][j - 2] * sin2[s] for s in range(d)) / d
    return eta


def eigenpoly_coeffs(d: int, k) -> EigenPolyCoeffs:
    """
    Coefficients of ``det(x - T(k))`` for the arrow matrix from symmetric
    functions of ``Gamma = {-(1/d) sum cos k_j, cos k_1, ..., cos k_d}``.
    """
    k = _momentum(d, k)
    c = np.cos(k)
    gamma = elementary_symmetric(np.concatenate([[-c.sum() / d], c]))
    return EigenPolyCoeffs(d, _eta(d, k, 1.0), gamma, _eta(d, k, 0.0))


def exceptional_counts(k, tol: float = COS_TOL):
    """``(#{cos k_j = -1}, #{cos k_j = +1})`` up to ``tol``."""
    c = np.cos(np.asarray(k, dtype=float))
    return int((np.abs(c + 1) <= tol).sum()), int((np.abs(c - 1) <= tol).sum())


def _root_multiplicity(poly: np.ndarray, x0: float, tol: float) -> int:
    scale = max(1.0, float(np.abs(poly).max()))
    deriv = np.asarray(poly, dtype=float)
    m = 0
    while deriv.size > 1 and abs(np.polyval(deriv, x0)) <= tol * scale * factorial(m):
        m += 1
        deriv = np.polyder(deriv)
    return m


def pm1_multiplicity(d: int, k, tol: float = MULT_TOL):
    """
    Multiplicities of ``x = +1`` and ``x = -1`` as roots of ``P``.

    Returns ``(m_plus, m_minus, exceptional)``. The flag is raised when at
    least two components have ``cos k_j = -1`` (which makes ``+1`` multiple)
    or ``cos k_j = +1`` (which makes ``-1`` multiple).
    """
    k = _momentum(d, k)
    coeffs = eigenpoly_coeffs(d, k)
    m_plus = _root_multiplicity(coeffs.poly, 1.0, tol)
    m_minus = _root_multiplicity(coeffs.poly, -1.0, tol)
    n_minus_one, n_plus_one = exceptional_counts(k)
    return m_plus, m_minus, bool(n_minus_one >= 2 or n_plus_one >= 2)


def grid_momenta(d: int, N: int):
    """All ``k = 2 pi l / N``, the first axis varying slowest."""
    if N < 1:
        raise ValueError(f"grid size must be >= 1, got {N}")
    steps = 2 * np.pi * np.arange(N) / N
    return [np.array(k) for k in product(steps, repeat=d)]


@dataclass
class BandRow:
    k: np.ndarray
    mu: np.ndarray
    angles: np.ndarray
    m_plus: int
    m_minus: int
    exceptional: bool
    residual_plus: int
    residual_minus: int
    oracle_delta: float


def _angles(values: np.ndarray) -> np.ndarray:
    ang = np.angle(values)
    ang[ang <= -np.pi + 1e-12] = np.pi
    return np.sort(ang + 0.0)


def band_row(d: int, k, convention: str) -> BandRow:
    """Analyse one momentum and verify it against the dense spectrum of ``U(k)``."""
    kappa, kappa_prime, _ = convention_parameters(d, convention)
    k = _momentum(d, k)
    ko = fourier_cons(d, convention)
    s = fourier_shift(d, k)
    t = closed_discriminant(d, k, convention)
    gap = float(np.abs(t - ko.conj().T @ s @ ko).max())
    if gap > 1e-12:
        raise OracleMismatch(f"closed-form discriminant differs from K*SK by {gap:.3e} at k={k.tolist()}")
    u = s @ moving_shift_coin(d)
    rep = analyze(ko, s, u, kappa, kappa_prime, n_edges=d, T=t)
    if rep.oracle_delta is None or rep.oracle_delta > TOL_ORACLE:
        raise OracleMismatch(
            f"band row k={k.tolist()} disagrees with the dense spectrum "
            f"(delta = {rep.oracle_delta!r})"
        )
    mu = np.concatenate([[e.mu] * e.mult for e in rep.t_eigs])
    n_minus_one, n_plus_one = exceptional_counts(k)
    return BandRow(
        k=k,
        mu=np.sort(mu),
        angles=_angles(rep.spectrum()),
        m_plus=rep.ledger["m_plus"],
        m_minus=rep.ledger["m_minus"],
        exceptional=bool(n_minus_one >= 2 or n_plus_one >= 2),
        residual_plus=rep.residual["plus_kp"],
        residual_minus=rep.residual["minus_kp"],
        oracle_delta=float(rep.oracle_delta),
    )


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("QWS_THREADS", "1")))
    except ValueError:
        return 1


def band_scan(d: int, N: int, convention: str = "case_ii", workers=None) -> list:
    """
    Scan the ``N^d`` grid. Rows come back in grid order whatever the
    worker count; the first failing row raises :class:`OracleMismatch`.
    """
    convention_parameters(d, convention)
    if d > 4:
        raise ValueError(f"band scans are limited to d <= 4, got {d}")
    momenta = grid_momenta(d, N)
    workers = _default_workers() if workers is None else max(1, int(workers))
    if workers == 1:
        return [band_row(d, k, convention) for k in momenta]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda k: band_row(d, k, convention), momenta))


def write_band_csv(rows, path_or_file, d: int) -> None:
    """Write rows with 17 significant digits; see :class:`BandRow` for columns."""
    if not rows:
        raise ValueError("no rows to write")
    n_mu, n_ang = len(rows[0].mu), len(rows[0].angles)
    header = ([f"k_{j + 1}" for j in range(d)] + [f"mu_{i + 1}" for i in range(n_mu)]
              + [f"angle_{i + 1}" for i in range(n_ang)] + ["m_plus", "m_minus", "exceptional"])

    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([f"{x:.17g}" for x in r.k] + [f"{x:.17g}" for x in r.mu]
                       + [f"{x:.17g}" for x in r.angles]
                       + [r.m_plus, r.m_minus, int(r.exceptional)])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)


@dataclass(frozen=True)
class TorusWalk:
    """
    The moving-shift Grover walk on ``Z^d / N Z^d`` and its flip-flop form.

    ``labels[a] = (eps, j)`` with ``t(a) - o(a) = eps e_j``; ``order[u]``
    lists the arcs of ``A_u`` in the order ``(+1, -1, ..., +d, -d)``.
    """

    graph: Graph
    labels: tuple
    order: tuple
    shift: ArcPermutation
    moving_coins: CoinAssignment
    flipflop_coins: CoinAssignment
    cons: KernelBasis


def _arc_labels(g: Graph, d: int, N: int):
    labels = []
    for o, t in zip(g.origin, g.terminus):
        diff = (np.array(torus_coordinates(int(t), d, N)) - torus_coordinates(int(o), d, N)) % N
        nz = np.flatnonzero(diff)
        if nz.size != 1 or diff[nz[0]] not in (1, N - 1):
            raise GraphError(f"arc {o}->{t} is not a lattice step")
        j = int(nz[0])
        labels.append((1 if diff[j] == 1 else -1, j))
    return tuple(labels)


def torus_moving_walk(d: int, N: int, convention: str = "case_i") -> TorusWalk:
    """
    Grover walk with moving shift ``(x; eps j) -> (x + eps e_j; eps j)`` on the torus.

    The flip-flop coins are ``sigma Gr(2d)`` written in the canonical local
    order, and the CONS is the Fourier CONS of the convention at every vertex.
    """
    kappa, kappa_prime, p = convention_parameters(d, convention)
    g = hypercubic_torus(d, N)
    labels = _arc_labels(g, d, N)
    pos = g.local_index()
    slot = {(eps, j): 2 * j + (0 if eps > 0 else 1) for eps in (1, -1) for j in range(d)}

    order = []
    for u in range(g.n_vertices):
        arr = np.empty(2 * d, dtype=int)
        for a in g.incoming[u]:
            arr[slot[labels[a]]] = a
        order.append(arr)

    perm = np.empty(g.n_arcs, dtype=int)
    for a in range(g.n_arcs):
        out = order[g.terminus[a]]
        # the continuing arc leaves t(a) in the same direction: the inverse of
        # the incoming arc with the opposite label
        perm[a] = g.inv[out[slot[(-labels[a][0], labels[a][1])]]]

    ko = fourier_cons(d, convention)
    grover = np.full((2 * d, 2 * d), 1.0 / d) - np.eye(2 * d)
    flip = moving_shift_coin(d)
    moving, flipped, cons = [], [], []
    for u in range(g.n_vertices):
        idx = pos[order[u]]
        inv_idx = np.argsort(idx)
        moving.append(grover[np.ix_(inv_idx, inv_idx)])
        flipped.append(flip[np.ix_(inv_idx, inv_idx)])
        cons.append(ko[inv_idx, :])
    return TorusWalk(
        graph=g,
        labels=labels,
        order=tuple(order),
        shift=ArcPermutation(perm),
        moving_coins=CoinAssignment(tuple(moving), kappa=1.0, kappa_prime=-1.0, p=1),
        flipflop_coins=CoinAssignment(tuple(flipped), kappa=kappa, kappa_prime=kappa_prime, p=p),
        cons=KernelBasis(tuple(cons)),
    )
