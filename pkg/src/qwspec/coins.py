"""
Local coin operators and their two-point-spectrum certificates.

A coin assignment attaches a unitary ``C_u`` to every vertex, written in the
canonical order of the incoming arcs ``A_u``. The class of walks handled by
this package requires ``Spec(C_u)`` to sit inside ``{kappa, kappa'}`` with the
``kappa``-eigenspace of the same dimension ``p`` at every vertex.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import qr
from scipy.stats import unitary_group

from .exceptions import CoinError, MultiplicityViolation, SpectrumViolation
from .graph import ArcPermutation, Graph, validate_shift_permutation

__all__ = [
    "CoinAssignment",
    "KernelBasis",
    "grover_matrix",
    "moving_shift_coin",
    "pair_swap",
    "grover_coins",
    "moving_grover_coins",
    "two_point_coin",
    "random_two_point_coin",
    "to_flipflop_coin",
    "from_flipflop_coin",
    "certify_two_point_spectrum",
    "kernel_cons",
    "kappa_projector",
    "coins_from_json",
    "load_coins",
]

UNITARY_TOL = 1e-10
CLUSTER_TOL = 1e-8


def _unit(z, name):
    z = complex(z)
    if abs(abs(z) - 1.0) > 1e-12:
        raise CoinError(f"{name} must have modulus 1, got |{name}| = {abs(z)!r}")
    return z


@dataclass(frozen=True)
class CoinAssignment:
    """
    Per-vertex unitary coins plus the declared ``(kappa, kappa', p)``.

    Construction checks unitarity and the scalar parameters; the spectral
    certificate itself is :func:`certify_two_point_spectrum`.
    """

    matrices: tuple
    kappa: complex = 1.0
    kappa_prime: complex = -1.0
    p: int = 1
    tol: float = field(default=UNITARY_TOL, repr=False)

    def __post_init__(self):
        mats = tuple(np.array(m, dtype=complex) for m in self.matrices)
        for u, m in enumerate(mats):
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise CoinError(f"coin at vertex {u} is not square: {m.shape}")
            err = np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0]), 2)
            if err > self.tol:
                raise CoinError(
                    f"coin at vertex {u} is not unitary (||C*C - I|| = {err:.3e})"
                )
        object.__setattr__(self, "matrices", mats)
        kappa = _unit(self.kappa, "kappa")
        kappa_prime = _unit(self.kappa_prime, "kappa_prime")
        if abs(kappa - kappa_prime) <= 1e-12:
            raise CoinError("kappa and kappa_prime must differ")
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "kappa_prime", kappa_prime)
        if int(self.p) < 1:
            raise CoinError(f"p must be >= 1, got {self.p}")
        object.__setattr__(self, "p", int(self.p))

    def __len__(self):
        return len(self.matrices)

    def check_graph(self, g: Graph) -> None:
        """Coin sizes must equal vertex degrees, and p <= min degree."""
        if len(self.matrices) != g.n_vertices:
            raise CoinError(
                f"{len(self.matrices)} coins for {g.n_vertices} vertices"
            )
        for u, m in enumerate(self.matrices):
            if m.shape[0] != g.degree(u):
                raise CoinError(
                    f"coin at vertex {u} has size {m.shape[0]}, degree is {g.degree(u)}"
                )
        if self.p > g.min_degree:
            raise CoinError(f"p = {self.p} exceeds the minimum degree {g.min_degree}")


@dataclass(frozen=True)
class KernelBasis:
    """
    Orthonormal ``kappa``-eigenvectors of each coin.

    ``vectors[u]`` is a ``d(u) x p`` matrix whose columns are
    ``alpha_u^(1), ..., alpha_u^(p)``.
    """

    vectors: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "vectors", tuple(np.array(v, dtype=complex) for v in self.vectors)
        )

    @property
    def p(self) -> int:
        return self.vectors[0].shape[1] if self.vectors else 0

    def check(self, coins: CoinAssignment, tol: float = 1e-10) -> None:
        """Orthonormality and the eigen-equation ``(kappa - C_u) alpha = 0``."""
        for u, (a, c) in enumerate(zip(self.vectors, coins.matrices)):
            if a.shape != (c.shape[0], coins.p):
                raise CoinError(
                    f"kernel basis at vertex {u} has shape {a.shape}, "
                    f"expected {(c.shape[0], coins.p)}"
                )
            gram = a.conj().T @ a
            if np.abs(gram - np.eye(coins.p)).max() > tol:
                raise CoinError(f"kernel basis at vertex {u} is not orthonormal")
            res = np.linalg.norm((coins.kappa * np.eye(c.shape[0]) - c) @ a, axis=0)
            if res.max() > tol:
                raise CoinError(
                    f"kernel basis at vertex {u} is not in ker(kappa - C_u) "
                    f"(residual {res.max():.3e})"
                )


def grover_matrix(n: int) -> np.ndarray:
    """
    The ``n x n`` Grover matrix ``(2/n) J - I``.

    Real symmetric and unitary, with a simple eigenvalue 1 on the uniform
    vector and eigenvalue -1 of multiplicity ``n - 1``.
    """
    n = int(n)
    if n < 1:
        raise CoinError(f"Grover matrix needs n >= 1, got {n}")
    return (2.0 / n) * np.ones((n, n), dtype=complex) - np.eye(n, dtype=complex)


def pair_swap(d: int) -> np.ndarray:
    """Permutation matrix exchanging coordinates ``2j`` and ``2j + 1``."""
    sigma = np.zeros((2 * d, 2 * d), dtype=complex)
    for j in range(d):
        sigma[2 * j, 2 * j + 1] = sigma[2 * j + 1, 2 * j] = 1.0
    return sigma


def moving_shift_coin(d: int) -> np.ndarray:
    """
    Flip-flop form of the moving-shift Grover coin, ``sigma . Gr(2d)``.

    The basis is ordered ``+1, -1, +2, -2, ..., +d, -d`` and ``sigma`` swaps
    each ``+j`` with ``-j``. Eigenvalue 1 has multiplicity ``d + 1`` and
    eigenvalue -1 multiplicity ``d - 1``.
    """
    d = int(d)
    if d < 1:
        raise CoinError(f"moving-shift coin needs d >= 1, got {d}")
    return pair_swap(d) @ grover_matrix(2 * d)


def two_point_coin(basis: np.ndarray, kappa, kappa_prime) -> np.ndarray:
    """``kappa' I + (kappa - kappa') Q Q*`` for an isometry ``Q``."""
    q = np.asarray(basis, dtype=complex)
    n = q.shape[0]
    return kappa_prime * np.eye(n) + (kappa - kappa_prime) * (q @ q.conj().T)


def random_two_point_coin(n: int, p: int, kappa, kappa_prime, rng) -> np.ndarray:
    """Haar-random ``kappa``-eigenspace of dimension ``p`` inside C^n."""
    if n == 1:
        v = np.ones((1, 1), dtype=complex)
    else:
        v = unitary_group.rvs(n, random_state=rng)
    return two_point_coin(v[:, :p], kappa, kappa_prime)


def grover_coins(g: Graph) -> CoinAssignment:
    """Grover coins on every vertex, certified with ``(1, -1, 1)``."""
    return CoinAssignment(
        tuple(grover_matrix(g.degree(u)) for u in range(g.n_vertices)),
        kappa=1.0, kappa_prime=-1.0, p=1,
    )


def moving_grover_coins(g: Graph, kappa=-1.0, kappa_prime=1.0) -> CoinAssignment:
    """
    ``sigma . Gr(d(u))`` at every vertex, with ``sigma`` pairing consecutive
    canonical positions. Every degree must be even.

    With ``kappa = -1`` the multiplicity is ``d(u)/2 - 1``; with ``kappa = 1``
    it is ``d(u)/2 + 1``. All degrees must agree on that value.
    """
    mats, ps = [], set()
    for u in range(g.n_vertices):
        deg = g.degree(u)
        if deg % 2:
            raise CoinError(f"vertex {u} has odd degree {deg}")
        half = deg // 2
        mats.append(moving_shift_coin(half))
        ps.add(half - 1 if complex(kappa).real < 0 else half + 1)
    if len(ps) != 1:
        raise CoinError("moving Grover coins need a uniform multiplicity")
    return CoinAssignment(tuple(mats), kappa=kappa, kappa_prime=kappa_prime, p=ps.pop())


def _local_swap(g: Graph, pi: ArcPermutation, u: int, pos: np.ndarray) -> np.ndarray:
    inc = g.incoming[u]
    q = np.zeros((len(inc), len(inc)), dtype=complex)
    for a in inc:
        q[pos[g.inv[pi.perm[a]]], pos[a]] = 1.0
    return q


def to_flipflop_coin(g: Graph, pi: ArcPermutation, coins: CoinAssignment,
                     kappa=None, kappa_prime=None, p=None) -> CoinAssignment:
    """
    Rewrite ``S_pi C`` as ``S_0 C'`` with ``C'_u = Q_u(pi) C_u``.

    ``Q_u(pi)`` sends the local basis vector of ``a`` to that of
    ``inv(pi(a))``, which stays inside ``A_u`` because ``o(pi(a)) = t(a)``.
    The spectrum of ``C'`` generally differs from that of ``C``, so the
    eigenvalue labels of the result may be overridden; by default they are
    copied.
    """
    validate_shift_permutation(g, pi)
    coins.check_graph(g)
    pos = g.local_index()
    mats = tuple(_local_swap(g, pi, u, pos) @ coins.matrices[u] for u in range(g.n_vertices))
    return CoinAssignment(
        mats,
        kappa=coins.kappa if kappa is None else kappa,
        kappa_prime=coins.kappa_prime if kappa_prime is None else kappa_prime,
        p=coins.p if p is None else p,
    )


def from_flipflop_coin(g: Graph, pi: ArcPermutation, coins: CoinAssignment) -> CoinAssignment:
    """Inverse of :func:`to_flipflop_coin`: ``C_u = Q_u(pi)^T C'_u``."""
    validate_shift_permutation(g, pi)
    coins.check_graph(g)
    pos = g.local_index()
    mats = tuple(_local_swap(g, pi, u, pos).T @ coins.matrices[u] for u in range(g.n_vertices))
    return CoinAssignment(mats, kappa=coins.kappa, kappa_prime=coins.kappa_prime, p=coins.p)


def certify_two_point_spectrum(coins: CoinAssignment, tol: float = CLUSTER_TOL):
    """
    Per-vertex ``(dim ker(kappa - C_u), dim ker(kappa' - C_u))``.

    Raises
    ------
    SpectrumViolation
        An eigenvalue is farther than ``tol`` from both ``kappa`` and ``kappa'``.
    MultiplicityViolation
        The ``kappa`` cluster does not have exactly ``p`` members.
    """
    dims = []
    for u, c in enumerate(coins.matrices):
        ev = np.linalg.eigvals(c)
        near_k = np.abs(ev - coins.kappa) <= tol
        near_kp = np.abs(ev - coins.kappa_prime) <= tol
        stray = ~(near_k | near_kp)
        if stray.any():
            bad = ev[stray][0]
            raise SpectrumViolation(
                f"coin at vertex {u} has eigenvalue {bad:.6g}, not near "
                f"kappa={coins.kappa:.6g} or kappa'={coins.kappa_prime:.6g}",
                vertex=u,
            )
        nk = int(near_k.sum())
        if nk != coins.p:
            raise MultiplicityViolation(
                f"coin at vertex {u}: dim ker(kappa - C_u) = {nk}, expected p = {coins.p}",
                vertex=u,
            )
        dims.append((nk, int(near_kp.sum())))
    return dims


def kappa_projector(c: np.ndarray, kappa, kappa_prime) -> np.ndarray:
    """Orthogonal projector onto ``ker(kappa - C)`` for a certified coin."""
    n = c.shape[0]
    proj = (c - kappa_prime * np.eye(n)) / (kappa - kappa_prime)
    return 0.5 * (proj + proj.conj().T)


def _canonical_basis(proj: np.ndarray, rank: int, tol: float) -> np.ndarray:
    # Pivoted QR of the projector makes the result independent of the
    # eigensolver's choice inside degenerate clusters.
    q, r, _ = qr(proj, pivoting=True)
    diag = np.abs(np.diag(r))
    numerical_rank = int((diag > 1e-8).sum())
    if numerical_rank != rank:
        raise MultiplicityViolation(
            f"projector has numerical rank {numerical_rank}, expected {rank}"
        )
    out = []
    for v in q[:, :rank].T:
        pivot = int(np.flatnonzero(np.abs(v) > tol)[0])
        out.append((pivot, v * (abs(v[pivot]) / v[pivot])))
    out.sort(key=lambda t: t[0])
    return np.column_stack([v for _, v in out])


def kernel_cons(coins: CoinAssignment, tol: float = CLUSTER_TOL) -> KernelBasis:
    """
    Deterministic orthonormal basis of every ``ker(kappa - C_u)``.

    Each vector has its first non-negligible component real positive, and
    the vectors are ordered by the index of that component.
    """
    certify_two_point_spectrum(coins, tol)
    vecs = []
    for c in coins.matrices:
        proj = kappa_projector(c, coins.kappa, coins.kappa_prime)
        vecs.append(_canonical_basis(proj, coins.p, 1e-12))
    return KernelBasis(tuple(vecs))


def _complex_matrix(rows):
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise CoinError("complex matrices are encoded as [[[re, im], ...], ...]")
    return arr[..., 0] + 1j * arr[..., 1]


def _complex_scalar(pair):
    if isinstance(pair, (int, float)):
        return complex(pair)
    re, im = pair
    return complex(re, im)


def coins_from_json(data: dict, g: Graph) -> CoinAssignment:
    """
    Build a coin assignment from the coin-spec JSON object.

    ``kind`` is ``grover``, ``moving_grover`` or ``custom``; custom coins
    carry ``matrices`` as per-vertex ``[[[re, im], ...], ...]`` arrays.
    """
    kind = data.get("kind", "grover")
    kappa = _complex_scalar(data.get("kappa", [1.0, 0.0]))
    kappa_prime = _complex_scalar(data.get("kappa_prime", [-1.0, 0.0]))
    if kind == "grover":
        mats = tuple(grover_matrix(g.degree(u)) for u in range(g.n_vertices))
        p = int(data.get("p", 1))
    elif kind == "moving_grover":
        mats = moving_grover_coins(g, kappa, kappa_prime).matrices
        half = g.degree(0) // 2
        p = int(data.get("p", half - 1 if kappa.real < 0 else half + 1))
    elif kind == "custom":
        if "matrices" not in data:
            raise CoinError("custom coins need a 'matrices' entry")
        mats = tuple(_complex_matrix(m) for m in data["matrices"])
        p = int(data["p"])
    else:
        raise CoinError(f"unknown coin kind {kind!r}")
    coins = CoinAssignment(mats, kappa=kappa, kappa_prime=kappa_prime, p=p)
    coins.check_graph(g)
    return coins


def load_coins(path, g: Graph) -> CoinAssignment:
    return coins_from_json(json.loads(Path(path).read_text()), g)
