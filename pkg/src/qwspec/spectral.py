"""
Spectral mapping from the discriminant T to the evolution U = S C.

Every eigenvalue ``mu`` of ``T`` strictly inside ``(-1, 1)`` lifts to the two
roots of ``lambda^2 - (kappa - kappa') mu lambda - kappa kappa' = 0``; the
boundary values ``mu = +1`` and ``mu = -1`` lift to ``kappa`` and ``-kappa``
only. On the orthogonal complement of the inherited subspace
``L = K C^{p|V|} + S K C^{p|V|}`` the walk acts as ``+-kappa'``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .coins import (
    CoinAssignment,
    KernelBasis,
    certify_two_point_spectrum,
    kernel_cons,
    to_flipflop_coin,
)
from .discriminant import BoundaryOperator, Discriminant, build_boundary, build_discriminant
from .exceptions import LiftError, OracleMismatch
from .graph import ArcPermutation, Graph
from .numerics import cluster_real, match_circle_multisets
from .walk import ShiftMatrix, coin_matrix, dense_spectrum, evolution, shift_matrix

__all__ = [
    "TEigen",
    "LiftedPair",
    "SpectrumReport",
    "eig_discriminant",
    "lift_eigenvalue",
    "lift_eigenvector",
    "residual_eigenspace",
    "inherited_dimension",
    "lambda_operator",
    "invariance_residual",
    "charpoly_identity_check",
    "analyze",
    "full_report",
    "TOL_CLUSTER",
    "TOL_BOUNDARY",
    "TOL_ORACLE",
]

TOL_CLUSTER = 1e-8
TOL_BOUNDARY = 1e-8
TOL_ANTIPODAL = 1e-12
TOL_ORACLE = 1e-7


@dataclass
class TEigen:
    """One eigenvalue cluster of ``T`` with an orthonormal eigenbasis."""

    mu: float
    mult: int
    vectors: np.ndarray = field(repr=False)
    diameter: float = 0.0


@dataclass
class LiftedPair:
    """
    Image of one eigenvalue ``mu`` of ``T`` on the unit circle.

    ``kind`` is ``"interior"`` (two values), ``"boundary_plus"``
    (``mu = 1 -> kappa``) or ``"boundary_minus"`` (``mu = -1 -> -kappa``).
    ``vectors[i]`` holds the lifted eigenvectors for ``lambdas[i]``.
    """

    mu: float
    lambdas: tuple
    kind: str
    mult: int = 1
    vectors: tuple = field(default=(), repr=False)


def _is_antipodal(kappa, kappa_prime) -> bool:
    return abs(kappa + kappa_prime) <= TOL_ANTIPODAL


def eig_discriminant(T, tol_cluster: float = TOL_CLUSTER, tol_boundary: float = TOL_BOUNDARY):
    """
    Clustered eigendecomposition of a Hermitian discriminant.

    Eigenvalues within ``tol_boundary`` of ``+-1`` are snapped onto ``+-1``;
    anything beyond ``1 + tol_boundary`` in modulus is rejected.
    """
    T = T.T if isinstance(T, Discriminant) else np.asarray(T, dtype=complex)
    if T.size == 0:
        return []
    herm = float(np.abs(T - T.conj().T).max())
    if herm > 1e-10:
        raise LiftError(f"discriminant is not Hermitian (max |T - T*| = {herm:.3e})")
    w, v = np.linalg.eigh(0.5 * (T + T.conj().T))
    if np.abs(w).max() > 1.0 + tol_boundary:
        raise LiftError(f"discriminant eigenvalue {np.abs(w).max()!r} outside [-1, 1]")
    out = []
    for idx in cluster_real(w, tol_cluster):
        vals = w[idx]
        mu = float(vals.mean())
        if abs(mu - 1.0) <= tol_boundary:
            mu = 1.0
        elif abs(mu + 1.0) <= tol_boundary:
            mu = -1.0
        out.append(TEigen(mu, int(idx.size), v[:, idx], float(vals.max() - vals.min())))
    return out


def lift_eigenvalue(mu: float, kappa, kappa_prime, tol_boundary: float = TOL_BOUNDARY) -> LiftedPair:
    """
    Lift ``mu`` to the unit circle.

    With ``kappa = exp(i xi)`` and ``kappa' = exp(i eta)`` the interior roots
    are ``exp(i phi)`` with ``sin(phi - (xi + eta)/2) = mu sin((xi - eta)/2)``.
    """
    mu = float(mu)
    if abs(mu) > 1.0 + tol_boundary:
        raise LiftError(f"|mu| = {abs(mu)!r} exceeds 1")
    kappa, kappa_prime = complex(kappa), complex(kappa_prime)
    if mu >= 1.0 - tol_boundary:
        return LiftedPair(1.0, (kappa,), "boundary_plus")
    if mu <= -1.0 + tol_boundary:
        return LiftedPair(-1.0, (-kappa,), "boundary_minus")
    xi, eta = np.angle(kappa), np.angle(kappa_prime)
    centre, half = 0.5 * (xi + eta), 0.5 * (xi - eta)
    s = float(np.clip(mu * np.sin(half), -1.0, 1.0))
    phi = np.arcsin(s)
    lam1 = np.exp(1j * (centre + phi))
    lam2 = np.exp(1j * (centre + np.pi - phi))
    return LiftedPair(mu, (complex(lam1), complex(lam2)), "interior")


def lift_eigenvector(g, lam, K, S, kappa, kappa_prime, mu: Optional[float] = None,
                     tol: float = 1e-8) -> np.ndarray:
    """
    Normalised eigenvector of ``U`` for ``lam`` built from ``T g = mu g``.

    Generic case: ``psi = (I + lam / kappa' S) K g``. When
    ``kappa + kappa' = 0`` and ``lam = +-kappa'`` the image is ``K g`` itself.
    """
    Kmat = K.K if isinstance(K, BoundaryOperator) else np.asarray(K)
    Smat = S.matrix if isinstance(S, ShiftMatrix) else np.asarray(S)
    lam = complex(lam)
    if mu is not None:
        q = lam * lam - (kappa - kappa_prime) * mu * lam - kappa * kappa_prime
        if abs(q) > tol:
            raise LiftError(f"lambda={lam:.6g} is not a lift of mu={mu:.6g} (|q| = {abs(q):.3e})")
    Kg = Kmat @ g
    if _is_antipodal(kappa, kappa_prime) and min(abs(lam - kappa_prime), abs(lam + kappa_prime)) <= 1e-8:
        psi = Kg
    else:
        psi = Kg + (lam / kappa_prime) * (Smat @ Kg)
    norm = np.linalg.norm(psi)
    if norm <= 1e-10 * max(np.linalg.norm(g), 1.0):
        raise LiftError(f"lifted eigenvector for lambda={lam:.6g} vanishes")
    return psi / norm


def _plus_eigenspace(Smat: np.ndarray, sign: int) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (Smat + Smat.conj().T))
    return v[:, w > 0] if sign > 0 else v[:, w < 0]


def residual_eigenspace(K, S, kappa_prime=None, tol_boundary: float = TOL_BOUNDARY):
    """
    Orthonormal bases of ``ker K* n ker(1 - S)`` and ``ker K* n ker(1 + S)``.

    These are the ``+kappa'`` and ``-kappa'`` eigenspaces of ``U`` on the
    complement of the inherited subspace. ``kappa_prime`` is accepted for
    symmetry with the other lifting routines; the subspaces do not depend on it.
    """
    Kmat = K.K if isinstance(K, BoundaryOperator) else np.asarray(K)
    Smat = S.matrix if isinstance(S, ShiftMatrix) else np.asarray(S)
    out = []
    for sign in (+1, -1):
        B = _plus_eigenspace(Smat, sign)
        M = Kmat.conj().T @ B
        if M.shape[0] == 0 or M.shape[1] == 0:
            out.append(B)
            continue
        _, s, vh = np.linalg.svd(M, full_matrices=True)
        # squared singular values are (1 -+ mu)/2 for eigenvalues mu of T
        rank = int((s**2 > 0.5 * tol_boundary).sum())
        out.append(B @ vh[rank:].conj().T)
    return out[0], out[1]


def inherited_dimension(K, S, tol_boundary: float = TOL_BOUNDARY) -> int:
    """Numerical rank of ``[K, S K]``; squared singular values are ``1 +- mu``."""
    Kmat = K.K if isinstance(K, BoundaryOperator) else np.asarray(K)
    Smat = S.matrix if isinstance(S, ShiftMatrix) else np.asarray(S)
    if Kmat.size == 0:
        return 0
    s = np.linalg.svd(np.hstack([Kmat, Smat @ Kmat]), compute_uv=False)
    return int((s**2 > tol_boundary).sum())


def lambda_operator(T, kappa, kappa_prime) -> np.ndarray:
    """The block matrix ``[[0, kappa' I], [kappa I, (kappa - kappa') T]]``."""
    T = T.T if isinstance(T, Discriminant) else np.asarray(T)
    n = T.shape[0]
    zero, eye = np.zeros((n, n)), np.eye(n)
    return np.block([[zero, kappa_prime * eye], [kappa * eye, (kappa - kappa_prime) * T]])


def invariance_residual(U, K, S, T, kappa, kappa_prime, f, g) -> float:
    """``|| U L(f + g) - L(Lambda (f + g)) ||`` with ``L(f + g) = K f + S K g``."""
    Kmat = K.K if isinstance(K, BoundaryOperator) else np.asarray(K)
    Smat = S.matrix if isinstance(S, ShiftMatrix) else np.asarray(S)
    n = Kmat.shape[1]
    lam_op = lambda_operator(T, kappa, kappa_prime)
    fg = lam_op @ np.concatenate([f, g])
    lhs = np.asarray(U) @ (Kmat @ f + Smat @ Kmat @ g)
    rhs = Kmat @ fg[:n] + Smat @ Kmat @ fg[n:]
    return float(np.linalg.norm(lhs - rhs))


def charpoly_identity_check(U, T, kappa, kappa_prime, sample_points=None,
                            n_samples: int = 16, radius: float = 2.0, rng=None) -> float:
    """
    Max relative gap between the two sides of
    ``det(lambda - U) = (lambda^2 - kappa'^2)^(|E| - p|V|)
    det(lambda^2 - (kappa - kappa') T lambda - kappa kappa')``.

    Both sides are evaluated through LU log-determinants, so the exponent
    ``|E| - p|V|`` may be negative. Points where a side is singular are
    rotated slightly and retried.
    """
    U = np.asarray(U, dtype=complex)
    T = T.T if isinstance(T, Discriminant) else np.asarray(T, dtype=complex)
    n_edges = U.shape[0] // 2
    q = T.shape[0]
    if sample_points is None:
        rng = np.random.default_rng(rng)
        sample_points = radius * np.exp(2j * np.pi * rng.random(n_samples))
    worst = 0.0
    eye_u, eye_t = np.eye(U.shape[0]), np.eye(q)
    for lam in np.asarray(sample_points, dtype=complex):
        for _ in range(8):
            s_l, log_l = np.linalg.slogdet(lam * eye_u - U)
            s_r, log_r = np.linalg.slogdet(
                lam * lam * eye_t - (kappa - kappa_prime) * lam * T - kappa * kappa_prime * eye_t
            )
            base = lam * lam - kappa_prime * kappa_prime
            if s_l != 0 and s_r != 0 and abs(base) > 1e-12:
                break
            lam *= np.exp(0.1j)
        else:
            raise LiftError(f"could not find a regular evaluation point near {lam}")
        log_rhs = np.log(s_r) + log_r + (n_edges - q) * np.log(base)
        ratio = np.exp(np.log(s_l) + log_l - log_rhs)
        worst = max(worst, float(abs(ratio - 1.0)))
    return worst


@dataclass
class SpectrumReport:
    """Everything the spectral map predicts, with the dense-oracle comparison."""

    kappa: complex
    kappa_prime: complex
    t_eigs: list
    lifted: list
    residual: dict
    ledger: dict
    oracle_delta: Optional[float] = None
    max_eigvec_residual: float = 0.0
    exclusion_ok: bool = True
    rank_deficient: list = field(default_factory=list)
    residual_bases: tuple = field(default=(), repr=False)
    discriminant: Optional[Discriminant] = field(default=None, repr=False)
    boundary: Optional[BoundaryOperator] = field(default=None, repr=False)
    U: Optional[np.ndarray] = field(default=None, repr=False)
    shift: Optional[ShiftMatrix] = field(default=None, repr=False)
    coins: Optional[CoinAssignment] = field(default=None, repr=False)
    cons: Optional[KernelBasis] = field(default=None, repr=False)

    def spectrum(self) -> np.ndarray:
        """Predicted multiset: lifted values plus ``+-kappa'`` on the complement."""
        vals = []
        for pair in self.lifted:
            for lam in pair.lambdas:
                vals.extend([lam] * pair.mult)
        vals.extend([self.kappa_prime] * self.residual["plus_kp"])
        vals.extend([-self.kappa_prime] * self.residual["minus_kp"])
        return np.array(vals, dtype=complex)

    def lifted_spectrum(self) -> np.ndarray:
        vals = []
        for pair in self.lifted:
            for lam in pair.lambdas:
                vals.extend([lam] * pair.mult)
        return np.array(vals, dtype=complex)

    def ledger_identities(self) -> dict:
        """Integer identities between measured dimensions and ``m_+-``."""
        L = self.ledger
        mp, mm = L["m_plus"], L["m_minus"]
        pv, ne = L["p_times_V"], L["n_edges"]
        return {
            "dim_L": L["dim_L"] == 2 * pv - (mp + mm),
            "dim_O_cap_T": L["dim_O_cap_T"] == mp + mm,
            "residual_plus_kp": self.residual["plus_kp"] == ne - pv + mm,
            "residual_minus_kp": self.residual["minus_kp"] == ne - pv + mp,
            "total": L["dim_L"] + self.residual["plus_kp"] + self.residual["minus_kp"] == 2 * ne,
            "lifted_count": len(self.lifted_spectrum()) == L["dim_L"],
        }

    def to_json(self) -> dict:
        def pair(z):
            return [float(np.real(z)), float(np.imag(z))]

        return {
            "kappa": pair(self.kappa),
            "kappa_prime": pair(self.kappa_prime),
            "t_spectrum": [{"mu": e.mu, "mult": e.mult} for e in self.t_eigs],
            "lifted": [
                {"mu": lp.mu, "mult": lp.mult, "kind": lp.kind,
                 "lambdas": [pair(z) for z in lp.lambdas]}
                for lp in self.lifted
            ],
            "residual": dict(self.residual),
            "ledger": dict(self.ledger),
            "oracle_delta": self.oracle_delta,
            "max_eigvec_residual": self.max_eigvec_residual,
            "exclusion_ok": self.exclusion_ok,
            "rank_deficient_mu": list(self.rank_deficient),
        }


def analyze(K, S, U, kappa, kappa_prime, n_edges: Optional[int] = None, *,
            tol_cluster: float = TOL_CLUSTER, tol_boundary: float = TOL_BOUNDARY,
            oracle: bool = True, T=None) -> SpectrumReport:
    """
    Spectral map for explicit matrices ``K`` (isometry), ``S`` (Hermitian
    involution) and ``U = S C``.

    Used both for graphs (:func:`full_report`) and for Fourier-space walks on
    bouquets, where no :class:`Graph` object is needed.
    """
    Kmat = K.K if isinstance(K, BoundaryOperator) else np.asarray(K, dtype=complex)
    Smat = S.matrix if isinstance(S, ShiftMatrix) else np.asarray(S, dtype=complex)
    U = np.asarray(U, dtype=complex)
    kappa, kappa_prime = complex(kappa), complex(kappa_prime)
    n_edges = U.shape[0] // 2 if n_edges is None else n_edges
    Tmat = Kmat.conj().T @ Smat @ Kmat if T is None else (T.T if isinstance(T, Discriminant) else T)
    pv = Kmat.shape[1]

    t_eigs = eig_discriminant(Tmat, tol_cluster, tol_boundary)
    m_plus = sum(e.mult for e in t_eigs if e.mu == 1.0)
    m_minus = sum(e.mult for e in t_eigs if e.mu == -1.0)

    lifted, deficient = [], []
    worst_res = 0.0
    exclusion_ok = True
    for e in t_eigs:
        pair = lift_eigenvalue(e.mu, kappa, kappa_prime, tol_boundary)
        pair.mult = e.mult
        vec_sets = []
        for lam in pair.lambdas:
            psi = np.column_stack([
                lift_eigenvector(e.vectors[:, i], lam, Kmat, Smat, kappa, kappa_prime, e.mu)
                for i in range(e.mult)
            ])
            if np.linalg.matrix_rank(psi, tol=1e-8) < e.mult:
                deficient.append(e.mu)
            res = np.linalg.norm(U @ psi - lam * psi, axis=0).max()
            worst_res = max(worst_res, float(res))
            vec_sets.append(psi)
            if not _is_antipodal(kappa, kappa_prime):
                if min(abs(lam - kappa_prime), abs(lam + kappa_prime)) <= 1e-8:
                    exclusion_ok = False
        pair.vectors = tuple(vec_sets)
        lifted.append(pair)

    plus_basis, minus_basis = residual_eigenspace(Kmat, Smat, kappa_prime, tol_boundary)
    for basis, val in ((plus_basis, kappa_prime), (minus_basis, -kappa_prime)):
        if basis.shape[1]:
            res = np.linalg.norm(U @ basis - val * basis, axis=0).max()
            worst_res = max(worst_res, float(res))

    dim_L = inherited_dimension(Kmat, Smat, tol_boundary)
    ledger = {
        "m_plus": m_plus,
        "m_minus": m_minus,
        "dim_L": dim_L,
        "dim_L_perp": U.shape[0] - dim_L,
        "dim_O_cap_T": 2 * pv - dim_L,
        "n_edges": int(n_edges),
        "p_times_V": int(pv),
    }
    report = SpectrumReport(
        kappa, kappa_prime, t_eigs, lifted,
        {"plus_kp": int(plus_basis.shape[1]), "minus_kp": int(minus_basis.shape[1])},
        ledger,
        max_eigvec_residual=worst_res,
        exclusion_ok=exclusion_ok,
        rank_deficient=deficient,
        residual_bases=(plus_basis, minus_basis),
        U=U,
    )
    if oracle:
        report.oracle_delta = match_circle_multisets(
            report.spectrum(), dense_spectrum(U, tol_cluster).eigenvalues
        )
    return report


def full_report(g: Graph, coins: CoinAssignment, shift=None, cons=None, *,
                tol_cluster: float = TOL_CLUSTER, tol_boundary: float = TOL_BOUNDARY,
                strict: bool = False) -> SpectrumReport:
    """
    Certify the coins, build ``K``, ``T`` and ``U``, lift, and compare with
    the dense oracle.

    A general shift permutation is first rewritten in flip-flop form, and the
    declared ``(kappa, kappa', p)`` of ``coins`` then describe that form. A
    :class:`~qwspec.walk.OneForm` selects the twisted shift. With
    ``strict=True`` an oracle gap above ``1e-7`` raises :class:`OracleMismatch`.
    """
    coins.check_graph(g)
    if isinstance(shift, ArcPermutation) and not np.array_equal(shift.perm, g.inv):
        coins = to_flipflop_coin(g, shift, coins)
        shift = None
    certify_two_point_spectrum(coins, tol_cluster)
    if cons is None:
        cons = kernel_cons(coins, tol_cluster)
    else:
        cons.check(coins)
    boundary = build_boundary(g, cons)
    S = shift_matrix(g, shift)
    disc = build_discriminant(g, boundary, S)
    U = evolution(S, coin_matrix(g, coins)).matrix
    report = analyze(boundary, S, U, coins.kappa, coins.kappa_prime, g.n_edges,
                     tol_cluster=tol_cluster, tol_boundary=tol_boundary, T=disc)
    report.discriminant = disc
    report.boundary = boundary
    report.shift = S
    report.coins = coins
    report.cons = cons
    if strict and (report.oracle_delta is None or report.oracle_delta > TOL_ORACLE):
        raise OracleMismatch(
            f"predicted spectrum differs from dense oracle by {report.oracle_delta!r} rad"
        )
    return report
