"""
The invariant suite behind ``qws verify`` and the acceptance tests.

Each check reports a measured quantity together with its tolerance. Checks are
grouped; the ``corrupt-K`` fault perturbs the boundary operator only inside
the ``boundary`` group, so a healthy pipeline fails exactly that group.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coins import grover_matrix, moving_shift_coin, to_flipflop_coin
from .discriminant import (
    build_boundary,
    build_discriminant,
    conservation_residual,
    matrix_weight,
    stochastic_sums,
)
from .instances import random_instances, random_shift_instances
from .lattice import (
    case_ii_d3_spectrum,
    discriminant_case_i,
    discriminant_case_ii,
    eigenpoly_coeffs,
    exceptional_counts,
    fourier_discriminant,
    fourier_evolution,
    grid_momenta,
    moving_sextic,
    case_i_quadratic,
    pm1_multiplicity,
    sign_switch_residual,
    torus_moving_walk,
)
from .spectral import charpoly_identity_check, full_report, lift_eigenvalue
from .walk import coin_matrix, dense_spectrum, shift_matrix, walk_matrix

__all__ = ["CheckResult", "FAULTS", "GROUPS", "run_suite", "format_table"]

FAULTS = ("corrupt-K",)
GROUPS = ("boundary", "shift_conversion", "charpoly", "lifting", "dimensions", "lattice")


@dataclass
class CheckResult:
    name: str
    group: str
    value: float
    tol: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tol)


def _random_momenta(rng, d: int, n: int) -> np.ndarray:
    return rng.uniform(0.0, 2 * np.pi, size=(n, d))


def boundary_checks(reports, fault=None) -> list:
    """``K*K = I``, ``K*SK`` against the arc sum of ``W(a)``, and ``C = (kappa - kappa') KK* + kappa'``."""
    iso = block = coin = 0.0
    for _, g, rep in reports:
        K = rep.boundary.K.copy()
        if fault == "corrupt-K":
            K[0, 0] += 1e-3
        iso = max(iso, float(np.abs(K.conj().T @ K - np.eye(K.shape[1])).max()))

        S = rep.shift.matrix
        phase = S[np.arange(g.n_arcs), g.inv]
        p = rep.coins.p
        arc_sum = np.zeros((p * g.n_vertices,) * 2, dtype=complex)
        for a in range(g.n_arcs):
            u, v = g.terminus[a], g.origin[a]
            arc_sum[p * u:p * (u + 1), p * v:p * (v + 1)] += phase[a] * matrix_weight(g, rep.cons, a)
        block = max(block, float(np.abs(K.conj().T @ S @ K - arc_sum).max()))

        C = coin_matrix(g, rep.coins)
        kap, kp = rep.kappa, rep.kappa_prime
        rhs = (kap - kp) * (K @ K.conj().T) + kp * np.eye(C.shape[0])
        coin = max(coin, float(np.linalg.norm(C - rhs, 2)))
    return [
        CheckResult("isometry K*K = I", "boundary", iso, 1e-10),
        CheckResult("discriminant block formula", "boundary", block, 1e-10),
        CheckResult("coin from boundary operator", "boundary", coin, 1e-10),
    ]


def shift_conversion_checks(seed: int) -> list:
    worst = 0.0
    for g, pi, coins in random_shift_instances(seed, 20):
        lhs = walk_matrix(g, coins, pi)
        rhs = walk_matrix(g, to_flipflop_coin(g, pi, coins))
        worst = max(worst, float(np.linalg.norm(lhs - rhs, 2)))
    return [CheckResult("general shift to flip-flop form", "shift_conversion", worst, 1e-12)]


def charpoly_checks(reports, seed: int) -> list:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _, _, rep in reports:
        dev = charpoly_identity_check(rep.U, rep.discriminant, rep.kappa, rep.kappa_prime, rng=rng)
        worst = max(worst, dev)
    return [CheckResult("determinant identity at |lambda| = 2", "charpoly", worst, 1e-8)]


def lifting_checks(reports) -> list:
    oracle = max(rep.oracle_delta for _, _, rep in reports)
    resid = max(rep.max_eigvec_residual for _, _, rep in reports)
    excl = sum(
        1 for _, _, rep in reports
        if abs(rep.kappa + rep.kappa_prime) > 1e-12 and not rep.exclusion_ok
    )
    return [
        CheckResult("spectrum equals dense oracle", "lifting", oracle, 1e-7),
        CheckResult("lifted eigenvector residual", "lifting", resid, 1e-9),
        CheckResult("no lifted value at +-kappa'", "lifting", float(excl), 0.0,
                    f"{excl} instance(s) violate the exclusion"),
    ]


def dimension_checks(reports) -> list:
    failures = []
    for name, _, rep in reports:
        for key, ok in rep.ledger_identities().items():
            if not ok:
                failures.append(f"{name}:{key}")
    return [CheckResult("dimension ledger identities", "dimensions", float(len(failures)), 0.0,
                        ", ".join(failures))]


def grover_spectrum_check(dmax: int = 6) -> CheckResult:
    worst, bad = 0.0, []
    for d in range(1, dmax + 1):
        spec = dense_spectrum(moving_shift_coin(d))
        mults = {}
        for rep, mult, diam in spec.clusters:
            key = 1 if abs(rep - 1) < 1e-6 else (-1 if abs(rep + 1) < 1e-6 else None)
            mults[key] = mults.get(key, 0) + mult
            worst = max(worst, diam, float(abs(rep - round(rep.real))))
        expected = {1: d + 1, -1: d - 1} if d > 1 else {1: 2}
        if mults != expected:
            bad.append(d)
    return CheckResult("sigma Gr(2d) spectrum for d = 1..6", "lattice",
                       worst if not bad else float("inf"), 1e-10,
                       f"wrong multiplicities for d in {bad}" if bad else "")


def case_i_checks(rng, n_roots: int, n_sextic: int) -> list:
    quad_dev = closed_dev = lift_dev = 0.0
    for k in _random_momenta(rng, 3, n_roots):
        t = discriminant_case_i(3, k)
        closed_dev = max(closed_dev, float(np.abs(t - fourier_discriminant(3, k, "case_i")).max()))
        mu = np.sort(np.linalg.eigvalsh(t))
        roots = np.sort(np.real(np.roots(case_i_quadratic(k))))
        quad_dev = max(quad_dev, float(np.abs(mu - roots).max()))
        spec_u = np.linalg.eigvals(fourier_evolution(3, k))
        for m in mu:
            if abs(abs(m) - 1) < 1e-8:
                continue
            expected = -np.exp(np.array([1j, -1j]) * np.arccos(np.clip(m, -1, 1)))
            lifted = np.array(lift_eigenvalue(m, -1.0, 1.0).lambdas)
            for z in expected:
                lift_dev = max(lift_dev, float(np.abs(spec_u - z).min()),
                               float(np.abs(lifted - z).min()))
    sextic_dev = switch_dev = 0.0
    for k in _random_momenta(rng, 3, n_sextic):
        poly_u = np.poly(fourier_evolution(3, k))
        sextic_dev = max(sextic_dev, float(np.abs(poly_u - moving_sextic(k)).max()))
        lam = np.exp(1j * rng.uniform(0, 2 * np.pi))
        switch_dev = max(switch_dev, sign_switch_residual(k, lam))
    return [
        CheckResult("case i closed form equals K*SK", "lattice", closed_dev, 1e-12),
        CheckResult("case i quadratic roots equal Spec T(k)", "lattice", quad_dev, 1e-10),
        CheckResult("sextic equals det(lambda - U(k))", "lattice", sextic_dev, 1e-9),
        CheckResult("lambda -> -lambda maps quartic to quadratic", "lattice", switch_dev, 1e-10),
        CheckResult("case i lift is -exp(+-i arccos mu)", "lattice", lift_dev, 1e-9),
    ]


def case_ii_checks(rng, n_samples: int) -> list:
    eta_dev = pm1_dev = closed_dev = lift_dev = 0.0
    for d in (2, 3, 4):
        for k in _random_momenta(rng, d, n_samples):
            t = discriminant_case_ii(d, k)
            closed_dev = max(closed_dev, float(np.abs(t - fourier_discriminant(d, k, "case_ii")).max()))
            coeffs = eigenpoly_coeffs(d, k)
            eta_dev = max(eta_dev, float(np.abs(coeffs.poly - np.real(np.poly(t))).max()))
            pm1_dev = max(pm1_dev, abs(coeffs(1.0)), abs(coeffs(-1.0)))
            if d == 3:
                mu = np.linalg.eigvalsh(t)
                spec_u = np.linalg.eigvals(fourier_evolution(3, k))
                for m in mu:
                    if abs(abs(m) - 1) < 1e-8:
                        continue
                    for z in np.exp(np.array([1j, -1j]) * np.arccos(np.clip(m, -1, 1))):
                        lift_dev = max(lift_dev, float(np.abs(spec_u - z).min()))
    return [
        CheckResult("arrow matrix equals K*SK", "lattice", closed_dev, 1e-12),
        CheckResult("eta coefficients equal det(x - T(k))", "lattice", eta_dev, 1e-10),
        CheckResult("P(+1) = P(-1) = 0", "lattice", pm1_dev, 1e-10),
        CheckResult("case ii lift is exp(+-i arccos mu)", "lattice", lift_dev, 1e-9),
    ]


def d3_radical_check(rng, n_samples: int) -> list:
    sym = printed = 0.0
    for k in _random_momenta(rng, 3, n_samples):
        mu = np.sort(np.linalg.eigvalsh(discriminant_case_ii(3, k)))
        sym = max(sym, float(np.abs(case_ii_d3_spectrum(k, "symmetric") - mu).max()))
        printed = max(printed, float(np.abs(case_ii_d3_spectrum(k, "printed") - mu).max()))
    return [CheckResult("d = 3 arrow spectrum, symmetric radical", "lattice", sym, 1e-10,
                        f"doubled cross term misses by up to {printed:.3e}")]


def multiplicity_contract_check() -> CheckResult:
    """Simple roots at +-1 exactly off the exceptional sets, on grids through 0 and pi."""
    bad = []
    for d, N in ((2, 4), (2, 8), (3, 4), (4, 4)):
        for k in grid_momenta(d, N):
            m_plus, m_minus, _ = pm1_multiplicity(d, k)
            n_minus_one, n_plus_one = exceptional_counts(k)
            t = discriminant_case_ii(d, k)
            w = np.linalg.eigvalsh(t)
            eig_plus = int((np.abs(w - 1) < 1e-6).sum())
            eig_minus = int((np.abs(w + 1) < 1e-6).sum())
            ok = ((m_plus > 1) == (n_minus_one >= 2) and (m_minus > 1) == (n_plus_one >= 2)
                  and m_plus == eig_plus and m_minus == eig_minus)
            if not ok:
                bad.append((d, tuple(np.round(k, 6))))
    return CheckResult("+-1 multiplicities simple off exceptional sets", "lattice",
                       float(len(bad)), 0.0, str(bad[:5]) if bad else "")


def k_zero_checks() -> list:
    ev_dev = spec_dev = poly_dev = 0.0
    for d in (2, 3, 4):
        u0 = fourier_evolution(d, np.zeros(d))
        ev_dev = max(ev_dev, float(np.abs(u0 - grover_matrix(2 * d)).max()))
        got = sorted((round(rep.real), mult) for rep, mult, _ in dense_spectrum(u0).clusters)
        if got != [(-1, 2 * d - 1), (1, 1)]:
            spec_dev = float("inf")
        target = np.polymul([1.0, -1.0], np.poly(-np.ones(d)))
        poly_dev = max(poly_dev, float(np.abs(np.poly(discriminant_case_ii(d, np.zeros(d))) - target).max()))
    return [
        CheckResult("U(0) equals Gr(2d)", "lattice", ev_dev, 1e-14),
        CheckResult("Spec U(0) = {1, (-1)^(2d-1)}", "lattice", spec_dev, 0.0),
        CheckResult("det(x - T(0)) = (x - 1)(x + 1)^d", "lattice", poly_dev, 1e-12),
    ]


def stochastic_checks(rng) -> list:
    sums = cons_dev = 0.0
    for d, N in ((2, 3), (2, 4), (3, 3)):
        tw = torus_moving_walk(d, N, "case_i")
        tw.cons.check(tw.flipflop_coins)
        g = tw.graph
        boundary = build_boundary(g, tw.cons)
        disc = build_discriminant(g, boundary, shift_matrix(g))
        row, col = stochastic_sums(g, disc)
        sums = max(sums, row, col)
        for _ in range(10):
            f = rng.normal(size=disc.T.shape[0]) + 1j * rng.normal(size=disc.T.shape[0])
            cons_dev = max(cons_dev, conservation_residual(disc, f))
    return [
        CheckResult("case i torus block sums equal I_p", "lattice", sums, 1e-10),
        CheckResult("sum over vertices is conserved by T", "lattice", cons_dev, 1e-10),
    ]


def lattice_checks(seed: int, n_roots: int = 1000, n_sextic: int = 100) -> list:
    rng = np.random.default_rng(seed)
    out = [grover_spectrum_check()]
    out += case_i_checks(rng, n_roots, n_sextic)
    out += case_ii_checks(rng, n_roots)
    out += d3_radical_check(rng, n_sextic)
    out.append(multiplicity_contract_check())
    out += k_zero_checks()
    out += stochastic_checks(rng)
    return out


def instance_reports(seed: int):
    """``(name, graph, report)`` for every random instance."""
    return [(inst.name, inst.graph, full_report(inst.graph, inst.coins, inst.shift))
            for inst in random_instances(seed)]


def run_suite(seed: int = 0, fault=None, n_roots: int = 1000, n_sextic: int = 100) -> list:
    """Run every check; ``fault`` must be ``None`` or one of :data:`FAULTS`."""
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; expected one of {FAULTS}")
    reports = instance_reports(seed)
    results = boundary_checks(reports, fault)
    results += shift_conversion_checks(seed)
    results += charpoly_checks(reports, seed)
    results += lifting_checks(reports)
    results += dimension_checks(reports)
    results += lattice_checks(seed, n_roots, n_sextic)
    return results


def format_table(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'group':<17} {'check':<{width}}  {'value':>10}  {'tol':>8}  status"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{r.group:<17} {r.name:<{width}}  {r.value:>10.3e}  {r.tol:>8.1e}  {status}"
        if r.detail and not r.passed:
            line += f"  ({r.detail})"
        lines.append(line)
    return "\n".join(lines)
