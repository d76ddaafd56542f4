import csv
import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwspec.coins import grover_matrix, moving_shift_coin
from qwspec.exceptions import CoinError
from qwspec.graph import bouquet
from qwspec.lattice import (
    Momentum,
    band_scan,
    case_ii_d3_spectrum,
    convention_parameters,
    discriminant_case_i,
    discriminant_case_ii,
    eigenpoly_coeffs,
    case_i_quadratic,
    fourier_cons,
    fourier_discriminant,
    fourier_evolution,
    fourier_shift,
    grid_momenta,
    moving_quartic,
    moving_sextic,
    pm1_multiplicity,
    sign_switch_residual,
    write_band_csv,
)
from qwspec.walk import OneForm, shift_matrix

momentum3 = st.lists(st.floats(0, 2 * np.pi, exclude_max=True), min_size=3, max_size=3).map(np.array)


def random_k(rng, d):
    return rng.uniform(0, 2 * np.pi, size=d)


def charpoly(m):
    """Independent oracle: characteristic polynomial from dense eigenvalues."""
    return np.real(np.poly(np.linalg.eigvals(m)))


def test_shift_d1_pi():
    assert np.allclose(fourier_shift(1, [np.pi]), [[0, -1], [-1, 0]], atol=1e-15)


def test_shift_k_zero_is_pair_swap():
    s = fourier_shift(3, np.zeros(3))
    assert np.array_equal(s, shift_matrix(bouquet(3)).matrix)


@given(momentum3)
def test_shift_involution_and_unitary_evolution(k):
    s = fourier_shift(3, k)
    assert np.abs(s @ s - np.eye(6)).max() < 1e-12
    u = fourier_evolution(3, k)
    assert np.abs(u.conj().T @ u - np.eye(6)).max() < 1e-12


def test_shift_equals_twisted_bouquet(rng):
    k = random_k(rng, 3)
    theta = np.repeat(k, 2) * np.tile([1, -1], 3)
    assert np.allclose(fourier_shift(3, k), shift_matrix(bouquet(3), OneForm(theta)).matrix)


def test_evolution_k_zero_is_grover():
    assert np.abs(fourier_evolution(3, np.zeros(3)) - grover_matrix(6)).max() < 1e-14


def test_moving_sextic_matches_determinant(rng):
    for _ in range(20):
        k = random_k(rng, 3)
        assert np.abs(moving_sextic(k) - charpoly(fourier_evolution(3, k))).max() < 1e-9
        assert np.allclose(moving_sextic(k, monic=False), -moving_sextic(k))


def test_sign_switch_identity(rng):
    k = random_k(rng, 3)
    for lam in np.exp(1j * rng.uniform(0, 2 * np.pi, 5)):
        assert sign_switch_residual(k, lam) < 1e-12
    c = np.cos(k)
    g2 = c[0] * c[1] + c[1] * c[2] + c[0] * c[2]
    assert np.isclose(np.polyval(moving_quartic(k), 1.0), 4 + 8 * c.sum() / 3 + 4 * g2 / 3)


def test_case_i_quadratic_roots(rng):
    for _ in range(20):
        k = random_k(rng, 3)
        mu = np.linalg.eigvalsh(discriminant_case_i(3, k))
        assert np.abs(np.sort(np.roots(case_i_quadratic(k)).real) - mu).max() < 1e-10


def test_case_i_k_zero_double_one():
    assert np.allclose(np.linalg.eigvalsh(discriminant_case_i(3, np.zeros(3))), [1, 1])


def test_case_i_d2_scalar(rng):
    k = random_k(rng, 2)
    t = discriminant_case_i(2, k)
    assert t.shape == (1, 1)
    assert abs(t[0, 0] - np.cos(k).sum() / 2) < 1e-14
    assert abs(t[0, 0] - fourier_discriminant(2, k, "case_i")[0, 0]) < 1e-14


def test_case_i_d1_rejected():
    with pytest.raises(CoinError):
        discriminant_case_i(1, [0.5])


@pytest.mark.parametrize("d", [1, 2, 3, 4])
@pytest.mark.parametrize("conv", ["case_i", "case_ii"])
def test_closed_form_equals_boundary_product(d, conv, rng):
    if conv == "case_i" and d == 1:
        return
    k = random_k(rng, d)
    closed = discriminant_case_i(d, k) if conv == "case_i" else discriminant_case_ii(d, k)
    assert np.abs(closed - fourier_discriminant(d, k, conv)).max() < 1e-12
    ko = fourier_cons(d, conv)
    kappa, _, p = convention_parameters(d, conv)
    assert ko.shape == (2 * d, p)
    c = moving_shift_coin(d)
    # the columns of K_o span the kappa eigenspace of sigma Gr(2d)
    assert np.abs(c @ ko - kappa * ko).max() < 1e-12


def test_case_ii_printed_d3_matrix():
    k = np.array([0.4, 1.3, 2.2])
    s = np.sin(k) / np.sqrt(3)
    expected = np.array([
        [np.cos(k).sum() / 3, -1j * s[0], -1j * s[1], -1j * s[2]],
        [1j * s[0], -np.cos(k[0]), 0, 0],
        [1j * s[1], 0, -np.cos(k[1]), 0],
        [1j * s[2], 0, 0, -np.cos(k[2])],
    ])
    assert np.abs(discriminant_case_ii(3, k) - expected).max() < 1e-15


def test_case_ii_k_zero():
    assert np.allclose(discriminant_case_ii(4, np.zeros(4)), np.diag([1, -1, -1, -1, -1]))


def test_d3_radical_readings(rng):
    k = random_k(rng, 3)
    mu = np.linalg.eigvalsh(discriminant_case_ii(3, k))
    assert np.abs(case_ii_d3_spectrum(k, "symmetric").real - mu).max() < 1e-12
    assert np.abs(case_ii_d3_spectrum(k, "printed") - mu).max() > 1e-3


def test_eta_one():
    k = np.array([0.3, 1.1, 2.0])
    c = np.cos(k)
    assert abs(eigenpoly_coeffs(3, k).eta[0] - (c.sum() - c.sum() / 3)) < 1e-14


def test_eta_k_zero_d3():
    expected = np.polymul([1, -1], np.poly([-1, -1, -1]))
    assert np.allclose(eigenpoly_coeffs(3, np.zeros(3)).poly, expected, atol=1e-14)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_eta_matches_charpoly(d, rng):
    for _ in range(10):
        k = random_k(rng, d)
        coeffs = eigenpoly_coeffs(d, k)
        assert np.abs(coeffs.poly - charpoly(discriminant_case_ii(d, k))).max() < 1e-12
        assert abs(coeffs(1.0)) < 1e-10 and abs(coeffs(-1.0)) < 1e-10
        roots = np.sort(coeffs.roots().real)
        assert np.abs(roots - np.linalg.eigvalsh(discriminant_case_ii(d, k))).max() < 1e-8


def test_eta_literal_differs(rng):
    k = random_k(rng, 3)
    coeffs = eigenpoly_coeffs(3, k)
    assert coeffs.eta_literal[0] == coeffs.eta[0]
    assert abs(coeffs.eta_literal[1] - coeffs.eta[1]) > 1e-3


def test_pm1_generic(rng):
    assert pm1_multiplicity(3, random_k(rng, 3)) == (1, 1, False)


def test_pm1_two_zero_components():
    m_plus, m_minus, exceptional = pm1_multiplicity(3, [0.0, 0.0, 1.234])
    assert m_plus == 1 and m_minus >= 2 and exceptional


def test_pm1_two_pi_components():
    m_plus, m_minus, exceptional = pm1_multiplicity(3, [np.pi, np.pi, 1.234])
    assert m_plus >= 2 and m_minus == 1 and exceptional


@pytest.mark.parametrize("d", [2, 3, 4])
def test_pm1_k_zero(d):
    assert pm1_multiplicity(d, np.zeros(d)) == (1, d, True)


def test_grid_order():
    ks = grid_momenta(2, 3)
    assert len(ks) == 9
    assert np.allclose(ks[1], [0, 2 * np.pi / 3])
    assert np.allclose(ks[3], [2 * np.pi / 3, 0])


def test_band_scan_case_i_d3():
    rows = band_scan(3, 4, "case_i")
    assert len(rows) == 64
    assert max(r.oracle_delta for r in rows) <= 1e-7


def test_band_scan_case_ii_residuals():
    rows = band_scan(2, 8, "case_ii")
    generic = [r for r in rows if not r.exceptional]
    assert generic
    assert all(r.residual_plus == r.residual_minus == 0 for r in generic)
    assert all(r.m_plus == r.m_minus == 1 for r in generic)


def test_band_row_k_zero():
    row = band_scan(3, 4, "case_ii")[0]
    assert np.allclose(row.k, 0)
    assert np.allclose(row.angles, [0, np.pi, np.pi, np.pi, np.pi, np.pi])


def test_band_scan_case_ii_lift_is_arccos():
    for row in band_scan(2, 4, "case_ii"):
        for mu in row.mu:
            if abs(abs(mu) - 1) > 1e-8:
                a = np.arccos(mu)
                assert np.abs(row.angles - a).min() < 1e-9
                assert np.abs(row.angles + a).min() < 1e-9


def test_band_scan_determinism():
    a = band_scan(2, 5, "case_ii", workers=1)
    b = band_scan(2, 5, "case_ii", workers=4)
    fa, fb = io.StringIO(), io.StringIO()
    write_band_csv(a, fa, 2)
    write_band_csv(b, fb, 2)
    assert fa.getvalue() == fb.getvalue()


def test_band_scan_limits():
    with pytest.raises(ValueError):
        band_scan(5, 2)
    with pytest.raises(CoinError):
        band_scan(1, 4, "case_i")


def test_csv_format(tmp_path):
    rows = band_scan(2, 2, "case_ii")
    path = tmp_path / "bands.csv"
    write_band_csv(rows, path, 2)
    table = list(csv.reader(path.open()))
    assert table[0] == ["k_1", "k_2", "mu_1", "mu_2", "mu_3"] + [f"angle_{i}" for i in range(1, 5)] + [
        "m_plus", "m_minus", "exceptional"]
    assert len(table) == 5
    first = table[1]
    assert first[-3:] == ["1", "2", "1"]
    assert float(first[2]) == -1.0


def test_momentum_validation():
    assert Momentum([0.0, 1.0]).d == 2
    for bad in ([-0.1], [2 * np.pi], [np.nan], []):
        with pytest.raises(ValueError):
            Momentum(bad)
    with pytest.raises(ValueError):
        fourier_shift(2, [0.1, 0.2, 0.3])
