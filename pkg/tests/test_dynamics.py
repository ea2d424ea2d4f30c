"""
Tests for wave-packet expansion, evolution, current and the copy law.
"""
import math

import numpy as np
import pytest
from scipy import special

from inverse_square_oscillator.numerics.quadrature import integrate
from inverse_square_oscillator.physics.model import PhysicalParams, exponents_from_coupling
from inverse_square_oscillator.quantum.dynamics import (
    caustic_density,
    copy_experiment,
    copy_sequence,
    current_coefficients,
    display_grid,
    evolve,
    expand,
    extrapolated_current,
    gaussian_packet,
    left_mass_of_gaussian,
    packet_from_coefficients,
    probability_current_at_origin,
    synthesize,
)
from inverse_square_oscillator.quantum.eigenbasis import Sigma1Basis, sigma1_eigenstate
from inverse_square_oscillator.quantum.propagator import KernelRequest, kernel_closed
from inverse_square_oscillator.utils.exceptions import ParameterError, TruncationError


@pytest.fixture(scope="module")
def params():
    return PhysicalParams(g=5.0 / 32.0)


@pytest.fixture(scope="module")
def exps(params):
    return exponents_from_coupling(params)


@pytest.fixture(scope="module")
def basis(exps, params):
    return Sigma1Basis(exps, params, n_max=60)


@pytest.fixture(scope="module")
def packet(basis):
    """Right-supported Gaussian at 2 with width 0.5, as used by the copy demo."""
    return expand(gaussian_packet(2.0, 0.5), basis)


def test_gaussian_packet_is_normalized(params):
    psi = gaussian_packet(2.0, 0.5)
    value, _ = integrate(lambda x: np.abs(psi(x)) ** 2, 8.0)
    assert value == pytest.approx(1.0, abs=1e-10)
    assert psi(np.array([-1.0]))[0] == 0
    with pytest.raises(ParameterError):
        gaussian_packet(2.0, 0.0)


def test_left_mass_of_gaussian():
    assert left_mass_of_gaussian(2.0, 0.5) <= 1e-10
    assert left_mass_of_gaussian(0.0, 1.0) == pytest.approx(0.5)


def test_expand_basis_element(basis, params):
    small = Sigma1Basis(basis.exps, params, n_max=10)
    result = expand(sigma1_eigenstate(3, 2, basis.exps, params), small)
    c1, c2 = result.coeffs
    assert c2[3] == pytest.approx(1.0, abs=1e-8)
    others = np.concatenate([c1, np.delete(c2, 3)])
    assert np.max(np.abs(others)) <= 1e-8
    assert result.residual <= 1e-12


def test_expand_gaussian_residual_and_parseval(packet):
    assert packet.n_max == 60
    assert packet.residual <= 1e-4
    assert packet.norm_from_coefficients() == pytest.approx(1.0, abs=1e-6)
    assert packet.norm_from_grid() == pytest.approx(packet.norm_from_coefficients(), abs=1e-6)


def test_expansion_of_wide_gaussian_converges(basis, params):
    """A unit-width Gaussian cut at x = 0 converges algebraically; projection keeps Pythagoras."""
    psi = gaussian_packet(2.0, 1.0)
    coarse = expand(psi, basis, n_max=30)
    fine = expand(psi, basis)
    assert fine.residual < coarse.residual
    for result in (coarse, fine):
        assert result.norm_from_coefficients() + result.residual == pytest.approx(1.0, abs=1e-6)


def test_expand_reports_insufficient_truncation(basis):
    with pytest.raises(TruncationError, match="increase n_max"):
        expand(gaussian_packet(2.0, 1.0), basis, n_max=10, residual_tol=1e-12)


def test_full_period_returns_density(packet, params):
    final = evolve(packet, 2.0 * math.pi / params.omega, params)
    assert final.time == pytest.approx(2.0 * math.pi)
    initial = synthesize(packet, packet.grid)
    assert np.max(np.abs(final.density() - np.abs(initial) ** 2)) <= 1e-10


def test_evolution_is_unitary(packet, params):
    for T in (0.3, 1.7, 5.2):
        evolved = evolve(packet, T, params)
        assert evolved.norm_from_coefficients() == pytest.approx(packet.norm_from_coefficients(), abs=1e-12)
        assert evolved.norm_from_grid() == pytest.approx(packet.norm_from_grid(), abs=1e-6)


def test_evolution_composes(packet, params):
    twice = evolve(evolve(packet, 0.3, params), 0.5, params)
    once = evolve(packet, 0.8, params)
    assert twice.time == pytest.approx(0.8)
    for a, b in zip(twice.coeffs, once.coeffs):
        assert np.allclose(a, b, atol=1e-13)


def test_evolution_matches_kernel_quadrature(packet, exps, params):
    T = 0.9
    psi = gaussian_packet(2.0, 0.5)
    evolved = evolve(packet, T, params)
    xs = np.array([-2.5, -1.0, 0.5, 1.8, 2.6])
    direct = []
    for x in xs:
        def integrand(y, x=x):
            return np.array([kernel_closed(KernelRequest(x, float(v), T), exps, params) for v in y]) * psi(y)

        direct.append(integrate(integrand, 8.0, tol=1e-8)[0])
    assert np.max(np.abs(synthesize(evolved, xs) - np.array(direct))) <= 1e-3


def test_packet_from_coefficients_pads(basis):
    p = packet_from_coefficients([1.0], [0.0, 0.5j], basis)
    c1, c2 = p.coeffs
    assert len(c1) == len(c2) == 61
    assert c2[1] == 0.5j
    assert np.allclose(p.values, synthesize(p, p.grid))


def test_current_vanishes_for_single_series(basis, params):
    rng = np.random.default_rng(8)
    c1 = rng.normal(size=8) + 1j * rng.normal(size=8)
    odd_only = packet_from_coefficients(c1 / np.linalg.norm(c1), [], basis)
    A, B = current_coefficients(odd_only)
    assert B == 0
    assert probability_current_at_origin(odd_only, params) == 0.0


def test_current_vanishes_for_real_cross_term(basis, params):
    p = packet_from_coefficients([1 / math.sqrt(2)], [1 / math.sqrt(2)], basis)
    assert abs(probability_current_at_origin(p, params)) <= 1e-15


def test_current_for_quarter_phase_mixture(basis, params):
    p = packet_from_coefficients([1 / math.sqrt(2)], [1j / math.sqrt(2)], basis)
    a = basis.exps.a
    expected = -a / math.sqrt(special.gamma(basis.exps.c1) * special.gamma(basis.exps.c2))
    j_right = probability_current_at_origin(p, params, side=1)
    assert j_right == pytest.approx(expected, rel=1e-12)
    assert probability_current_at_origin(p, params, side=-1) == pytest.approx(j_right, abs=1e-8)
    assert extrapolated_current(p, params) == pytest.approx(j_right, rel=1e-4)


def test_current_continuity_for_evolved_packet(packet, params):
    evolved = evolve(packet, 0.7, params)
    j_right = probability_current_at_origin(evolved, params, side=1)
    j_left = probability_current_at_origin(evolved, params, side=-1)
    assert abs(j_right - j_left) <= 1e-8
    assert abs(j_right) > 0


def test_current_scales_with_coupling_exponent():
    """Cross terms carry the factor a; the sign follows Im(A B*)."""
    for g in (0.05, 0.2, 0.35):
        params = PhysicalParams(g=g)
        exps = exponents_from_coupling(params)
        p = packet_from_coefficients([1 / math.sqrt(2)], [-1j / math.sqrt(2)], Sigma1Basis(exps, params, 2))
        expected = exps.a / math.sqrt(special.gamma(exps.c1) * special.gamma(exps.c2))
        assert probability_current_at_origin(p, params) == pytest.approx(expected, rel=1e-12)


def test_caustic_density_examples():
    rho = lambda x: np.exp(-(np.asarray(x) - 2.0) ** 2)
    xs = np.array([-2.0, 2.0])

    halves = caustic_density(rho, 0.75, 1)(xs)
    assert halves[0] == pytest.approx(halves[1])
    assert halves[1] == pytest.approx(0.5 * (1.0 + math.exp(-16.0)))

    recurrence = caustic_density(rho, 0.5, 2)
    assert np.allclose(recurrence(xs), rho(xs), atol=1e-15)


@pytest.mark.parametrize("a, k", [(0.6, 1), (0.75, 3), (0.9, 2), (1.0, 5)])
def test_caustic_density_conserves_mass(a, k):
    rho = lambda x: np.where(np.asarray(x) > 0, np.exp(-2.0 * (np.asarray(x) - 2.0) ** 2), 0.0)
    before, _ = integrate(rho, 8.0)
    after, _ = integrate(caustic_density(rho, a, k), 8.0)
    assert after == pytest.approx(before, abs=1e-10)


def test_copy_experiment_three_quarters(params):
    half = copy_experiment(0.5, 2.0, 0.75, 1, 80, params)
    assert half.mass_right == pytest.approx(0.5, abs=1e-3)
    assert half.mass_left == pytest.approx(0.5, abs=1e-3)
    assert half.l1_error <= 1e-3

    full = copy_experiment(0.5, 2.0, 0.75, 2, 80, params)
    assert full.mass_right == pytest.approx(0.0, abs=1e-3)
    assert full.mass_left == pytest.approx(1.0, abs=1e-3)
    assert full.l1_error <= 1e-3


def test_copy_experiment_conventional_limit():
    params = PhysicalParams(g=3.0 / 8.0)
    for report, final in copy_sequence(0.5, 2.0, 1.0, 3, 80, params):
        assert report.mass_right == pytest.approx(1.0, abs=1e-3)
        assert report.mass_left == pytest.approx(0.0, abs=1e-3)
        assert report.l1_error <= 1e-3


@pytest.mark.parametrize("a", [0.6, 0.75, 0.9])
def test_copy_law_over_several_half_periods(a, params):
    sequence = copy_sequence(0.5, 2.0, a, 3, 80, params)
    assert [report.k for report, _ in sequence] == [0, 1, 2, 3]
    for report, final in sequence:
        assert report.l1_error <= 1e-3
        assert report.mass_right == pytest.approx(report.predicted_right, abs=1e-3)
        assert report.mass_left == pytest.approx(report.predicted_left, abs=1e-3)
        assert final.time == pytest.approx(report.k * math.pi)


def test_copy_experiment_rejects_leaky_packets(params):
    with pytest.raises(ParameterError, match="R-"):
        copy_experiment(0.5, 0.5, 0.75, 1, 20, params)
    with pytest.raises(ParameterError):
        copy_experiment(0.5, -2.0, 0.75, 1, 20, params)


def test_copy_experiment_reports_truncation(params):
    with pytest.raises(TruncationError):
        copy_experiment(0.5, 2.0, 0.75, 1, 5, params)


def test_display_grid():
    grid = display_grid(6.0, points=400)
    assert grid.size == 800
    assert np.all(np.diff(grid) > 0)
    assert not np.any(grid == 0)
    assert grid[400] == pytest.approx(1e-6)
    assert grid[-1] == pytest.approx(6.0)
    assert np.allclose(grid[:400], -grid[400:][::-1])
