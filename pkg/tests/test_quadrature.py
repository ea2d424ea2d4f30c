"""
Tests for the double-exponential quadrature.
"""
import math

import numpy as np
import pytest

from inverse_square_oscillator.numerics.quadrature import (
    half_line_rule,
    inner_product,
    integrate,
    line_rule,
    outer_cutoff,
    refine,
)
from inverse_square_oscillator.utils.exceptions import QuadratureError


def test_gaussian_calibration():
    value, error = integrate(lambda x: np.exp(-x ** 2), 8.0)
    assert value == pytest.approx(math.sqrt(math.pi), abs=1e-12)
    assert error <= 1e-10


def test_endpoint_singularity():
    """x^(2 c2 - 1) e^{-x^2} on (0, inf) with c2 = 1/4 equals Gamma(1/4) / 2."""
    value, _ = integrate(lambda x: np.abs(x) ** -0.5 * np.exp(-x ** 2), 8.0, both_sides=False)
    assert value == pytest.approx(math.gamma(0.25) / 2.0, abs=1e-10)


def test_rule_layout():
    half = half_line_rule(8.0, 4)
    assert np.all(half.nodes > 0)
    assert np.all(np.diff(half.nodes) > 0)
    assert np.all(half.weights > 0)
    full = line_rule(8.0, 4)
    assert len(full) == 2 * len(half)
    assert not np.any(full.nodes == 0)
    assert np.allclose(full.nodes[:len(half)], -half.nodes[::-1])


def test_rule_integrates_polynomial_on_panels():
    rule = half_line_rule(2.0, 5)
    assert rule.integrate(rule.nodes ** 3) == pytest.approx(4.0, abs=1e-12)


def test_inner_product_parity():
    even = lambda x: np.exp(-x ** 2 / 2)
    odd = lambda x: x * np.exp(-x ** 2 / 2)
    assert abs(inner_product(even, odd, 8.0)) <= 1e-12
    assert inner_product(odd, odd, 8.0).real == pytest.approx(math.sqrt(math.pi) / 2, abs=1e-11)


def test_inner_product_conjugates_first_argument():
    f = lambda x: 1j * np.exp(-x ** 2)
    g = lambda x: np.exp(-x ** 2)
    assert inner_product(f, g, 8.0) == pytest.approx(-1j * math.sqrt(math.pi / 2), abs=1e-11)


def test_refine_reports_non_convergence():
    calls = []

    def measure(rule):
        calls.append(rule.level)
        return np.array([float(rule.level)])

    with pytest.raises(QuadratureError):
        refine(measure, 8.0, tol=1e-10, max_level=5)
    assert calls == [3, 4, 5]


def test_outer_cutoff():
    assert outer_cutoff(4.0, 1.0) == 8.0
    assert outer_cutoff(100.0, 1.0) == 20.0
    assert outer_cutoff(100.0, 0.5) == 10.0


def test_rule_inner_conjugates_first_argument():
    rule = line_rule(8.0, 5)
    f = 1j * np.exp(-rule.nodes ** 2)
    g = np.exp(-rule.nodes ** 2)
    assert rule.inner(f, g) == pytest.approx(-1j * math.sqrt(math.pi / 2), abs=1e-11)
