"""
Tests for classical trajectories.
"""
import math

import numpy as np
import pytest

from inverse_square_oscillator.physics.classical import (
    ClassicalState,
    closed_form_trajectory,
    closed_form_velocity,
    energy,
    energy_drift,
    equilibrium_radius,
    integrate_trajectory,
    measure_period,
    minimal_energy,
    potential,
    sample_trajectory,
    trajectory_constants,
)
from inverse_square_oscillator.physics.model import PhysicalParams
from inverse_square_oscillator.utils.exceptions import IntegrationError, ParameterError


@pytest.fixture
def params():
    return PhysicalParams(g=5.0 / 32.0)


def test_energy_direct_substitution(params):
    assert energy(ClassicalState(x=1.0, v=0.0), params) == pytest.approx(21.0 / 32.0, abs=1e-15)
    assert energy(ClassicalState(x=2.0, v=1.0), params) == pytest.approx(0.5 + 2.0 + 5.0 / 128.0, abs=1e-15)


def test_state_rejects_barrier():
    with pytest.raises(ParameterError):
        ClassicalState(x=0.0, v=1.0)


def test_potential_minimum_is_stationary(params):
    r = equilibrium_radius(params)
    h = 1e-5
    slope = (potential(r + h, params) - potential(r - h, params)) / (2 * h)
    assert abs(slope) < 1e-8
    assert potential(r, params) == pytest.approx(minimal_energy(params), rel=1e-14)
    assert potential(r * 1.01, params) > potential(r, params)


def test_equilibrium_trajectory_is_constant(params):
    E = minimal_energy(params)
    t = np.linspace(0, 5, 11)
    x = closed_form_trajectory(E, 0.3, 1, t, params)
    assert np.allclose(x, equilibrium_radius(params), atol=1e-7)


def test_sub_minimal_energy_rejected(params):
    with pytest.raises(ParameterError):
        closed_form_trajectory(0.9 * minimal_energy(params), 0.0, 1, 0.0, params)


def test_closed_form_is_periodic(params):
    t = np.linspace(0, 3, 50)
    for E, t0, sign in [(2.0, 0.0, 1), (0.8, 1.3, -1), (5.0, -0.4, 1)]:
        x0 = closed_form_trajectory(E, t0, sign, t, params)
        for k in range(1, 6):
            xk = closed_form_trajectory(E, t0, sign, t + k * math.pi, params)
            assert np.max(np.abs(xk - x0)) <= 1e-6
        assert np.all(np.sign(x0) == sign)


def test_closed_form_conserves_energy(params):
    E, t0 = 2.0, 0.2
    h = 1e-6
    for t in np.linspace(0.1, 3.0, 15):
        x = float(closed_form_trajectory(E, t0, 1, t, params))
        v = float(closed_form_trajectory(E, t0, 1, t + h, params) - closed_form_trajectory(E, t0, 1, t - h, params)) / (2 * h)
        assert energy(ClassicalState(x=x, v=v), params) == pytest.approx(E, abs=1e-8)
        assert v == pytest.approx(float(closed_form_velocity(E, t0, 1, t, params)), abs=1e-7)


def test_trajectory_constants_recover_state(params):
    state = ClassicalState(x=-1.2, v=0.4, t=0.7)
    const = trajectory_constants(state, params)
    assert const.sign == -1
    assert float(closed_form_trajectory(const.E, const.t0, const.sign, state.t, params)) == pytest.approx(state.x, abs=1e-12)
    assert float(closed_form_velocity(const.E, const.t0, const.sign, state.t, params)) == pytest.approx(state.v, abs=1e-12)


def test_rk4_matches_closed_form(params):
    E = 2.0
    x0 = float(closed_form_trajectory(E, 0.0, 1, 0.0, params))
    v0 = float(closed_form_velocity(E, 0.0, 1, 0.0, params))
    dt = 1e-4
    states = integrate_trajectory(ClassicalState(x=x0, v=v0), dt, int(round(math.pi / dt)), params)
    t = np.array([s.t for s in states])
    x = np.array([s.x for s in states])
    assert np.max(np.abs(closed_form_trajectory(E, 0.0, 1, t, params) - x)) <= 1e-6
    assert energy_drift(states, params) <= 1e-8


def test_rk4_equilibrium_stays_fixed(params):
    r = equilibrium_radius(params)
    states = integrate_trajectory(ClassicalState(x=r, v=0.0), 1e-3, 2000, params)
    assert max(abs(s.x - r) for s in states) <= 1e-10


def test_period_is_independent_of_initial_condition(params):
    rng = np.random.default_rng(11)
    dt = 5e-4
    for _ in range(10):
        x0 = float(rng.uniform(0.5, 2.5)) * float(rng.choice([-1.0, 1.0]))
        state = ClassicalState(x=x0, v=float(rng.uniform(-1.0, 1.0)))
        states = integrate_trajectory(state, dt, int(round(3.2 * math.pi / dt)), params)
        assert measure_period(states) == pytest.approx(math.pi, abs=1e-5)


def test_integrator_rejects_barrier_crossing():
    weak = PhysicalParams(g=1e-6)
    with pytest.raises(IntegrationError):
        integrate_trajectory(ClassicalState(x=0.01, v=-50.0), 1e-2, 100, weak)


def test_sample_trajectory_columns(params):
    sample = sample_trajectory(ClassicalState(x=1.0, v=0.0), 1e-3, 100, params, sample_every=10)
    assert len(sample.states) == 101
    assert len(sample.t) == len(sample.x) == len(sample.x_closed) == len(sample.E) == 11
    assert sample.t[-1] == pytest.approx(0.1)
    assert np.allclose(sample.E, 21.0 / 32.0, rtol=1e-9)
    assert sample.max_deviation <= 1e-8
    assert sample.rows()[0] == pytest.approx((0.0, 1.0, 1.0, 21.0 / 32.0))


def test_sample_trajectory_rejects_zero_stride(params):
    with pytest.raises(ParameterError):
        sample_trajectory(ClassicalState(x=1.0, v=0.0), 1e-3, 10, params, sample_every=0)
