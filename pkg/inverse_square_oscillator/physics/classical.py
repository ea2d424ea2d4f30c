"""
Classical motion in V(x) = m omega^2 x^2 / 2 + g / x^2.

The closed-form trajectory is x(t) = +-{A sin(2 omega (t + t0)) + E/(m omega^2)}^(1/2)
with A = sqrt(E^2 - 2 g m omega^2) / (m omega^2). A fixed-step RK4 integrator
serves as an independent oracle.
"""
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.signal import find_peaks

from inverse_square_oscillator.physics.model import PhysicalParams
from inverse_square_oscillator.utils.exceptions import IntegrationError, ParameterError
from inverse_square_oscillator.utils.logger import logger


@dataclass(frozen=True)
class ClassicalState:
    """Phase-space point (x, v) at time t; x is never 0."""
    x: float
    v: float
    t: float = 0.0

    def __post_init__(self):
        if self.x == 0.0:
            raise ParameterError("classical state cannot sit on the barrier x = 0")


@dataclass(frozen=True)
class TrajectoryConstants:
    """Integration constants (E, t0, sign) of the closed-form solution."""
    E: float
    t0: float
    sign: int


def potential(x, params: PhysicalParams):
    return 0.5 * params.m * params.omega ** 2 * x ** 2 + params.g / x ** 2


def energy(state: ClassicalState, params: PhysicalParams) -> float:
    """E = m v^2 / 2 + m omega^2 x^2 / 2 + g / x^2."""
    return 0.5 * params.m * state.v ** 2 + potential(state.x, params)


def minimal_energy(params: PhysicalParams) -> float:
    """Bottom of the potential, omega sqrt(2 g m)."""
    return params.omega * math.sqrt(2.0 * params.g * params.m)


def equilibrium_radius(params: PhysicalParams) -> float:
    """(2 g / (m omega^2))^(1/4)."""
    return (2.0 * params.g / (params.m * params.omega ** 2)) ** 0.25


def _amplitude(E: float, params: PhysicalParams) -> float:
    if params.g < 0:
        raise ParameterError(f"classical trajectories need g >= 0, got {params.g}")
    E_min = minimal_energy(params)
    if E < E_min * (1.0 - 1e-14):
        raise ParameterError(f"energy {E} below the potential minimum {E_min}")
    mw2 = params.m * params.omega ** 2
    return math.sqrt(max(E * E - 2.0 * params.g * params.m * params.omega ** 2, 0.0)) / mw2


def closed_form_trajectory(E: float, t0: float, sign: int, t, params: PhysicalParams):
    """
    Position on the closed-form trajectory.

    Args:
        E (float): Energy, at least omega sqrt(2 g m)
        t0 (float): Time offset
        sign (int): Half line of the motion, +1 or -1
        t: Time or array of times
        params (PhysicalParams): Physical parameters

    Returns:
        Position(s) x(t), all of sign `sign`

    Raises:
        ParameterError: For sub-minimal energy or a sign other than +-1
    """
    if sign not in (1, -1):
        raise ParameterError(f"trajectory sign must be +1 or -1, got {sign}")
    A = _amplitude(E, params)
    mw2 = params.m * params.omega ** 2
    bracket = A * np.sin(2.0 * params.omega * (np.asarray(t) + t0)) + E / mw2
    return sign * np.sqrt(np.maximum(bracket, 0.0))


def closed_form_velocity(E: float, t0: float, sign: int, t, params: PhysicalParams):
    """dx/dt = A omega cos(2 omega (t + t0)) / x."""
    A = _amplitude(E, params)
    x = closed_form_trajectory(E, t0, sign, t, params)
    return A * params.omega * np.cos(2.0 * params.omega * (np.asarray(t) + t0)) / x


def trajectory_constants(state: ClassicalState, params: PhysicalParams) -> TrajectoryConstants:
    """Recover (E, t0, sign) of the closed-form trajectory through a state."""
    E = energy(state, params)
    A = _amplitude(E, params)
    sign = 1 if state.x > 0 else -1
    if A == 0.0:
        return TrajectoryConstants(E=E, t0=0.0, sign=sign)
    mw2 = params.m * params.omega ** 2
    sin_phi = (state.x ** 2 - E / mw2) / A
    cos_phi = state.x * state.v / (A * params.omega)
    phi = math.atan2(sin_phi, cos_phi)
    return TrajectoryConstants(E=E, t0=phi / (2.0 * params.omega) - state.t, sign=sign)


def _acceleration(x: float, params: PhysicalParams) -> float:
    return -params.omega ** 2 * x + 2.0 * params.g / (params.m * x ** 3)


def integrate_trajectory(initial: ClassicalState, dt: float, steps: int,
                         params: PhysicalParams) -> List[ClassicalState]:
    """
    Fixed-step RK4 integration of x'' = -omega^2 x + 2 g / (m x^3).

    Args:
        initial (ClassicalState): Starting point
        dt (float): Time step
        steps (int): Number of steps
        params (PhysicalParams): Physical parameters

    Returns:
        List[ClassicalState]: steps + 1 states including the initial one

    Raises:
        IntegrationError: If a step lands on or across x = 0
    """
    if dt <= 0 or steps < 0:
        raise ParameterError(f"need dt > 0 and steps >= 0, got dt={dt}, steps={steps}")
    x, v, t = initial.x, initial.v, initial.t
    side = math.copysign(1.0, x)
    states = [initial]
    for step in range(steps):
        k1x, k1v = v, _acceleration(x, params)
        x2 = x + 0.5 * dt * k1x
        k2x, k2v = v + 0.5 * dt * k1v, _acceleration(x2, params)
        x3 = x + 0.5 * dt * k2x
        k3x, k3v = v + 0.5 * dt * k2v, _acceleration(x3, params)
        x4 = x + dt * k3x
        k4x, k4v = v + dt * k3v, _acceleration(x4, params)
        x_next = x + dt * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
        v_next = v + dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        if x_next * side <= 0 or min(x2 * side, x3 * side, x4 * side) <= 0:
            raise IntegrationError(
                f"step {step} at t = {t:.6g} crosses x = 0; reduce dt (currently {dt})")
        x, v, t = x_next, v_next, t + dt
        states.append(ClassicalState(x=x, v=v, t=t))
    return states


def measure_period(states: List[ClassicalState]) -> float:
    """
    Mean spacing of successive maxima of |x|, refined by parabolic interpolation.

    Raises:
        IntegrationError: If fewer than two maxima are present
    """
    t = np.array([s.t for s in states])
    r = np.abs(np.array([s.x for s in states]))
    peaks, _ = find_peaks(r)
    if len(peaks) < 2:
        raise IntegrationError(f"need two maxima to measure a period, found {len(peaks)}")
    refined = []
    for p in peaks:
        y0, y1, y2 = r[p - 1], r[p], r[p + 1]
        denom = y0 - 2.0 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        refined.append(t[p] + shift * (t[p + 1] - t[p]))
    period = float(np.mean(np.diff(refined)))
    logger.debug(f"Measured period {period} from {len(peaks)} maxima")
    return period


def energy_drift(states: List[ClassicalState], params: PhysicalParams) -> float:
    """Maximum relative deviation of the energy from its initial value."""
    energies = np.array([energy(s, params) for s in states])
    return float(np.max(np.abs(energies - energies[0])) / abs(energies[0]))


@dataclass(frozen=True)
class TrajectorySample:
    """Every sample_every-th integrated state beside the closed form at the same times."""
    states: List[ClassicalState]
    constants: TrajectoryConstants
    t: np.ndarray
    x: np.ndarray
    x_closed: np.ndarray
    E: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.x_closed - self.x)))

    def rows(self) -> List[Tuple[float, float, float, float]]:
        return list(zip(self.t.tolist(), self.x.tolist(), self.x_closed.tolist(), self.E.tolist()))


def sample_trajectory(initial: ClassicalState, dt: float, steps: int, params: PhysicalParams,
                      sample_every: int = 1) -> TrajectorySample:
    """
    Integrate a trajectory and sample it against the closed-form solution.

    Args:
        initial (ClassicalState): Starting point, x != 0
        dt (float): RK4 step
        steps (int): Number of steps
        params (PhysicalParams): Physical parameters
        sample_every (int): Keep every n-th state in the sampled columns

    Returns:
        TrajectorySample: Full state list plus the sampled (t, x, x_closed, E) columns
    """
    if sample_every < 1:
        raise ParameterError(f"sample_every must be at least 1, got {sample_every}")
    states = integrate_trajectory(initial, dt, steps, params)
    sampled = states[::sample_every]
    constants = trajectory_constants(initial, params)
    t = np.array([s.t for s in sampled])
    x = np.array([s.x for s in sampled])
    closed = closed_form_trajectory(constants.E, constants.t0, constants.sign, t, params)
    sample = TrajectorySample(states=states, constants=constants, t=t, x=x, x_closed=closed,
                              E=np.array([energy(s, params) for s in sampled]))
    logger.debug(f"Closed form vs RK4 max deviation {sample.max_deviation:.3e} over {len(sampled)} samples")
    return sample
