"""
Wave-packet dynamics in the sigma1 eigenbasis.

Packets are expanded into the two eigenstate series, evolved by phases
e^{-i (2n + c_s) omega T} and re-synthesized on the quadrature nodes that
also serve as their grid. The tunneling current through x = 0 follows from
the small-x expansion psi ~ A x^(a + 1/2) + B x^(1/2 - a).
"""
import math
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from inverse_square_oscillator.numerics.quadrature import QuadratureRule, line_rule, refine
from inverse_square_oscillator.physics.model import Exponents, PhysicalParams
from inverse_square_oscillator.quantum.eigenbasis import Sigma1Basis
from inverse_square_oscillator.utils.exceptions import ParameterError, TruncationError
from inverse_square_oscillator.utils.logger import logger

EXPANSION_TOL = 1e-10
COPY_TOL = 1e-3
LEFT_MASS_TOL = 1e-10
DISPLAY_POINTS = 2000
DISPLAY_GEOMETRIC_FRACTION = 0.25
DISPLAY_X_MIN = 1e-6
DISPLAY_X_SWITCH = 0.1


@dataclass(frozen=True)
class WavePacket:
    """State sampled on quadrature nodes together with its expansion coefficients."""
    grid: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    coeffs: Tuple[np.ndarray, np.ndarray]
    n_max: int
    basis: Sigma1Basis
    residual: float = 0.0
    time: float = 0.0

    def norm_from_coefficients(self) -> float:
        return float(sum(np.sum(np.abs(c) ** 2) for c in self.coeffs))

    def norm_from_grid(self) -> float:
        return float(np.dot(self.weights, np.abs(self.values) ** 2))

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def masses(self) -> Tuple[float, float]:
        """Probability on R+ and on R-."""
        rho = self.density()
        right = self.grid > 0
        return float(np.dot(self.weights[right], rho[right])), float(np.dot(self.weights[~right], rho[~right]))


@dataclass(frozen=True)
class CopyReport:
    """Outcome of evolving a right-supported Gaussian to T = k pi / omega."""
    k: int
    a: float
    mass_right: float
    mass_left: float
    l1_error: float
    residual: float
    predicted_right: float
    predicted_left: float


def gaussian_packet(center: float, width: float) -> Callable[[np.ndarray], np.ndarray]:
    """
    Normalized amplitude (2 / (pi width^2))^(1/4) exp(-(x - center)^2 / width^2) on x > 0.

    The density has standard deviation width / 2.
    """
    if width <= 0:
        raise ParameterError(f"packet width must be positive, got {width}")
    norm = (2.0 / (math.pi * width ** 2)) ** 0.25

    def packet(x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, norm * np.exp(-((x - center) / width) ** 2), 0.0).astype(complex)

    return packet


def left_mass_of_gaussian(center: float, width: float) -> float:
    """Mass the untruncated Gaussian density would put on x < 0."""
    return 0.5 * special.erfc(math.sqrt(2.0) * center / width)


def expand(psi: Callable[[np.ndarray], np.ndarray], basis: Sigma1Basis, n_max: Optional[int] = None,
           params: Optional[PhysicalParams] = None, tol: float = EXPANSION_TOL,
           residual_tol: Optional[float] = None) -> WavePacket:
    """
    Project a state onto the sigma1 eigenbasis.

    Args:
        psi: Square-integrable function on the punctured line
        basis (Sigma1Basis): Eigenbasis
        n_max (int): Truncation, at most basis.n_max; defaults to basis.n_max
        params (PhysicalParams): Physical parameters, defaults to the basis' own
        tol (float): Quadrature tolerance on the coefficients
        residual_tol (float): Bound on the reconstruction residual norm^2

    Returns:
        WavePacket: Coefficients, samples on the converged nodes and residual

    Raises:
        TruncationError: If the residual exceeds residual_tol
    """
    params = params or basis.params
    if n_max is not None and n_max != basis.n_max:
        basis = Sigma1Basis(basis.exps, params, n_max)
    size = basis.n_max + 1

    def measure(rule: QuadratureRule):
        return basis.stacked(rule.nodes) @ (rule.weights * psi(rule.nodes))

    coeffs, rule, change = refine(measure, basis.x_max, tol)
    values = np.asarray(psi(rule.nodes), dtype=complex)
    reconstruction = basis.stacked(rule.nodes).T @ coeffs
    residual = float(rule.integrate(np.abs(values - reconstruction) ** 2))
    logger.info(f"Expanded packet into {2 * size} modes: residual {residual:.3e}, "
                f"coefficient change {change:.1e}")
    if residual_tol is not None and residual > residual_tol:
        raise TruncationError(f"expansion residual {residual:.3e} exceeds {residual_tol:.1e}; increase n_max")
    return WavePacket(
        grid=rule.nodes,
        weights=rule.weights,
        values=values,
        coeffs=(coeffs[:size], coeffs[size:]),
        n_max=basis.n_max,
        basis=basis,
        residual=residual,
    )


def packet_from_coefficients(c1: Sequence[complex], c2: Sequence[complex], basis: Sigma1Basis,
                             level: int = 5) -> WavePacket:
    """Packet defined directly by its coefficients, sampled on a fixed rule."""
    size = basis.n_max + 1
    c1 = np.pad(np.asarray(c1, dtype=complex), (0, size - len(c1)))
    c2 = np.pad(np.asarray(c2, dtype=complex), (0, size - len(c2)))
    rule = line_rule(basis.x_max, level)
    values = basis.matrix(1, rule.nodes).T @ c1 + basis.matrix(2, rule.nodes).T @ c2
    return WavePacket(grid=rule.nodes, weights=rule.weights, values=values, coeffs=(c1, c2),
                      n_max=basis.n_max, basis=basis)


def synthesize(packet: WavePacket, x) -> np.ndarray:
    """psi(x) = sum_n c_n^(1) psi_n^(1)(x) + c_n^(2) psi_n^(2)(x)."""
    x = np.asarray(x, dtype=float)
    c1, c2 = packet.coeffs
    return packet.basis.matrix(1, x).T @ c1 + packet.basis.matrix(2, x).T @ c2


def evolve(packet: WavePacket, T: float, params: PhysicalParams) -> WavePacket:
    """Multiply c_n^(s) by exp(-i (2n + c_s) omega T) and re-synthesize on the grid."""
    wt = params.omega * T
    c1, c2 = packet.coeffs
    basis = packet.basis
    evolved = (c1 * np.exp(-1j * basis.levels(1) * wt), c2 * np.exp(-1j * basis.levels(2) * wt))
    moved = replace(packet, coeffs=evolved, time=packet.time + T)
    return replace(moved, values=synthesize(moved, packet.grid))


def current_coefficients(packet: WavePacket, side: int = 1) -> Tuple[complex, complex]:
    """
    Leading coefficients (A, B) of psi ~ A |x|^(a + 1/2) + B |x|^(1/2 - a) near +-0.

    Series 1 is odd, so A flips sign on the left.
    """
    basis = packet.basis
    kappa = basis.params.kappa
    a = basis.exps.a
    c1, c2 = packet.coeffs
    A = kappa ** (a + 0.5) * np.dot(basis.small_x_coefficients(1), c1)
    B = kappa ** (0.5 - a) * np.dot(basis.small_x_coefficients(2), c2)
    return (complex(A), complex(B)) if side > 0 else (complex(-A), complex(B))


def probability_current_at_origin(packet: WavePacket, params: PhysicalParams, side: int = 1) -> float:
    """
    j(+-0) = (hbar / 2im) W[psi*, psi] from the small-x expansion.

    On the right W = 2a (A B* - A* B); on the left the expansion variable is
    |x| and the Wronskian changes sign, which together with A -> -A gives the
    same current.

    Args:
        packet (WavePacket): State with coefficients
        params (PhysicalParams): Physical parameters
        side (int): +1 for j(+0), -1 for j(-0)

    Returns:
        float: Probability current through the origin
    """
    A, B = current_coefficients(packet, side)
    a = packet.basis.exps.a
    wronskian_u = 2.0 * a * (A * np.conj(B) - np.conj(A) * B)
    wronskian_x = wronskian_u if side > 0 else -wronskian_u
    return float(np.real(params.hbar / (2j * params.m) * wronskian_x))


def numeric_current(packet: WavePacket, x: float, params: PhysicalParams, step: float = 1e-3) -> float:
    """Current (hbar / m) Im(psi* psi') at x by central differences of the synthesized state."""
    h = step * abs(x)
    psi = synthesize(packet, np.array([x - h, x, x + h]))
    derivative = (psi[2] - psi[0]) / (2.0 * h)
    return float(params.hbar / params.m * np.imag(np.conj(psi[1]) * derivative))


def extrapolated_current(packet: WavePacket, params: PhysicalParams, side: int = 1,
                         points: Sequence[float] = (1e-3, 1e-4, 1e-5)) -> float:
    """Numeric current extrapolated to the origin with corrections |x|^(2 c2) and x^2."""
    c2 = packet.basis.exps.c2
    xs = np.array([p * params.length_scale for p in points])
    values = np.array([numeric_current(packet, side * x, params) for x in xs])
    A = np.column_stack([np.ones_like(xs), xs ** (2.0 * c2), xs ** 2])
    return float(np.linalg.solve(A, values)[0])


def caustic_density(rho_initial: Callable[[np.ndarray], np.ndarray], a: float,
                    k: int) -> Callable[[np.ndarray], np.ndarray]:
    """rho_f(x) = cos^2(a k pi) rho_i(x) + sin^2(a k pi) rho_i(-x)."""
    same = math.cos(a * k * math.pi) ** 2
    mirror = math.sin(a * k * math.pi) ** 2

    def rho_final(x):
        x = np.asarray(x, dtype=float)
        return same * rho_initial(x) + mirror * rho_initial(-x)

    return rho_final


def _copy_packet(rho_width: float, center: float, a: float, n_max: int, params: PhysicalParams,
                 residual_tol: float):
    if center <= 0:
        raise ParameterError(f"packet center must be positive, got {center}")
    leak = left_mass_of_gaussian(center, rho_width)
    if leak > LEFT_MASS_TOL:
        raise ParameterError(f"Gaussian puts {leak:.2e} of its mass on R-; move it right or narrow it")
    exps = Exponents(a=a, c1=1.0 + a, c2=1.0 - a)
    psi = gaussian_packet(center, rho_width)
    packet = expand(psi, Sigma1Basis(exps, params, n_max), params=params, residual_tol=residual_tol)
    return psi, packet


def _copy_report(psi: Callable[[np.ndarray], np.ndarray], packet: WavePacket, a: float, k: int,
                 params: PhysicalParams) -> Tuple[CopyReport, WavePacket]:
    final = evolve(packet, k * math.pi / params.omega, params)

    def rho_initial(x):
        return np.abs(psi(x)) ** 2

    predicted = caustic_density(rho_initial, a, k)(final.grid)
    l1_error = float(np.dot(final.weights, np.abs(final.density() - predicted)))
    mass_right, mass_left = final.masses()
    logger.info(f"Copy experiment a = {a}, k = {k}: masses ({mass_right:.6f}, {mass_left:.6f}), "
                f"L1 error {l1_error:.3e}")
    report = CopyReport(
        k=k,
        a=a,
        mass_right=mass_right,
        mass_left=mass_left,
        l1_error=l1_error,
        residual=packet.residual,
        predicted_right=math.cos(a * k * math.pi) ** 2,
        predicted_left=math.sin(a * k * math.pi) ** 2,
    )
    return report, final


def copy_experiment(rho_width: float, center: float, a: float, k: int, n_max: int,
                    params: PhysicalParams, residual_tol: float = COPY_TOL ** 2) -> CopyReport:
    """
    Evolve a right-supported Gaussian to T = k pi / omega and compare with the copy law.

    Args:
        rho_width (float): Gaussian width parameter (density std is width / 2)
        center (float): Gaussian center, > 0
        a (float): Exponent a in [1/2, 1]
        k (int): Number of half periods
        n_max (int): Truncation per series
        params (PhysicalParams): Physical parameters
        residual_tol (float): Bound on the expansion residual

    Returns:
        CopyReport: Mass split, L1 error against the copy law and residual

    Raises:
        ParameterError: If the Gaussian leaks onto R- beyond 1e-10
        TruncationError: If the expansion residual is too large
    """
    psi, packet = _copy_packet(rho_width, center, a, n_max, params, residual_tol)
    return _copy_report(psi, packet, a, k, params)[0]


def copy_sequence(rho_width: float, center: float, a: float, k_max: int, n_max: int,
                  params: PhysicalParams,
                  residual_tol: float = COPY_TOL ** 2) -> List[Tuple[CopyReport, WavePacket]]:
    """Snapshots at T = k pi / omega for k = 0..k_max from a single expansion."""
    psi, packet = _copy_packet(rho_width, center, a, n_max, params, residual_tol)
    return [_copy_report(psi, packet, a, k, params) for k in range(k_max + 1)]


def display_grid(x_max: float, points: int = DISPLAY_POINTS, length_scale: float = 1.0) -> np.ndarray:
    """
    Output grid: per half line, geometric spacing near 0 then uniform up to x_max.

    Returns:
        np.ndarray: Ascending positions on both half lines, 0 excluded
    """
    n_geo = int(points * DISPLAY_GEOMETRIC_FRACTION)
    switch = DISPLAY_X_SWITCH * length_scale
    near = np.geomspace(DISPLAY_X_MIN * length_scale, switch, n_geo, endpoint=False)
    far = np.linspace(switch, x_max, points - n_geo)
    half = np.concatenate([near, far])
    return np.concatenate([-half[::-1], half])
