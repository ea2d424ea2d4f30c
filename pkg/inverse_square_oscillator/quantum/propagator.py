"""
Feynman kernel of the U = sigma1 extension.

Three evaluation paths are provided: the Bessel closed form off caustic
times, the epsilon-regularized closed form from the bilinear Laguerre
generating function, and the damped spectral sum over both eigenstate
series. At caustic times T = k pi / omega the kernel collapses onto
delta(x_f - x_i) and delta(x_f + x_i) with the weights of caustic_weights.
"""
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np
from scipy import special

from inverse_square_oscillator.numerics.specfun import bessel_i
from inverse_square_oscillator.physics.model import Exponents, PhysicalParams
from inverse_square_oscillator.quantum.eigenbasis import Sigma1Basis
from inverse_square_oscillator.utils.exceptions import ParameterError, TruncationError
from inverse_square_oscillator.utils.logger import logger

CAUSTIC_TOL = 1e-9
DEFAULT_EPSILONS = (0.02, 0.01, 0.005)
SPECTRAL_TAIL_TOL = 1e-10
TAIL_WINDOW = 8


@dataclass(frozen=True)
class KernelRequest:
    """Arguments K(x_f, x_i; T); epsilon and n_max only matter for the spectral path."""
    x_f: float
    x_i: float
    T: float
    epsilon: float = 0.0
    n_max: int = 0

    def __post_init__(self):
        if self.x_f == 0 or self.x_i == 0:
            raise ParameterError("kernel arguments must avoid x = 0")
        if not self.T > 0:
            raise ParameterError(f"duration must be positive, got {self.T}")
        if self.epsilon < 0:
            raise ParameterError(f"regularizer must be non-negative, got {self.epsilon}")

    def phase(self, params: PhysicalParams) -> float:
        return params.omega * self.T

    def is_caustic(self, params: PhysicalParams) -> bool:
        return abs(math.sin(self.phase(params))) < CAUSTIC_TOL

    def reduced(self, params: PhysicalParams) -> Tuple[int, float]:
        """(k, tau) with omega T = k pi + tau and 0 <= tau < pi."""
        k = math.floor(self.phase(params) / math.pi)
        return k, self.phase(params) - k * math.pi


@dataclass(frozen=True)
class CausticWeights:
    """Coefficients of delta(x_f - x_i) and delta(x_f + x_i) at T = k pi / omega."""
    k: int
    same_side: complex
    mirror: complex

    def density_fractions(self) -> Tuple[float, float]:
        return abs(self.same_side) ** 2, abs(self.mirror) ** 2


@dataclass(frozen=True)
class SpectralKernel:
    """Truncated spectral sum with its tail estimate."""
    value: complex
    tail: float
    n_terms: int
    epsilon: float


def caustic_weights(k: int, a: float) -> CausticWeights:
    """
    Weights (-1)^k cos(a k pi) and i (-1)^k sin(a k pi).

    Args:
        k (int): Number of half periods, k >= 1
        a (float): Exponent a in [1/2, 1]

    Returns:
        CausticWeights: same-side and mirror weights
    """
    if k < 1:
        raise ParameterError(f"caustic index must be >= 1, got {k}")
    if not 0.5 <= a <= 1.0:
        raise ParameterError(f"exponent a = {a} outside [1/2, 1]")
    sign = (-1) ** k
    return CausticWeights(k=k, same_side=complex(sign * math.cos(a * k * math.pi)),
                          mirror=complex(0.0, sign * math.sin(a * k * math.pi)))


def _series_phase(exps: Exponents, k: int) -> Tuple[complex, complex]:
    """e^{-i c_s k pi} for both series."""
    return np.exp(-1j * exps.c1 * k * math.pi), np.exp(-1j * exps.c2 * k * math.pi)


def series_kernels_closed(x_f: float, x_i: float, tau: float, exps: Exponents,
                          params: PhysicalParams) -> Tuple[complex, complex]:
    """
    The two series parts of the closed form at 0 < tau = omega T < pi.

    Returns:
        Tuple of S1 (odd, order a) and S2 (even, order -a)
    """
    s = math.sin(tau)
    kappa2 = params.kappa ** 2
    r = abs(x_f * x_i)
    prefactor = (kappa2 / (2j * s)) * math.sqrt(r) * np.exp(
        1j * kappa2 * (math.cos(tau) / s) * (x_f ** 2 + x_i ** 2) / 2.0)
    z = -1j * kappa2 * r / s
    side = math.copysign(1.0, x_f * x_i)
    S1 = prefactor * side * bessel_i(exps.a, z)
    S2 = prefactor * bessel_i(-exps.a, z)
    return complex(S1), complex(S2)


def kernel_closed(req: KernelRequest, exps: Exponents, params: PhysicalParams) -> complex:
    """
    Closed-form kernel off caustic times.

    Same side: prefactor (I_a + I_-a); across sides: prefactor (-I_a + I_-a),
    Bessel argument (m omega / i hbar) |x_f x_i| / sin(omega T). Beyond the
    first half period each series picks up e^{-i c_s k pi}.

    Raises:
        ParameterError: At a caustic time; use caustic_weights there
    """
    if req.is_caustic(params):
        raise ParameterError(
            f"T = {req.T} is a caustic time (|sin omega T| < {CAUSTIC_TOL}); use caustic_weights")
    k, tau = req.reduced(params)
    S1, S2 = series_kernels_closed(req.x_f, req.x_i, tau, exps, params)
    p1, p2 = _series_phase(exps, k)
    return complex(p1 * S1 + p2 * S2)


def _entire_bessel(nu: float, q: complex) -> Tuple[complex, float]:
    """
    sum_k q^k / (k! Gamma(k + nu + 1)) = q^(-nu/2) I_nu(2 sqrt q).

    Returned as (scaled value, log scale) with the growth e^{|Re 2 sqrt q|} split off.
    """
    root = np.sqrt(complex(q))
    w = 2.0 * root
    if w == 0:
        return complex(special.rgamma(nu + 1.0)), 0.0
    value = np.exp(-nu * np.log(root)) * special.ive(nu, w)
    return complex(value), abs(w.real)


def series_kernel_regularized(s: int, x_f: float, x_i: float, T: float, epsilon: float,
                              exps: Exponents, params: PhysicalParams) -> complex:
    """
    One series of the kernel at complex duration T - i epsilon / (2 omega).

    With t = exp(-2 i omega T - epsilon), u = y_f^2, v = y_i^2 and nu = c - 1
    the bilinear Laguerre generating function gives
    kappa (y_f y_i)^(c - 1/2) e^{-(u+v)/2} e^{-i c (omega T - i epsilon/2)}
    (1 - t)^(-c) exp(-(u+v) t / (1 - t)) E_nu(u v t / (1 - t)^2).
    """
    c = exps.c(s)
    nu = c - 1.0
    kappa = params.kappa
    y_f, y_i = kappa * abs(x_f), kappa * abs(x_i)
    u, v = y_f * y_f, y_i * y_i
    wt = params.omega * T
    t = np.exp(-2j * wt - epsilon)
    one_minus_t = 1.0 - t
    if abs(one_minus_t) < CAUSTIC_TOL:
        raise ParameterError("regularized kernel needs epsilon > 0 at caustic times")
    entire, scale = _entire_bessel(nu, u * v * t / one_minus_t ** 2)
    exponent = -0.5 * (u + v) - (u + v) * t / one_minus_t + scale - 1j * c * (wt - 0.5j * epsilon)
    parity = math.copysign(1.0, x_f * x_i) if s == 1 else 1.0
    value = (kappa * parity * (y_f * y_i) ** (c - 0.5) * np.exp(exponent)
             * np.exp(-c * np.log(one_minus_t)) * entire)
    return complex(value)


def kernel_regularized(req: KernelRequest, exps: Exponents, params: PhysicalParams) -> complex:
    """Sum of both regularized series; equals kernel_closed at epsilon = 0 off caustics."""
    return sum(series_kernel_regularized(s, req.x_f, req.x_i, req.T, req.epsilon, exps, params)
               for s in (1, 2))


def spectral_terms_needed(epsilon: float, tol: float = SPECTRAL_TAIL_TOL) -> int:
    """Smallest n with e^{-n epsilon} below tol."""
    if epsilon <= 0:
        raise ParameterError(f"spectral sums need epsilon > 0, got {epsilon}")
    return int(math.ceil(-math.log(tol) / epsilon))


def _spectral_terms(req: KernelRequest, basis: Sigma1Basis, params: PhysicalParams) -> np.ndarray:
    """Per-mode terms psi_n(x_f) e^{-i E_n T - (2n + c) epsilon / 2} psi_n(x_i), shape (2, n_max + 1)."""
    wt = params.omega * req.T
    terms = []
    for s in (1, 2):
        rows = basis.matrix(s, np.array([req.x_f, req.x_i]))
        lam = basis.levels(s)
        terms.append(rows[:, 0] * rows[:, 1] * np.exp(-1j * lam * wt - 0.5 * lam * req.epsilon))
    return np.array(terms)


def kernel_spectral(req: KernelRequest, basis: Sigma1Basis, params: PhysicalParams,
                    tol: float = None) -> SpectralKernel:
    """
    Damped spectral sum S^(1) + S^(2) truncated at req.n_max.

    Args:
        req (KernelRequest): Arguments with epsilon > 0 and n_max >= 1
        basis (Sigma1Basis): Basis holding at least n_max + 1 levels per series
        params (PhysicalParams): Physical parameters
        tol (float): Optional bound on the tail estimate

    Returns:
        SpectralKernel: Value, geometric tail estimate and term count

    Raises:
        TruncationError: If the tail estimate exceeds tol
    """
    if req.epsilon <= 0:
        raise ParameterError(f"spectral kernel needs epsilon > 0, got {req.epsilon}")
    n_max = req.n_max or basis.n_max
    if n_max < 1 or n_max > basis.n_max:
        raise ParameterError(f"n_max = {n_max} outside [1, {basis.n_max}]")
    terms = _spectral_terms(req, basis, params)[:, :n_max + 1]
    ratio = math.exp(-req.epsilon)
    recent = np.max(np.abs(terms[:, -TAIL_WINDOW:]), axis=1)
    tail = float(np.sum(recent) * ratio / (1.0 - ratio))
    if tol is not None and tail > tol:
        raise TruncationError(f"spectral tail {tail:.3e} exceeds {tol:.1e} at n_max = {n_max}, epsilon = {req.epsilon}")
    return SpectralKernel(value=complex(np.sum(terms)), tail=tail, n_terms=n_max + 1, epsilon=req.epsilon)


def richardson(epsilons: Sequence[float], values: Sequence[complex]) -> complex:
    """Neville extrapolation of values(epsilon) to epsilon = 0."""
    eps = list(epsilons)
    table = [complex(v) for v in values]
    for level in range(1, len(eps)):
        for i in range(len(eps) - level):
            j = i + level
            table[i] = (eps[j] * table[i] - eps[i] * table[i + 1]) / (eps[j] - eps[i])
    return table[0]


def kernel_spectral_extrapolated(x_f: float, x_i: float, T: float, exps: Exponents,
                                 params: PhysicalParams,
                                 epsilons: Sequence[float] = DEFAULT_EPSILONS,
                                 basis: Sigma1Basis = None) -> complex:
    """
    Spectral kernel extrapolated to epsilon -> 0 over the given regularizers.

    One basis large enough for the smallest epsilon is shared by all sums.
    """
    n_max = spectral_terms_needed(min(epsilons))
    if basis is None or basis.n_max < n_max:
        basis = Sigma1Basis(exps, params, n_max)
    values = []
    for eps in epsilons:
        n_eps = spectral_terms_needed(eps)
        result = kernel_spectral(KernelRequest(x_f, x_i, T, eps, n_eps), basis, params)
        values.append(result.value)
        logger.debug(f"Spectral kernel eps = {eps}: {result.value} (tail {result.tail:.2e}, {result.n_terms} terms)")
    return richardson(epsilons, values)


def mehler_kernel(x_f: float, x_i: float, T: float, params: PhysicalParams) -> complex:
    """
    Harmonic-oscillator propagator with the Maslov phase e^{-i pi k / 2}.

    sqrt(m omega / (2 pi i hbar |sin omega T|))
    exp(i m omega ((x_f^2 + x_i^2) cos omega T - 2 x_f x_i) / (2 hbar sin omega T)).
    """
    wt = params.omega * T
    s = math.sin(wt)
    if abs(s) < CAUSTIC_TOL:
        raise ParameterError("Mehler kernel is singular at caustic times")
    k = math.floor(wt / math.pi)
    kappa2 = params.kappa ** 2
    amplitude = np.sqrt(kappa2 / (2j * math.pi * abs(s)))
    phase = 1j * kappa2 * ((x_f ** 2 + x_i ** 2) * math.cos(wt) - 2.0 * x_f * x_i) / (2.0 * s)
    return complex(np.exp(-0.5j * math.pi * k) * amplitude * np.exp(phase))


def caustic_prediction(weights: CausticWeights, f: Callable[[np.ndarray], np.ndarray], x) -> np.ndarray:
    """Action of the caustic kernel on a test function: same_side f(x) + mirror f(-x)."""
    x = np.asarray(x, dtype=float)
    return weights.same_side * f(x) + weights.mirror * f(-x)
