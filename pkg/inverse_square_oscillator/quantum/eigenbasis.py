"""
Normalizable eigenfunctions for every boundary choice.

Local solutions phi^(s)(y) = y^(c_s - 1/2) e^(-y^2/2) F((c_s - lambda)/2, c_s; y^2)
with y = kappa x are combined piecewise on the two half lines. On the closed
ladders lambda = 2n + c_s the Kummer series terminates and Laguerre
polynomials are used; elsewhere the decaying combination is evaluated through
Tricomi's confluent function, which avoids the cancellation between the two
growing local solutions at large y. Deep levels grow faster, so their switch
point moves in to y^2 = 4 / alpha.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

import mpmath
import numpy as np
from scipy import special

from inverse_square_oscillator.numerics import quadrature
from inverse_square_oscillator.numerics.quadrature import outer_cutoff, refine
from inverse_square_oscillator.numerics.specfun import (
    hermite,
    kummer_m,
    kummer_m_log,
    kummer_m_prime,
    laguerre,
    nearest_pole,
    scaled_tricomi_log,
    KUMMER_LOG_THRESHOLD,
)
from inverse_square_oscillator.physics.model import BoundaryData, Exponents, PhysicalParams
from inverse_square_oscillator.quantum.spectrum import spectral_family, spectral_function, spectral_target
from inverse_square_oscillator.utils.exceptions import NumericalToleranceError, ParameterError, SpectrumError
from inverse_square_oscillator.utils.logger import logger

TRICOMI_SWITCH = 1.0
TRICOMI_SWITCH_SCALE = 4.0
LAPLACE_MIN_ALPHA = 1.0
RANK_TOL = 1e-9
LADDER_TOL = 1e-9
SPECTRAL_CHECK_TOL = 1e-8
NORM_TOL = 1e-11
BOUNDARY_CHECK_TOL = 1e-6
WRONSKIAN_POINTS = (1e-4, 1e-5, 1e-6)


@dataclass(frozen=True)
class LocalSolution:
    """phi^(kind) at eigenvalue lam."""
    kind: int
    lam: float
    exps: Exponents

    @property
    def c(self) -> float:
        return self.exps.c(self.kind)

    @property
    def alpha(self) -> float:
        return 0.5 * (self.c - self.lam)


def _check_positive(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ParameterError("local solutions are evaluated at x > 0 only")
    return x


def _scaled_kummer(alpha: float, gamma: float, z: np.ndarray):
    """
    e^(-z/2) F and e^(-z/2) dF/dz on z.

    Above the overflow threshold the log-scaled branch is used so that the
    growing F never appears unscaled.
    """
    if nearest_pole(alpha)[0]:
        damping = np.exp(-0.5 * z)
        return damping * kummer_m(alpha, gamma, z), damping * kummer_m_prime(alpha, gamma, z)
    F = np.empty_like(z)
    dF = np.empty_like(z)
    small = z <= KUMMER_LOG_THRESHOLD
    damping = np.exp(-0.5 * z[small])
    F[small] = damping * kummer_m(alpha, gamma, z[small])
    dF[small] = damping * kummer_m_prime(alpha, gamma, z[small])
    for i in np.nonzero(~small)[0]:
        log_abs, sign = kummer_m_log(alpha, gamma, z[i])
        F[i] = sign * math.exp(log_abs - 0.5 * z[i])
        log_abs, sign = kummer_m_log(alpha + 1.0, gamma + 1.0, z[i])
        dF[i] = (alpha / gamma) * sign * math.exp(log_abs - 0.5 * z[i])
    return F, dF


def local_solution_value(sol: LocalSolution, x, params: PhysicalParams):
    """
    phi^(kind)(x) = y^(c - 1/2) e^(-y^2/2) F((c - lambda)/2, c; y^2).

    Args:
        sol (LocalSolution): Kind, eigenvalue and exponents
        x: Position(s), strictly positive
        params (PhysicalParams): Physical parameters

    Returns:
        Real value(s) of the local solution
    """
    x = _check_positive(x)
    y = params.kappa * np.atleast_1d(x)
    F, _ = _scaled_kummer(sol.alpha, sol.c, y * y)
    value = y ** (sol.c - 0.5) * F
    return value if x.ndim else float(value[0])


def local_solution_derivative(sol: LocalSolution, x, params: PhysicalParams):
    """d phi^(kind) / dx from the Kummer derivative identity."""
    x = _check_positive(x)
    y = params.kappa * np.atleast_1d(x)
    F, dF = _scaled_kummer(sol.alpha, sol.c, y * y)
    dy = y ** (sol.c - 0.5) * (((sol.c - 0.5) / y - y) * F + 2.0 * y * dF)
    value = params.kappa * dy
    return value if x.ndim else float(value[0])


def local_wronskian(first: LocalSolution, second: LocalSolution, y: np.ndarray) -> np.ndarray:
    """
    W_y[phi_first, phi_second] at small y, factored so no growing terms cancel.

    With phi = P_c(y) A(y^2), W = P_a P_b [2y (A dB - dA B) + (c_b - c_a) A B / y].
    """
    y = np.asarray(y, dtype=float)
    z = y * y
    A, dA = kummer_m(first.alpha, first.c, z), kummer_m_prime(first.alpha, first.c, z)
    B, dB = kummer_m(second.alpha, second.c, z), kummer_m_prime(second.alpha, second.c, z)
    pp = np.exp((first.c + second.c - 1.0) * np.log(y) - z)
    return pp * (2.0 * y * (A * dB - dA * B) + (second.c - first.c) * A * B / y)


def _piecewise(lam: float, right: Sequence[complex], left: Sequence[complex],
               exps: Exponents, params: PhysicalParams, x, derivative: bool = False) -> np.ndarray:
    """Sum of coefficient * phi^(s)(|x|) on each side; x must avoid 0."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x == 0):
        raise ParameterError("wavefunctions live on the punctured line; x = 0 excluded")
    out = np.zeros(x.shape, dtype=complex)
    evaluate = local_solution_derivative if derivative else local_solution_value
    # d/dx f(-x) = -f'(|x|) on the left side.
    left_sign = -1.0 if derivative else 1.0
    for side, coeffs, sign in ((x > 0, right, 1.0), (x < 0, left, left_sign)):
        if not np.any(side):
            continue
        r = np.abs(x[side])
        for kind, coeff in zip((1, 2), coeffs):
            if coeff != 0:
                values = evaluate(LocalSolution(kind, lam, exps), r, params)
                out[side] += coeff * sign * values
    return out


def _piecewise_wronskian(f_lam, f_right, f_left, h_lam, h_right, h_left,
                         exps: Exponents, params: PhysicalParams, x) -> np.ndarray:
    """W_x[f, h] on either side of the origin from local Wronskians."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros(x.shape, dtype=complex)
    for side, f_coeffs, h_coeffs, sign in ((x > 0, f_right, h_right, 1.0),
                                           (x < 0, f_left, h_left, -1.0)):
        if not np.any(side):
            continue
        y = params.kappa * np.abs(x[side])
        for s, a in zip((1, 2), f_coeffs):
            for t, b in zip((1, 2), h_coeffs):
                if a != 0 and b != 0:
                    w = local_wronskian(LocalSolution(s, f_lam, exps), LocalSolution(t, h_lam, exps), y)
                    out[side] += sign * params.kappa * a * b * w
    return out


@dataclass(frozen=True)
class PiecewiseSolution:
    """Solution of H psi = E psi built from local solutions with per-side coefficients."""
    lam: float
    right: Tuple[complex, complex]
    left: Tuple[complex, complex]
    exps: Exponents
    params: PhysicalParams

    def __call__(self, x):
        return _piecewise(self.lam, self.right, self.left, self.exps, self.params, x)

    def derivative(self, x):
        return _piecewise(self.lam, self.right, self.left, self.exps, self.params, x, derivative=True)


def zero_modes(exps: Exponents, params: PhysicalParams) -> Tuple[PiecewiseSolution, PiecewiseSolution]:
    """
    Real zero modes with unit Wronskian.

    phi_1 = sqrt(hbar / m omega) phi^(1)_0(|x|) sign(x) and
    phi_2 = phi^(2)_0(|x|) / (c2 - c1), both at lambda = 0.
    """
    inv_kappa = params.length_scale
    scale = 1.0 / (exps.c2 - exps.c1)
    phi1 = PiecewiseSolution(lam=0.0, right=(inv_kappa, 0.0), left=(-inv_kappa, 0.0),
                             exps=exps, params=params)
    phi2 = PiecewiseSolution(lam=0.0, right=(0.0, scale), left=(0.0, scale), exps=exps, params=params)
    return phi1, phi2


def wronskian(f, h, x) -> np.ndarray:
    """W[f, h](x) = f h' - f' h for two piecewise solutions (or eigenstates)."""
    return _piecewise_wronskian(f.lam, f.right, f.left, h.lam, h.right, h.left, f.exps, f.params, x)


@lru_cache(maxsize=200_000)
def _scaled_tricomi(alpha: float, gamma: float, z: float) -> float:
    return float(mpmath.gamma(alpha) * mpmath.hyperu(alpha, gamma, z))


def _switch_point(lam: float, exps: Exponents) -> float:
    """y^2 beyond which the decaying form replaces the two local solutions."""
    alpha = 0.5 * (exps.c1 - lam)
    if alpha > TRICOMI_SWITCH_SCALE:
        # the local solutions grow like exp(2 sqrt(alpha y^2)) and cancel beyond this
        return TRICOMI_SWITCH_SCALE / alpha
    return TRICOMI_SWITCH


def _decaying_profile(lam: float, exps: Exponents, y: np.ndarray, derivative: bool = False) -> np.ndarray:
    """
    h(y) = Gamma(alpha) y^(c1 - 1/2) e^(-y^2/2) U(alpha, c1; y^2) with
    alpha = (c1 - lambda)/2, or dh/dy.

    Deep levels (alpha >= 1) go through the log-scaled Laplace form; the rest
    through mpmath's hyperu.
    """
    alpha = 0.5 * (exps.c1 - lam)
    z = y * y
    log_prefactor = (exps.c1 - 0.5) * np.log(y) - 0.5 * z
    if alpha >= LAPLACE_MIN_ALPHA:
        value = np.exp(log_prefactor + scaled_tricomi_log(alpha, exps.c1, z))
        if not derivative:
            return value
        # d/dz Gamma(alpha) U(alpha, c1; z) = -Gamma(alpha + 1) U(alpha + 1, c1 + 1; z)
        slope = np.exp(log_prefactor + scaled_tricomi_log(alpha + 1.0, exps.c1 + 1.0, z))
    else:
        prefactor = np.exp(log_prefactor)
        value = prefactor * np.array([_scaled_tricomi(alpha, exps.c1, float(v)) for v in z])
        if not derivative:
            return value
        slope = prefactor * np.array([_scaled_tricomi(alpha + 1.0, exps.c1 + 1.0, float(v)) for v in z])
    return ((exps.c1 - 0.5) / y - y) * value - 2.0 * y * slope


@dataclass(frozen=True)
class Eigenstate:
    """Normalized eigenfunction with piecewise coefficients N_R^(1,2), N_L^(1,2)."""
    lam: float
    N_R1: complex
    N_R2: complex
    N_L1: complex
    N_L2: complex
    exps: Exponents
    params: PhysicalParams
    branch: str = ""

    @property
    def right(self) -> Tuple[complex, complex]:
        return self.N_R1, self.N_R2

    @property
    def left(self) -> Tuple[complex, complex]:
        return self.N_L1, self.N_L2

    @property
    def energy(self) -> float:
        return self.params.energy(self.lam)

    @property
    def uses_tricomi(self) -> bool:
        """True unless every nonzero component has a terminating Kummer series."""
        for kind, coeffs in ((1, (self.N_R1, self.N_L1)), (2, (self.N_R2, self.N_L2))):
            alpha = 0.5 * (self.exps.c(kind) - self.lam)
            if any(c != 0 for c in coeffs) and not nearest_pole(alpha)[0]:
                return True
        return False

    def _tricomi_scale(self, x: np.ndarray) -> np.ndarray:
        # N1 = -F N2 makes N2 / Gamma(a) times the decaying profile on each side
        return np.where(x > 0, self.N_R2, self.N_L2) / math.gamma(self.exps.a)

    def _evaluate(self, x, derivative: bool) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if not self.uses_tricomi:
            return _piecewise(self.lam, self.right, self.left, self.exps, self.params, x, derivative)
        out = np.zeros(x.shape, dtype=complex)
        y = self.params.kappa * np.abs(x)
        near = y * y <= _switch_point(self.lam, self.exps)
        if np.any(near):
            out[near] = _piecewise(self.lam, self.right, self.left, self.exps, self.params,
                                   x[near], derivative)
        far = ~near
        if np.any(far):
            profile = _decaying_profile(self.lam, self.exps, y[far], derivative)
            if derivative:
                profile = profile * self.params.kappa * np.sign(x[far])
            out[far] = self._tricomi_scale(x[far]) * profile
        return out

    def __call__(self, x):
        return self._evaluate(x, derivative=False)

    def derivative(self, x):
        return self._evaluate(x, derivative=True)

    def scaled(self, factor: complex) -> "Eigenstate":
        return Eigenstate(self.lam, factor * self.N_R1, factor * self.N_R2, factor * self.N_L1,
                          factor * self.N_L2, self.exps, self.params, self.branch)


def _extrapolate_to_origin(xs: Sequence[float], values: np.ndarray, exps: Exponents) -> complex:
    """Fit W(x) = W0 + b x^(2 c2) + d x^2 through three points and return W0."""
    powers = [0.0, 2.0] if exps.c2 < 1e-6 else [0.0, 2.0 * exps.c2, 2.0]
    xs = np.asarray(xs[:len(powers)], dtype=float)
    A = np.array([[x ** p for p in powers] for x in xs])
    coef = np.linalg.solve(A, np.asarray(values[:len(powers)], dtype=complex))
    return complex(coef[0])


def numeric_boundary_vectors(psi: Eigenstate) -> Tuple[np.ndarray, np.ndarray]:
    """Boundary vectors from zero-mode Wronskians extrapolated to x -> +-0."""
    phi1, phi2 = zero_modes(psi.exps, psi.params)
    xs = [p * psi.params.length_scale for p in WRONSKIAN_POINTS]
    limits = {}
    for name, mode in (("1", phi1), ("2", phi2)):
        for side in (1.0, -1.0):
            values = wronskian(psi, mode, side * np.array(xs))
            limits[name, side] = _extrapolate_to_origin(xs, values, psi.exps)
    Psi = np.array([limits["1", 1.0], limits["1", -1.0]])
    PsiPrime = np.array([limits["2", 1.0], -limits["2", -1.0]])
    return Psi, PsiPrime


def boundary_vectors(psi: Eigenstate, verify: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """
    Psi = (c1 - c2)(N_R2, N_L2) and Psi' = kappa (N_R1, N_L1).

    Args:
        psi (Eigenstate): State assembled from local solutions
        verify (bool): Cross-check against extrapolated zero-mode Wronskians

    Returns:
        Tuple of the two complex 2-vectors

    Raises:
        NumericalToleranceError: If the Wronskian limits disagree beyond 1e-6 relative
    """
    exps = psi.exps
    Psi = (exps.c1 - exps.c2) * np.array([psi.N_R2, psi.N_L2], dtype=complex)
    PsiPrime = psi.params.kappa * np.array([psi.N_R1, psi.N_L1], dtype=complex)
    if verify:
        num_Psi, num_PsiPrime = numeric_boundary_vectors(psi)
        scale = max(float(np.max(np.abs(Psi))), float(np.max(np.abs(PsiPrime))), 1e-300)
        error = max(float(np.max(np.abs(num_Psi - Psi))), float(np.max(np.abs(num_PsiPrime - PsiPrime))))
        if error > BOUNDARY_CHECK_TOL * scale:
            raise NumericalToleranceError(
                "boundary_vectors", f"Wronskian limits differ from closed form by {error / scale:.3e}")
    return Psi, PsiPrime


def _ladder_index(lam: float, c: float) -> int:
    n = round(0.5 * (lam - c))
    if n < 0 or abs(lam - (2 * n + c)) > LADDER_TOL:
        raise SpectrumError(f"lambda = {lam} is not on the ladder 2n + {c}")
    return int(n)


def _ladder_norm_squared(n: int, c: float, kappa: float) -> float:
    """Integral over (0, inf) of phi^(s)_n squared, n! Gamma(c)^2 / (2 kappa Gamma(n + c))."""
    return math.exp(special.gammaln(n + 1) + 2.0 * special.gammaln(c) - special.gammaln(n + c)) / (2.0 * kappa)


def _fix_phase(coeffs: List[complex]) -> List[complex]:
    """Make the first of N_R2, N_R1, N_L2, N_L1 that is nonzero real positive."""
    N_R1, N_R2, N_L1, N_L2 = coeffs
    biggest = max(abs(c) for c in coeffs)
    for pivot in (N_R2, N_R1, N_L2, N_L1):
        if abs(pivot) > 1e-12 * biggest:
            phase = np.conj(pivot) / abs(pivot)
            return [complex(phase * c) for c in coeffs]
    return coeffs


def assemble_eigenstate(lam: float, branch: str, bd: BoundaryData, exps: Exponents,
                        params: PhysicalParams) -> Eigenstate:
    """
    Build the normalized eigenstate of one branch at a solved eigenvalue.

    Args:
        lam (float): Eigenvalue solving the branch's spectral condition
        branch (str): 'plus' or 'minus'
        bd (BoundaryData): Boundary data of the extension
        exps (Exponents): Exponents
        params (PhysicalParams): Physical parameters

    Returns:
        Eigenstate: Normalized state with the phase convention applied

    Raises:
        SpectrumError: If lam does not solve the branch's spectral condition
        NumericalToleranceError: If the boundary kernel has the wrong dimension
    """
    L = bd.length(branch)
    identity = np.eye(2)
    if math.isinf(L):
        n = _ladder_index(lam, exps.c2)
        M = bd.U - identity
    elif L == 0.0:
        n = _ladder_index(lam, exps.c1)
        M = bd.U + identity
    else:
        target = spectral_target(exps, L, params)
        F = spectral_function(lam, exps).value
        if abs(F - target) > SPECTRAL_CHECK_TOL * max(1.0, abs(target)):
            raise SpectrumError(f"lambda = {lam} misses the {branch} spectral condition by {abs(F - target):.3e}")
        M = (bd.U - identity) - 1j * (bd.L0 / L) * (bd.U + identity)

    _, s, vh = np.linalg.svd(M)
    null_dim = int(np.sum(s <= RANK_TOL * max(1.0, s[0])))
    if null_dim == 2:
        # Degenerate level: half-line supported states, right for 'plus'.
        w = identity[:, 0 if branch == "plus" else 1].astype(complex)
    elif null_dim == 1:
        w = np.conj(vh[-1])
    else:
        raise NumericalToleranceError("kernel_rank", f"boundary kernel at lambda = {lam} has singular values {s}")

    if L == 0.0:
        N1, N2 = w, np.zeros(2, dtype=complex)
    else:
        N2 = w / (exps.c1 - exps.c2)
        N1 = np.zeros(2, dtype=complex) if math.isinf(L) else -spectral_function(lam, exps).value * N2

    coeffs = [N1[0], N2[0], N1[1], N2[1]]
    if math.isinf(L) or L == 0.0:
        c = exps.c2 if math.isinf(L) else exps.c1
        weight = float(np.sum(np.abs(N1) ** 2 + np.abs(N2) ** 2))
        norm_sq = weight * _ladder_norm_squared(n, c, params.kappa)
    else:
        raw = Eigenstate(lam, *coeffs, exps=exps, params=params, branch=branch)
        x_max = outer_cutoff(max(lam, 0.0) + 4.0, params.length_scale)
        value, _, _ = refine(lambda rule: rule.integrate(np.abs(raw(rule.nodes)) ** 2), x_max, NORM_TOL)
        norm_sq = float(np.real(value))
    coeffs = _fix_phase([c / math.sqrt(norm_sq) for c in coeffs])
    state = Eigenstate(lam, *coeffs, exps=exps, params=params, branch=branch)
    logger.debug(f"Assembled {branch} eigenstate at lambda = {lam:.12g}")
    return state


def eigenstate_family(bd: BoundaryData, exps: Exponents, n_max: int,
                      params: PhysicalParams) -> List[Eigenstate]:
    """Eigenstates of both branches, ordered by eigenvalue."""
    plus, minus = spectral_family(bd, exps, n_max, params)
    states = [assemble_eigenstate(lam, "plus", bd, exps, params) for lam in plus.levels]
    states += [assemble_eigenstate(lam, "minus", bd, exps, params) for lam in minus.levels]
    logger.info(f"Assembled {len(states)} eigenstates")
    return sorted(states, key=lambda s: (s.lam, s.branch != "plus"))


def sigma1_normalization(n: int, c: float, kappa: float) -> float:
    """N^(s) = [kappa Gamma(n + c) / (Gamma(c)^2 n!)]^(1/2)."""
    return math.exp(0.5 * (math.log(kappa) + special.gammaln(n + c)
                           - 2.0 * special.gammaln(c) - special.gammaln(n + 1)))


def sigma1_eigenstate(n: int, s: int, exps: Exponents, params: PhysicalParams) -> Eigenstate:
    """
    Closed-form eigenstate psi_n^(s) of the U = sigma1 extension.

    Series 1 (lambda = 2n + c1) is odd, series 2 (lambda = 2n + c2) is even.

    Raises:
        ParameterError: For s outside {1, 2}, n < 0, or s = 2 at a = 1
    """
    if s not in (1, 2):
        raise ParameterError(f"series index must be 1 or 2, got {s}")
    if n < 0:
        raise ParameterError(f"level index must be non-negative, got {n}")
    if s == 2 and exps.c2 <= 0:
        raise ParameterError("series 2 ceases to exist at a = 1")
    c = exps.c(s)
    N = sigma1_normalization(n, c, params.kappa)
    if s == 1:
        return Eigenstate(2 * n + c, N, 0.0, -N, 0.0, exps, params, branch="minus")
    return Eigenstate(2 * n + c, 0.0, N, 0.0, N, exps, params, branch="plus")


@dataclass(frozen=True)
class Sigma1Basis:
    """The two series of sigma1 eigenstates up to level n_max, evaluated in bulk."""
    exps: Exponents
    params: PhysicalParams
    n_max: int

    def levels(self, s: int) -> np.ndarray:
        return 2.0 * np.arange(self.n_max + 1) + self.exps.c(s)

    @property
    def lambda_max(self) -> float:
        return float(max(self.levels(1)[-1], self.levels(2)[-1]))

    @property
    def x_max(self) -> float:
        return outer_cutoff(self.lambda_max, self.params.length_scale)

    def small_x_coefficients(self, s: int) -> np.ndarray:
        """Coefficient N_n^(s) of |x|-power y^(c_s - 1/2) in psi_n^(s) near 0."""
        c = self.exps.c(s)
        n = np.arange(self.n_max + 1)
        log_n = 0.5 * (math.log(self.params.kappa) + special.gammaln(n + c)
                       - 2.0 * special.gammaln(c) - special.gammaln(n + 1))
        return np.where(np.isfinite(log_n), np.exp(log_n), 0.0)

    def matrix(self, s: int, x) -> np.ndarray:
        """
        Rows psi_n^(s)(x) for n = 0..n_max.

        Uses psi_n^(s) = sqrt(kappa n! / Gamma(n + c)) y^(c - 1/2) e^(-y^2/2)
        L_n^(c-1)(y^2), times sign(x) for series 1. At a = 1 the n = 0 row of
        series 2 is identically zero.
        """
        x = np.asarray(x, dtype=float)
        if np.any(x == 0):
            raise ParameterError("wavefunctions live on the punctured line; x = 0 excluded")
        c = self.exps.c(s)
        y = self.params.kappa * np.abs(x)
        z = y * y
        radial = (c - 0.5) * np.log(y) - 0.5 * z
        parity = np.sign(x) if s == 1 else np.ones_like(x)
        rows = np.zeros((self.n_max + 1, x.size))
        for n in range(self.n_max + 1):
            log_scale = 0.5 * (math.log(self.params.kappa) + special.gammaln(n + 1) - special.gammaln(n + c))
            if not math.isfinite(log_scale):
                continue
            rows[n] = np.exp(log_scale + radial) * laguerre(n, c - 1.0, z) * parity
        return rows

    def stacked(self, x) -> np.ndarray:
        """Series 1 rows followed by series 2 rows."""
        return np.vstack([self.matrix(1, x), self.matrix(2, x)])

    def gram(self, tol: float = 1e-10) -> np.ndarray:
        """Gram matrix of the stacked basis on the punctured line."""
        def measure(rule):
            rows = self.stacked(rule.nodes)
            return (rows * rule.weights) @ rows.T

        value, _, error = refine(measure, self.x_max, tol)
        logger.debug(f"Gram matrix of {2 * (self.n_max + 1)} states, refinement change {error:.2e}")
        return value


def inner_product(f, g, params: PhysicalParams, lambda_max: float = 0.0, tol: float = 1e-10) -> complex:
    """
    Integral of conj(f) g over the punctured line.

    Args:
        f, g: Callables on arrays of positions (eigenstates, packets, ...)
        params (PhysicalParams): Physical parameters, for the outer cutoff
        lambda_max (float): Largest eigenvalue involved, widens the cutoff
        tol (float): Absolute accuracy target

    Returns:
        complex: The inner product
    """
    return quadrature.inner_product(f, g, outer_cutoff(lambda_max, params.length_scale), tol)


def hermite_function(k: int, x, params: PhysicalParams) -> np.ndarray:
    """Normalized oscillator eigenfunction (kappa^2/pi)^(1/4) H_k(y) e^(-y^2/2) / sqrt(2^k k!)."""
    y = params.kappa * np.asarray(x, dtype=float)
    log_norm = 0.25 * math.log(params.kappa ** 2 / math.pi) - 0.5 * (k * math.log(2.0) + special.gammaln(k + 1))
    return math.exp(log_norm) * hermite(k, y) * np.exp(-0.5 * y * y)
