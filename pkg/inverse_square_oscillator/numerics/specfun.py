"""
Special functions used throughout: log-Gamma with pole detection, Kummer's
and Tricomi's confluent hypergeometric functions, associated Laguerre and
Hermite polynomials and the modified Bessel function I_nu.

Values come from scipy.special; this module adds the pole/sign bookkeeping,
the Laguerre route for terminating Kummer series, log-scaled Kummer and
Tricomi branches where the plain values overflow, and the imaginary-axis
route for I_nu.
"""
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy import special

from inverse_square_oscillator.utils.exceptions import NumericalToleranceError, ParameterError

POLE_TOL = 1e-12
KUMMER_LOG_THRESHOLD = 400.0
KUMMER_ASYMPTOTIC_TERMS = 40
BESSEL_ORDER_RANGE = (-1.0, 2.0)
TRICOMI_STEP = 0.2
TRICOMI_HALF_WIDTH = 64.0
TRICOMI_WIDENINGS = 4
TRICOMI_TAIL_DROP = 60.0
TRICOMI_BISECTIONS = 100
TRICOMI_BLOCK = 2048

Number = Union[float, complex]


@dataclass(frozen=True)
class GammaValue:
    """Gamma function value as sign * exp(log_abs), or a pole."""
    log_abs: float
    sign: int
    is_pole: bool

    @property
    def value(self) -> float:
        if self.is_pole:
            return math.inf
        return self.sign * math.exp(self.log_abs)


def nearest_pole(x: float) -> Tuple[bool, int]:
    """Whether x sits within POLE_TOL of a non-positive integer, and that integer."""
    n = round(x)
    return (n <= 0 and abs(x - n) <= POLE_TOL), int(n)


def log_gamma(x: float) -> GammaValue:
    """
    Log-magnitude and sign of Gamma(x) on the real line.

    Args:
        x (float): Finite real argument

    Returns:
        GammaValue: log|Gamma(x)|, its sign and the pole flag

    Raises:
        ParameterError: If x is not finite
    """
    if not math.isfinite(x):
        raise ParameterError(f"log_gamma needs a finite argument, got {x}")
    is_pole, _ = nearest_pole(x)
    if is_pole:
        return GammaValue(log_abs=math.inf, sign=1, is_pole=True)
    return GammaValue(
        log_abs=float(special.gammaln(x)),
        sign=int(special.gammasgn(x)),
        is_pole=False,
    )


def gamma_ratio(numerator: float, denominator: float) -> float:
    """
    Gamma(numerator) / Gamma(denominator) with poles resolved.

    A denominator pole gives 0, a numerator pole gives +-inf (signed by the
    approach from above); both poles together give the finite residue ratio.
    """
    top, bottom = log_gamma(numerator), log_gamma(denominator)
    if top.is_pole and bottom.is_pole:
        # Gamma(-n + d) / Gamma(-k + d) -> (-1)^(n-k) k! / n! as d -> 0.
        n, k = -round(numerator), -round(denominator)
        return (-1) ** (n - k) * math.exp(special.gammaln(k + 1) - special.gammaln(n + 1))
    if bottom.is_pole:
        return 0.0
    if top.is_pole:
        return math.inf
    return top.sign * bottom.sign * math.exp(top.log_abs - bottom.log_abs)


def laguerre(n: int, nu: float, z):
    """
    Associated Laguerre polynomial L_n^(nu)(z) by the three-term recurrence.

    Args:
        n (int): Degree, n >= 0
        nu (float): Order, nu > -1; nu = -1 is accepted as the a -> 1 limit
        z: Real argument (scalar or array)

    Returns:
        Polynomial value(s)
    """
    if n < 0:
        raise ParameterError(f"Laguerre degree must be non-negative, got {n}")
    if nu == -1.0:
        # L_n^(-1)(z) = -(z / n) L_{n-1}^(1)(z)
        if n == 0:
            return np.ones_like(np.asarray(z, dtype=float))
        return -(np.asarray(z, dtype=float) / n) * special.eval_genlaguerre(n - 1, 1.0, z)
    if nu < -1.0:
        raise ParameterError(f"Laguerre order must exceed -1, got {nu}")
    return special.eval_genlaguerre(n, nu, z)


def hermite(n: int, y):
    """Physicists' Hermite polynomial H_n(y)."""
    if n < 0:
        raise ParameterError(f"Hermite degree must be non-negative, got {n}")
    return special.eval_hermite(n, y)


def _kummer_terminating(n: int, gamma: float, z):
    """F(-n, gamma; z) = Gamma(gamma) n! / Gamma(gamma + n) * L_n^(gamma-1)(z)."""
    scale = math.exp(special.gammaln(gamma) + special.gammaln(n + 1) - special.gammaln(gamma + n))
    return scale * laguerre(n, gamma - 1.0, z)


def kummer_log_asymptotic(alpha: float, gamma: float, z: float) -> Tuple[float, int]:
    """
    Leading-order log-scaled Kummer function for large positive z.

    Uses F(alpha, gamma; z) ~ Gamma(gamma)/Gamma(alpha) e^z z^(alpha-gamma)
    * sum_k (gamma-alpha)_k (1-alpha)_k / (k! z^k), truncated at the smallest
    term.

    Returns:
        Tuple[float, int]: log|F| and the sign of F
    """
    if nearest_pole(alpha)[0]:
        raise ParameterError("terminating Kummer series has no exponential branch")
    total, term = 1.0, 1.0
    for k in range(KUMMER_ASYMPTOTIC_TERMS):
        nxt = term * (gamma - alpha + k) * (1.0 - alpha + k) / ((k + 1) * z)
        if abs(nxt) >= abs(term):
            break
        total += nxt
        term = nxt
        if abs(term) < 1e-17 * abs(total):
            break
    log_abs = (special.gammaln(gamma) - special.gammaln(alpha) + z
               + (alpha - gamma) * math.log(z) + math.log(abs(total)))
    sign = int(special.gammasgn(gamma) * special.gammasgn(alpha) * np.sign(total))
    return float(log_abs), sign


def kummer_m(alpha: float, gamma: float, z):
    """
    Kummer's confluent hypergeometric function F(alpha, gamma; z).

    Non-positive integer alpha routes through the Laguerre recurrence, which
    stays stable where the terminating series cancels. Above z = 400 a
    non-terminating series is rebuilt from kummer_m_log as sign * exp(log|F|),
    which overflows to +-inf once log|F| passes the double range.

    Args:
        alpha (float): Numerator parameter
        gamma (float): Denominator parameter, not a non-positive integer
        z: Real non-negative argument (scalar or array)

    Returns:
        F values with the shape of z

    Raises:
        ParameterError: For a non-positive integer gamma or negative z
    """
    if nearest_pole(gamma)[0]:
        raise ParameterError(f"Kummer function undefined for gamma = {gamma}")
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0):
        raise ParameterError("kummer_m is restricted to non-negative arguments")

    is_terminating, n = nearest_pole(alpha)
    if is_terminating:
        value = _kummer_terminating(-n, gamma, z_arr)
    else:
        flat = np.atleast_1d(z_arr).ravel()
        large = flat > KUMMER_LOG_THRESHOLD
        value = np.empty_like(flat)
        value[~large] = special.hyp1f1(alpha, gamma, flat[~large])
        for i in np.nonzero(large)[0]:
            log_abs, sign = kummer_log_asymptotic(alpha, gamma, float(flat[i]))
            with np.errstate(over="ignore"):
                value[i] = sign * np.exp(log_abs)
        value = value.reshape(z_arr.shape)
    # F(alpha, gamma; 0) = 1 exactly
    value = np.where(z_arr == 0.0, 1.0, value)
    return value if value.ndim else float(value)


def kummer_m_log(alpha: float, gamma: float, z: float) -> Tuple[float, int]:
    """
    Log-scaled F(alpha, gamma; z) valid on the whole half line z >= 0.

    Returns:
        Tuple[float, int]: log|F| and the sign of F (log|F| = -inf at a zero)
    """
    if z > KUMMER_LOG_THRESHOLD and not nearest_pole(alpha)[0]:
        return kummer_log_asymptotic(alpha, gamma, z)
    value = float(kummer_m(alpha, gamma, z))
    if value == 0.0:
        return -math.inf, 1
    return math.log(abs(value)), int(np.sign(value))


def kummer_m_prime(alpha: float, gamma: float, z):
    """dF/dz = (alpha / gamma) F(alpha + 1, gamma + 1; z)."""
    if alpha == 0.0:
        return np.zeros_like(np.asarray(z, dtype=float))
    return (alpha / gamma) * kummer_m(alpha + 1.0, gamma + 1.0, z)


def scaled_tricomi_log(alpha: float, gamma: float, z):
    """
    log[Gamma(alpha) U(alpha, gamma; z)] for alpha > 0 and z > 0.

    Evaluates the Laplace integral
    Gamma(alpha) U = int_0^inf e^(-z t) t^(alpha - 1) (1 + t)^(gamma - alpha - 1) dt
    in u = log t, where the integrand is log-concave once alpha + 1 > gamma.
    The trapezoid rule on a grid centred at its peak and scaled by the peak
    curvature then converges geometrically, and the result stays finite long
    after Gamma(alpha) and U separately leave the double range.

    Args:
        alpha (float): Numerator parameter, positive
        gamma (float): Denominator parameter, below alpha + 1
        z: Positive argument (scalar or array)

    Returns:
        Log values with the shape of z

    Raises:
        ParameterError: Outside alpha > 0, alpha + 1 > gamma, z > 0
        NumericalToleranceError: If the integrand tails do not fit the widest grid
    """
    q = alpha + 1.0 - gamma
    if alpha <= 0 or q <= 0:
        raise ParameterError(f"Laplace form needs alpha > 0 and alpha + 1 > gamma, got {alpha}, {gamma}")
    z_arr = np.atleast_1d(np.asarray(z, dtype=float)).ravel()
    if np.any(z_arr <= 0):
        raise ParameterError("scaled_tricomi_log is restricted to positive arguments")
    blocks = np.array_split(z_arr, max(1, math.ceil(z_arr.size / TRICOMI_BLOCK)))
    out = np.concatenate([_laplace_log(alpha, q, block) for block in blocks])
    return out.reshape(np.shape(z)) if np.ndim(z) else float(out[0])


def _laplace_log(p: float, q: float, z: np.ndarray) -> np.ndarray:
    """log int exp(-z e^u + p u - q log(1 + e^u)) du, one value per z."""
    # the exponent's slope is decreasing and changes sign in [log p/(z+q), log p/z]
    lo = np.log(p / (z + q))
    hi = np.log(p / z)
    for _ in range(TRICOMI_BISECTIONS):
        mid = 0.5 * (lo + hi)
        rising = p - z * np.exp(mid) - q * special.expit(mid) > 0
        lo = np.where(rising, mid, lo)
        hi = np.where(rising, hi, mid)
    peak = 0.5 * (lo + hi)
    width = 1.0 / np.sqrt(z * np.exp(peak) + q * special.expit(peak) * special.expit(-peak))

    half_width = TRICOMI_HALF_WIDTH
    for _ in range(TRICOMI_WIDENINGS):
        s = np.arange(-half_width, half_width + 0.5 * TRICOMI_STEP, TRICOMI_STEP)
        u = peak[:, None] + width[:, None] * s[None, :]
        with np.errstate(over="ignore"):
            exponent = -z[:, None] * np.exp(u) + p * u - q * np.logaddexp(0.0, u)
        top = np.max(exponent, axis=1)
        tails = np.maximum(exponent[:, 0], exponent[:, -1]) - top
        if np.all(tails < -TRICOMI_TAIL_DROP):
            total = np.sum(np.exp(exponent - top[:, None]), axis=1)
            return top + np.log(TRICOMI_STEP * width * total)
        half_width *= 2.0
    raise NumericalToleranceError(
        "tricomi", f"integrand tails above e^-{TRICOMI_TAIL_DROP:g} at half width {half_width:g}")


def bessel_i(nu: float, z: Number) -> complex:
    """
    Modified Bessel function I_nu(z), principal branch.

    Purely imaginary arguments z = -i w route through J_nu of a real
    argument: I_nu(-i w) = e^{-i nu pi / 2} J_nu(w) for w > 0, and
    I_nu(i w) = e^{i nu pi / 2} J_nu(w).

    Args:
        nu (float): Order in [-1, 2]; the end points serve the a -> 1 limit
        z: Complex argument

    Returns:
        complex: I_nu(z)

    Raises:
        ParameterError: For orders outside [-1, 2]
        NumericalToleranceError: If the evaluation does not return a finite value
    """
    low, high = BESSEL_ORDER_RANGE
    if not low <= nu <= high:
        raise ParameterError(f"Bessel order {nu} outside {BESSEL_ORDER_RANGE}")
    if nu < 0 and nu == round(nu):
        nu = -nu  # I_{-n} = I_n
    z = complex(z)
    if z == 0:
        if nu == 0:
            return 1.0 + 0.0j
        if nu > 0:
            return 0.0j
        raise ParameterError(f"I_nu(0) diverges for nu = {nu}")
    if z.real == 0.0:
        w = abs(z.imag)
        phase = -1.0 if z.imag < 0 else 1.0
        value = np.exp(phase * 1j * nu * math.pi / 2) * special.jv(nu, w)
    else:
        value = special.iv(nu, z)
    if not np.isfinite(value):
        raise NumericalToleranceError("bessel", f"I_{nu} did not converge at |z| = {abs(z)}")
    return complex(value)
