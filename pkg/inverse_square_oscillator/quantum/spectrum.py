"""
Spectral condition F(lambda) = sqrt(hbar / m omega) (c1 - c2) / L.

F(lambda) = Gamma((c1 - lambda)/2) Gamma(c2) / [Gamma((c2 - lambda)/2) Gamma(c1)]
has zeros at lambda = 2n + c2 and poles at lambda = 2n + c1. L = inf and
L = 0 give those two ladders exactly; finite L is solved by scanning each
interval between consecutive zeros and poles and refining with brentq.
"""
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy import special
from scipy.optimize import brentq

from inverse_square_oscillator.numerics.specfun import gamma_ratio
from inverse_square_oscillator.physics.model import BoundaryData, Exponents, PhysicalParams
from inverse_square_oscillator.utils.exceptions import SpectrumError
from inverse_square_oscillator.utils.logger import logger

SCAN_POINTS = 10_000
LAMBDA_FLOOR = -40.0
FLOOR_LIMIT = -1.0e12
ROOT_XTOL = 1e-14
RESIDUAL_TOL = 1e-10
LEVEL_DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class SpectralFunctionValue:
    """F(lambda) with pole and zero flags; value is inf at a pole."""
    lam: float
    value: float
    is_pole: bool
    is_zero: bool


@dataclass(frozen=True)
class SpectrumResult:
    """Ascending eigenvalues of one branch with their spectral residuals."""
    branch: str
    L: float
    target: float
    levels: np.ndarray
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def closed_form(self) -> bool:
        return self.L == 0.0 or math.isinf(self.L)

    def energies(self, params: PhysicalParams) -> np.ndarray:
        return self.levels * params.hbar * params.omega


def spectral_function(lam: float, exps: Exponents) -> SpectralFunctionValue:
    """
    Evaluate F(lambda) in log space with sign tracking.

    Args:
        lam (float): Dimensionless eigenvalue variable
        exps (Exponents): Exponents c1, c2

    Returns:
        SpectralFunctionValue: Value, pole and zero flags
    """
    ratio = gamma_ratio(0.5 * (exps.c1 - lam), 0.5 * (exps.c2 - lam))
    scale = math.exp(special.gammaln(exps.c2) - special.gammaln(exps.c1))
    value = ratio * scale if math.isfinite(ratio) else math.inf
    return SpectralFunctionValue(
        lam=lam,
        value=value,
        is_pole=math.isinf(value),
        is_zero=value == 0.0,
    )


def spectral_target(exps: Exponents, L: float, params: PhysicalParams) -> float:
    """Right-hand side sqrt(hbar / m omega) (c1 - c2) / L; 0 for L = inf."""
    if math.isinf(L):
        return 0.0
    if L == 0.0:
        return math.inf
    return params.length_scale * (exps.c1 - exps.c2) / L


def _root_function(lam, exps: Exponents, target: float):
    """
    Pole-free function with the same real roots as F(lambda) - target.

    Below c2 the log-space F is used directly; above it the entire
    combination Gamma(c2)/Gamma((c2-lam)/2) - target Gamma(c1)/Gamma((c1-lam)/2)
    is normalized to [-1, 1].
    """
    lam = np.asarray(lam, dtype=float)
    low = lam < exps.c2
    out = np.empty_like(lam)
    if np.any(low):
        log_f = (special.gammaln(0.5 * (exps.c1 - lam[low])) - special.gammaln(0.5 * (exps.c2 - lam[low]))
                 + special.gammaln(exps.c2) - special.gammaln(exps.c1))
        F = np.exp(log_f)
        out[low] = (F - target) / (F + abs(target))
    if np.any(~low):
        high = lam[~low]
        log_first, sign_first = _log_reciprocal_term(special.gammaln(exps.c2), 0.5 * (exps.c2 - high))
        log_second, sign_second = _log_reciprocal_term(
            math.log(abs(target)) + special.gammaln(exps.c1), 0.5 * (exps.c1 - high))
        sign_second = sign_second * np.sign(target)
        # at most one of the two terms sits on a pole, so the larger log is finite
        top = np.maximum(log_first, log_second)
        first = sign_first * np.exp(log_first - top)
        second = sign_second * np.exp(log_second - top)
        out[~low] = (first - second) / (np.abs(first) + np.abs(second))
    return out if out.ndim else float(out)


def _log_reciprocal_term(log_coefficient: float, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """log|C / Gamma(x)| and its sign; poles of Gamma(x) give (-inf, 0)."""
    log_gamma = special.gammaln(x)
    at_pole = np.isinf(log_gamma)
    log_term = np.where(at_pole, -np.inf, log_coefficient - log_gamma)
    sign = np.where(at_pole, 0.0, special.gammasgn(np.where(at_pole, 1.0, x)))
    return log_term, sign


def _critical_points(exps: Exponents, lower: float, upper: float) -> List[float]:
    points = {lower, upper}
    n = 0
    while exps.c2 + 2 * n < upper:
        for c in (exps.c1, exps.c2):
            lam = c + 2 * n
            if lower < lam < upper:
                points.add(lam)
        n += 1
    return sorted(points)


def _is_critical(lam: float, exps: Exponents) -> bool:
    """Whether lam is a zero (2n + c2) or pole (2n + c1) of F."""
    return any(abs(0.5 * (lam - c) - round(0.5 * (lam - c))) < 1e-12 and lam >= c
               for c in (exps.c1, exps.c2))


def _extend_floor(exps: Exponents, target: float) -> float:
    """Lower the scan floor until the level below c2 is bracketed."""
    floor = LAMBDA_FLOOR
    while target > 0 and _root_function(floor, exps, target) < 0:
        floor *= 2.0
        if floor < FLOOR_LIMIT:
            raise SpectrumError(f"no level below c2 found above lambda = {FLOOR_LIMIT} for target {target}")
        logger.debug(f"Extending spectral scan floor to {floor}")
    return floor


def _expected_roots(lo: float, hi: float, exps: Exponents, target: float) -> int:
    """One root on each interval where F runs between 0 and the target's side of infinity."""
    mid = 0.5 * (lo + hi)
    if mid < exps.c2:
        return 1 if target > 0 else 0
    F_mid = spectral_function(mid, exps).value
    return 1 if F_mid * target > 0 else 0


def solve_spectrum(exps: Exponents, L: float, n_max: int, params: PhysicalParams,
                   branch: str = "plus") -> SpectrumResult:
    """
    Lowest n_max + 1 eigenvalues of one branch.

    Args:
        exps (Exponents): Exponents c1, c2
        L (float): Extension length (0 and inf give closed forms)
        n_max (int): Highest level index
        params (PhysicalParams): Physical parameters
        branch (str): Label stored on the result

    Returns:
        SpectrumResult: Ascending levels and residuals

    Raises:
        SpectrumError: On a root-count mismatch in a bracketing interval
    """
    if n_max < 0:
        raise SpectrumError(f"n_max must be non-negative, got {n_max}")
    n = np.arange(n_max + 1)
    target = spectral_target(exps, L, params)
    if math.isinf(L):
        return SpectrumResult(branch=branch, L=L, target=0.0,
                              levels=2.0 * n + exps.c2, residuals=np.zeros(n_max + 1))
    if L == 0.0:
        return SpectrumResult(branch=branch, L=L, target=math.inf,
                              levels=2.0 * n + exps.c1, residuals=np.zeros(n_max + 1))

    lower = _extend_floor(exps, target)
    upper = 2.0 * n_max + 4.0
    points = _critical_points(exps, lower, upper)
    roots = []
    for lo, hi in zip(points[:-1], points[1:]):
        grid = np.linspace(lo, hi, SCAN_POINTS)
        values = _root_function(grid, exps, target)
        signs = np.sign(values)
        found = [float(x) for x in grid[signs == 0]]
        for i in np.nonzero(signs[:-1] * signs[1:] < 0)[0]:
            found.append(brentq(_root_function, grid[i], grid[i + 1], args=(exps, target),
                                xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps))
        if not (hi == upper and not _is_critical(upper, exps)):
            expected = _expected_roots(lo, hi, exps, target)
            if len(found) != expected:
                raise SpectrumError(
                    f"found {len(found)} roots in ({lo:.6g}, {hi:.6g}), expected {expected}")
        logger.debug(f"Interval ({lo:.6g}, {hi:.6g}): {len(found)} root(s)")
        roots.extend(found)

    roots = sorted(roots)
    if len(roots) < n_max + 1:
        raise SpectrumError(f"only {len(roots)} levels found below lambda = {upper}, need {n_max + 1}")
    levels = np.array(roots[:n_max + 1])
    residuals = np.array([abs(spectral_function(lam, exps).value - target) for lam in levels])
    limit = RESIDUAL_TOL * max(1.0, abs(target))
    if np.any(residuals > limit):
        logger.warning(f"Spectral residual {float(np.max(residuals)):.3e} exceeds {limit:.1e} "
                       f"for branch {branch}")
    logger.info(f"Solved branch {branch}: L = {L:.6g}, {len(levels)} levels, lowest {levels[0]:.12g}")
    return SpectrumResult(branch=branch, L=L, target=target, levels=levels, residuals=residuals)


def spectral_family(bd: BoundaryData, exps: Exponents, n_max: int,
                    params: PhysicalParams) -> Tuple[SpectrumResult, SpectrumResult]:
    """Spectra of the L+ and L- branches of one extension."""
    plus = solve_spectrum(exps, bd.L_plus, n_max, params, branch="plus")
    if bd.degenerate:
        minus = SpectrumResult(branch="minus", L=plus.L, target=plus.target,
                               levels=plus.levels.copy(), residuals=plus.residuals.copy())
    else:
        minus = solve_spectrum(exps, bd.L_minus, n_max, params, branch="minus")
    return plus, minus


def degenerate_levels(plus: SpectrumResult, minus: SpectrumResult,
                      tol: float = LEVEL_DEGENERACY_TOL) -> List[Tuple[int, int]]:
    """Index pairs (i, j) with |plus.levels[i] - minus.levels[j]| <= tol."""
    pairs = []
    for i, lam in enumerate(plus.levels):
        for j in np.nonzero(np.abs(minus.levels - lam) <= tol)[0]:
            pairs.append((i, int(j)))
    return pairs


def merged_levels(plus: SpectrumResult, minus: SpectrumResult) -> List[Tuple[str, int, float]]:
    """Both branches as (branch, n, lambda) rows ordered by lambda."""
    rows = [("plus", n, float(lam)) for n, lam in enumerate(plus.levels)]
    rows += [("minus", n, float(lam)) for n, lam in enumerate(minus.levels)]
    return sorted(rows, key=lambda row: (row[2], row[0] != "plus"))
