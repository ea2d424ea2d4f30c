"""
Composite double-exponential (tanh-sinh) quadrature on the punctured line.

Each half line [0, X_max] is cut into panels; the panel touching the origin
uses a longer transformed range so that algebraic endpoint singularities
like x^(2 c2 - 1) are resolved. Refinement halves the step until two levels
agree.
"""
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from inverse_square_oscillator.utils.exceptions import QuadratureError
from inverse_square_oscillator.utils.logger import logger

PANEL_WIDTH = 0.5
SINGULAR_T_MAX = 5.0
REGULAR_T_MAX = 3.2
MIN_LEVEL = 3
MAX_LEVEL = 8
DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a fixed rule; nodes ascending, never 0."""
    nodes: np.ndarray
    weights: np.ndarray
    level: int

    def integrate(self, values: np.ndarray):
        return np.dot(self.weights, values)

    def inner(self, f_values: np.ndarray, g_values: np.ndarray) -> complex:
        """Weighted sum of conj(f) * g."""
        return complex(np.dot(self.weights, np.conj(f_values) * g_values))

    def __len__(self) -> int:
        return len(self.nodes)


def _tanh_sinh_panel(a: float, b: float, h: float, t_max: float):
    """Nodes and weights of the tanh-sinh rule on [a, b] with step h."""
    t = np.arange(-t_max, t_max + 0.5 * h, h)
    u = math.pi * np.sinh(t)
    with np.errstate(over="ignore", under="ignore"):
        # s and 1 - s computed separately to keep both ends at full precision.
        s = 1.0 / (1.0 + np.exp(-u))
        one_minus_s = 1.0 / (1.0 + np.exp(u))
        ds = math.pi * np.cosh(t) / (4.0 * np.cosh(0.5 * u) ** 2)
    width = b - a
    nodes = np.where(t < 0, a + width * s, b - width * one_minus_s)
    weights = h * width * ds
    keep = (nodes > a) & (nodes < b) & (weights > 0) & np.isfinite(weights)
    return nodes[keep], weights[keep]


def half_line_rule(x_max: float, level: int, panel_width: float = PANEL_WIDTH) -> QuadratureRule:
    """
    Composite rule on (0, x_max] with step h = 2^-level.

    Args:
        x_max (float): Outer cutoff
        level (int): Refinement level
        panel_width (float): Target panel width

    Returns:
        QuadratureRule: Rule with ascending positive nodes
    """
    if x_max <= 0:
        raise QuadratureError(f"outer cutoff must be positive, got {x_max}")
    h = 2.0 ** (-level)
    n_panels = max(1, int(math.ceil(x_max / panel_width)))
    edges = np.linspace(0.0, x_max, n_panels + 1)
    nodes, weights = [], []
    for i in range(n_panels):
        t_max = SINGULAR_T_MAX if i == 0 else REGULAR_T_MAX
        x, w = _tanh_sinh_panel(edges[i], edges[i + 1], h, t_max)
        nodes.append(x)
        weights.append(w)
    return QuadratureRule(nodes=np.concatenate(nodes), weights=np.concatenate(weights), level=level)


def line_rule(x_max: float, level: int, panel_width: float = PANEL_WIDTH) -> QuadratureRule:
    """Mirror of half_line_rule covering [-x_max, 0) and (0, x_max]."""
    half = half_line_rule(x_max, level, panel_width)
    return QuadratureRule(
        nodes=np.concatenate([-half.nodes[::-1], half.nodes]),
        weights=np.concatenate([half.weights[::-1], half.weights]),
        level=level,
    )


def refine(
        measure: Callable[[QuadratureRule], np.ndarray],
        x_max: float,
        tol: float = DEFAULT_TOL,
        both_sides: bool = True,
        min_level: int = MIN_LEVEL,
        max_level: int = MAX_LEVEL):
    """
    Halve the step until the measured output changes by at most tol.

    Args:
        measure: Maps a rule to an array of quantities (integrals, Gram entries, ...)
        x_max (float): Outer cutoff
        tol (float): Absolute tolerance on the max-norm change
        both_sides (bool): Integrate over the whole punctured line
        min_level (int): First level tried
        max_level (int): Last level tried

    Returns:
        Tuple of (measured value at the finer level, finer rule, estimated error)

    Raises:
        QuadratureError: If the refinement loop does not converge
    """
    build = line_rule if both_sides else half_line_rule
    rule = build(x_max, min_level)
    previous = np.asarray(measure(rule))
    change = math.inf
    for level in range(min_level + 1, max_level + 1):
        rule = build(x_max, level)
        current = np.asarray(measure(rule))
        change = float(np.max(np.abs(current - previous))) if current.size else 0.0
        logger.debug(f"Quadrature level {level}: {len(rule)} nodes, change {change:.3e}")
        if change <= tol:
            return current, rule, change
        previous = current
    raise QuadratureError(
        f"refinement did not reach {tol:.1e} by level {max_level} (last change {change:.3e})")


def integrate(f: Callable[[np.ndarray], np.ndarray], x_max: float, tol: float = DEFAULT_TOL,
              both_sides: bool = True):
    """Integral of f over the punctured line (or (0, x_max]) with an error estimate."""
    value, _, error = refine(lambda rule: rule.integrate(f(rule.nodes)), x_max, tol, both_sides)
    return value.item(), error


def inner_product(f: Callable[[np.ndarray], np.ndarray], g: Callable[[np.ndarray], np.ndarray],
                  x_max: float, tol: float = DEFAULT_TOL) -> complex:
    """
    Integral of conj(f) * g over the punctured line.

    Raises:
        QuadratureError: If refinement does not reach tol
    """
    value, _ = integrate(lambda x: np.conj(f(x)) * g(x), x_max, tol)
    return complex(value)


def outer_cutoff(lambda_max: float, length_scale: float) -> float:
    """X_max = max(8, 2 sqrt(lambda_max)) in units of the oscillator length."""
    return max(8.0, 2.0 * math.sqrt(max(lambda_max, 0.0))) * length_scale
