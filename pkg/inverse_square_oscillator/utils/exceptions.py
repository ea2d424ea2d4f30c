"""
Exception hierarchy for the inverse-square oscillator tools.

Library code raises these; ``main`` maps them onto exit codes.
"""


class IsqError(Exception):
    """Base class for all package errors."""


class ConfigError(IsqError):
    """Invalid or unreadable run configuration (exit code 1)."""


class ParameterError(IsqError, ValueError):
    """Physical input outside the admissible domain."""


class NumericalToleranceError(IsqError):
    """A numerical check missed its tolerance (exit code 2)."""

    def __init__(self, check: str, message: str):
        super().__init__(f"{check}: {message}")
        self.check = check


class QuadratureError(NumericalToleranceError):
    """Quadrature refinement did not converge."""

    def __init__(self, message: str):
        super().__init__("quadrature", message)


class SpectrumError(NumericalToleranceError):
    """Root bracketing found an unexpected number of roots."""

    def __init__(self, message: str):
        super().__init__("spectrum", message)


class TruncationError(NumericalToleranceError):
    """A truncated expansion or series missed its requested tolerance."""

    def __init__(self, message: str):
        super().__init__("truncation", message)


class IntegrationError(NumericalToleranceError):
    """The classical integrator stepped across the barrier."""

    def __init__(self, message: str):
        super().__init__("integration", message)
