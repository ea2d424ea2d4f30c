"""Inverse-square oscillator package: U(2) quantizations of the harmonic oscillator with a g/x^2 barrier."""

__version__ = "0.1.0"
