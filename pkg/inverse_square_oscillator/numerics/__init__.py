"""Numerical kernels: special functions and quadrature."""
