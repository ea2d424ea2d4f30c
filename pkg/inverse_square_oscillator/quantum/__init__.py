"""Quantum spectra, eigenstates, propagators and dynamics."""
