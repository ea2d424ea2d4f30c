"""Test package for the inverse-square oscillator tools."""
