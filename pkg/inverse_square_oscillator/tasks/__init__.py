"""Command-line tasks."""
