"""Physical model and classical dynamics."""
