"""Finite-alphabet probability arithmetic."""
