"""Exact soft-covering sweeps and auxiliary-distribution identity checks."""
