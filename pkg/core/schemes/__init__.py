"""End-to-end Monte Carlo coding pipelines."""
