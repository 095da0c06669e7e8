"""Likelihood-encoder source coding lab."""

__version__ = "0.1.0"
