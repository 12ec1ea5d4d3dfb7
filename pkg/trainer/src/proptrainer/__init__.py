"""Desk-scale encoder baselines for the satisfying-assignment task."""

__version__ = "0.1.0"
