"""Datasets, pattern-holdout splits, and exact evaluation for propositional
satisfying-assignment prediction."""

__version__ = "0.1.0"
