"""Deterministic 2D multitask self-aggregation simulator and controller grid search."""

__version__ = "0.1.0"
