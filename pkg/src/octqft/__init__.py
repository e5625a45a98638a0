"""Exact evaluator for dual cobordism operations in the labeled open-closed
TQFT of classifying spaces of compact Lie groups."""

__version__ = "0.1.0"
