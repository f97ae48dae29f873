"""Semantics package: truth-value logics, the staged evaluator and the 3VL-to-2VL translation."""
