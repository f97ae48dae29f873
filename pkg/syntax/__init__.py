"""Syntax package: abstract syntax, concrete syntax and well-formedness."""
