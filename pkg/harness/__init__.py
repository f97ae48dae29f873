"""Randomized verification: generators, a brute-force oracle and equivalence checks."""
