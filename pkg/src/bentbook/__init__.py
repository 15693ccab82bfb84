"""Golay-sequence NOMA codebooks from compatible permutations of path quadratics."""

__version__ = "0.1.0"
