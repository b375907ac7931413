"""Exact algebra for Milnor K-theory mod p^s as a Galois module over cyclic p-groups."""

__version__ = "0.1.0"
