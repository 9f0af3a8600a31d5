"""Finite-scale reconstruction toolkit: permutation groups, finite structures,
amalgamation classes, expanded automorphism groups and Frucht graphs."""

__version__ = "0.1.0"
