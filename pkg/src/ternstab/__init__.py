"""Executable stability theory for homomorphisms of ternary semigroups."""

__version__ = "0.1.0"
