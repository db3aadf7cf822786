"""Exact engine for noncommutative differential forms, X-complexes and
Chern cocycles over finite-dimensional algebras, with a floating-point
heat-kernel companion."""

__version__ = "0.1.0"
