"""Intersection-lattice toolkit for fibre sums of algebraic Lefschetz fibrations."""

__version__ = "0.1.0"
