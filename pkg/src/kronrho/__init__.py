"""Exact computations around the N-Kronecker quiver and the graded algebra k<X1..XN>/(sum Xi^2)."""

__version__ = "0.1.0"
