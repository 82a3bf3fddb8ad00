"""Exact operator calculus for ladder operators and symmetry algebras of
the TTW and PVZ Hamiltonians on constant-curvature spaces."""

__version__ = "0.1.0"
