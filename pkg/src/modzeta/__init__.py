"""Selberg zeta function of SL2(Z): geodesic sums, class numbers and L-values."""

__version__ = "0.1.0"
