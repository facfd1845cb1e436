"""Numerical laboratory for Fourier and Laplace inversion under Holder-type regularity."""

__version__ = "0.1.0"
