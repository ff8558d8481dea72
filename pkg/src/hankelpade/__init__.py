"""Eigenvalues of even 1-D Schrödinger potentials from power-series coefficients.

Two quantization conditions are provided: roots of a single series
coefficient (the Hill-determinant route) and roots of Hankel determinants
built from the coefficients (the Hankel-Padé route).
"""

__version__ = "0.1.0"
