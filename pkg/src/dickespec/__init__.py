"""Driven disordered Dicke model: Liouvillian spectra, symmetry counts, dynamics."""

from dickespec.operators import ModelParams

__all__ = ["ModelParams"]
__version__ = "0.1.0"
