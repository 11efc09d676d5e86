"""Limit spectral graphs, WKB quantization, collocation spectra and
non-normality diagnostics for a singularly perturbed convection model and
the Orr-Sommerfeld problem."""

__version__ = "0.1.0"

from .errors import LimitspecError  # noqa: F401
