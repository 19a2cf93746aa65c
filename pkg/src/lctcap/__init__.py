"""Linear canonical transform toolkit for generalized AWGN channel capacity.

Modules
-------
matrix      2x2 unit-determinant LCT parameter matrices
signal      sampled signals, spectra, filters, noise, CSV I/O
transform   numerical forward/inverse LCT and fractional Fourier transform
bands       effective bandwidth and LCT-domain support
capacity    closed-form capacities, wideband limits, optimizers
channel     Monte Carlo simulation of the LCT-modified channel
sampling    LCT-domain sampling rates and reconstruction
cli         command-line front end
"""

from .errors import (
    ConfigError,
    DeterminantError,
    GridError,
    InvalidParameterError,
    LctCapError,
    NumericalPreconditionError,
)
from .matrix import LctMatrix, compose, invert
from .signal import Grid, NoiseSpec, SampledSignal
from .transform import frft, lct_forward, lct_inverse, lct_quadrature

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DeterminantError",
    "GridError",
    "Grid",
    "InvalidParameterError",
    "LctCapError",
    "LctMatrix",
    "NoiseSpec",
    "NumericalPreconditionError",
    "SampledSignal",
    "compose",
    "frft",
    "invert",
    "lct_forward",
    "lct_inverse",
    "lct_quadrature",
]
