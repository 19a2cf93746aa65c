"""Effective bandwidth and support estimates for sampled signals.

Every estimate is the smallest symmetric interval ``[-w, w]`` holding a
given fraction of the energy, since no finite record is strictly
band- or time-limited.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidParameterError
from .matrix import LctMatrix
from .signal import SampledSignal, dft_spectrum
from .transform import B_ZERO_TOL, lct_forward


@dataclass(frozen=True)
class SupportReport:
    """Measured one-sided extent.

    ``w_eff`` is in Hz for spectra, seconds for time signals, and in
    Hz-equivalent units ``u/(2*pi)`` for LCT domains with ``b != 0``
    (where an ``A = 0`` matrix maps a ``W`` Hz band onto ``W*|B|``).
    ``extent`` keeps the raw axis value (``u`` itself for LCT domains).
    """

    w_eff: float
    fraction: float
    domain_tag: str
    extent: float

    def __post_init__(self):
        if not self.w_eff >= 0:
            raise InvalidParameterError(f"w_eff must be >= 0, got {self.w_eff}")
        if not 0 < self.fraction < 1:
            raise InvalidParameterError(f"fraction must lie in (0, 1), got {self.fraction}")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def symmetric_extent(axis, values, fraction: float) -> float:
    """Smallest ``w`` with ``sum(|values|**2 over |axis| <= w) >= fraction * total``.

    Each sample stands for a cell of one grid step centered on it, and the
    crossing is interpolated linearly inside the cell, which keeps the
    result monotone in ``fraction``.
    """
    if not 0 < fraction < 1:
        raise InvalidParameterError(f"fraction must lie in (0, 1), got {fraction}")
    axis = np.asarray(axis, dtype=float)
    energy = np.abs(np.asarray(values)) ** 2
    total = energy.sum()
    if not total > 0:
        raise InvalidParameterError("signal has zero energy")
    half = 0.5 * abs(axis[1] - axis[0]) if axis.size > 1 else 0.0
    levels, inverse = np.unique(np.abs(axis), return_inverse=True)
    per_level = np.bincount(inverse, weights=energy)
    cum = np.cumsum(per_level) / total
    edges = levels + half
    k = min(int(np.searchsorted(cum, fraction)), levels.size - 1)
    lo_edge = edges[k - 1] if k > 0 else 0.0
    lo_cum = cum[k - 1] if k > 0 else 0.0
    share = (fraction - lo_cum) / (cum[k] - lo_cum)
    return float(lo_edge + share * (edges[k] - lo_edge))


def effective_bandwidth(x: SampledSignal, fraction: float = 0.99) -> SupportReport:
    """One-sided bandwidth (Hz) of the DFT spectrum holding ``fraction`` of the energy."""
    spectrum = dft_spectrum(x)
    w = symmetric_extent(spectrum.t, spectrum.samples, fraction)
    return SupportReport(w, fraction, "frequency", w)


def effective_support(x: SampledSignal, fraction: float = 0.99) -> SupportReport:
    """One-sided time extent (s) around the origin holding ``fraction`` of the energy."""
    w = symmetric_extent(x.t, x.samples, fraction)
    return SupportReport(w, fraction, "time", w)


def lct_domain_tag(m: LctMatrix) -> str:
    return "lct([" + ", ".join(f"{v:.17g}" for v in m.to_list()) + "])"


def effective_lct_support(f: SampledSignal, m: LctMatrix, fraction: float = 0.99, **kwargs) -> SupportReport:
    """Transform ``f`` with ``m`` and measure the output's symmetric support.

    For ``b = 0`` the output axis is a rescaled time axis and ``w_eff`` is
    reported in its raw units; otherwise ``w_eff = extent / (2*pi)``.
    Extra keyword arguments go to :func:`lct_forward`.
    """
    out = lct_forward(f, m, **kwargs)
    extent = symmetric_extent(out.t, out.samples, fraction)
    w = extent if abs(m.b) <= B_ZERO_TOL else extent / (2 * math.pi)
    return SupportReport(w, fraction, lct_domain_tag(m), extent)
