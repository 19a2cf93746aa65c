"""Sampling and reconstruction of signals bandlimited in an LCT domain.

A signal whose FRFT by ``alpha`` is bandlimited in the LCT domain ``M``
is bandlimited in the composite domain ``M @ frft(alpha) = [a', b'; c', d']``
with ``b' = s = A sin(alpha) + B cos(alpha)``. Demodulating by the chirp
``exp(1j a' t**2/(2 b'))`` leaves a conventionally bandlimited signal of
bandwidth ``W_M/|s|`` Hz (``W_M`` in Hz-equivalent units ``u/(2 pi)``), so
``2 W_M/s`` samples per second suffice. Reconstruction is demodulate,
windowed-sinc interpolate, remodulate.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .capacity import lct_rate_factor
from .errors import InvalidParameterError
from .matrix import LctMatrix, compose, frft_matrix
from .signal import Grid, SampledSignal, sinc_interpolate
from .transform import B_ZERO_TOL

log = logging.getLogger(__name__)


def min_sampling_rate(w_m: float, a: float, b: float, alpha: float) -> float:
    """``2 W_M / (a sin(alpha) + b cos(alpha))`` samples per second."""
    if not w_m > 0:
        raise InvalidParameterError(f"w_m must be positive, got {w_m}")
    s = lct_rate_factor(a, b, alpha)
    if not s > 0:
        raise InvalidParameterError(f"a*sin(alpha) + b*cos(alpha) = {s:.6g} must be positive")
    return 2.0 * w_m / s


def composite_matrix(m: LctMatrix, alpha: float = 0.0) -> LctMatrix:
    """``m @ frft_matrix(alpha)``: the domain in which the signal is bandlimited."""
    if alpha == 0:
        return m
    return compose(m, frft_matrix(alpha))


def _chirp_rate(m: LctMatrix, alpha: float) -> tuple[float, float]:
    comp = composite_matrix(m, alpha)
    if abs(comp.b) <= B_ZERO_TOL:
        raise InvalidParameterError("composite matrix has b = 0; the signal has no finite sampling rate")
    return comp.a / comp.b, comp.b


def demodulate(x: SampledSignal, m: LctMatrix, alpha: float = 0.0) -> SampledSignal:
    """Multiply by ``exp(1j a' t**2/(2 b'))``, leaving a conventionally bandlimited signal."""
    rate, _ = _chirp_rate(m, alpha)
    if rate == 0:
        return x
    t = x.t
    return x.with_samples(x.samples * np.exp(0.5j * rate * t * t))


def reconstruct_from_samples(
    samples: SampledSignal,
    m: LctMatrix,
    w_m: float,
    grid: Grid,
    alpha: float = 0.0,
    force: bool = False,
    lobes: int = 64,
) -> SampledSignal:
    """Rebuild an LCT-bandlimited signal on ``grid`` from uniform samples.

    ``samples.fs`` must reach :func:`min_sampling_rate` for ``(w_m, m,
    alpha)`` unless ``force`` is set, in which case the aliased result is
    returned with a warning.
    """
    rate, s = _chirp_rate(m, alpha)
    needed = 2.0 * w_m / abs(s)
    if samples.fs < needed * (1 - 1e-12):
        if not force:
            raise InvalidParameterError(
                f"sampling rate {samples.fs:.6g}/s is below the minimum {needed:.6g}/s; pass force=True to proceed"
            )
        log.warning("sampling at %.4g/s, below the minimum %.4g/s; output is aliased", samples.fs, needed)
    base = demodulate(samples, m, alpha)
    values = sinc_interpolate(base, grid.points(), lobes=lobes)
    if rate != 0:
        t = grid.points()
        values = values * np.exp(-0.5j * rate * t * t)
    return SampledSignal(values, grid.start, grid.step)


def chirped_sinc(t, m: LctMatrix, w_m: float, alpha: float = 0.0) -> np.ndarray:
    """A signal bandlimited to ``w_m`` in the composite domain of ``(m, alpha)``.

    ``exp(-1j a' t**2/(2 b')) * sinc(2 w_m t/|b'|)``: its composite LCT is
    a rectangle of half-width ``w_m`` (Hz-equivalent), times a chirp.
    """
    rate, s = _chirp_rate(m, alpha)
    t = np.asarray(t, dtype=float)
    return np.exp(-0.5j * rate * t * t) * np.sinc(2.0 * w_m * t / abs(s))


def sample_signal(func, rate: float, t_min: float, t_max: float) -> SampledSignal:
    """Samples of ``func`` at ``k / rate`` covering ``[t_min, t_max]``."""
    if not rate > 0:
        raise InvalidParameterError("rate must be positive")
    k0 = math.floor(t_min * rate)
    k1 = math.ceil(t_max * rate)
    t = np.arange(k0, k1 + 1) / rate
    return SampledSignal(func(t), t[0], 1.0 / rate)
