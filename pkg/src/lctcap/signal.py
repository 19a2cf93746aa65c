"""Uniformly sampled complex signals and the DSP primitives the pipelines use.

Spectra follow the centered convention: bin frequencies run from ``-fs/2``
upward with spacing ``1/(n*dt)``, and the DFT is scaled by ``dt`` so that it
approximates the continuous transform ``X(f) = int x(t) exp(-2j*pi*f*t) dt``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import GridError, InvalidParameterError


class Grid(NamedTuple):
    """Uniform grid ``start + k*step`` for ``k = 0..n-1``."""

    start: float
    step: float
    n: int

    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.n)


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Complex samples on the grid ``t0 + k*dt``.

    The sample array is copied and made read-only on construction.
    """

    samples: np.ndarray
    t0: float = 0.0
    dt: float = 1.0

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex).reshape(-1)
        if samples.size < 1:
            raise InvalidParameterError("a signal needs at least one sample")
        if not np.all(np.isfinite(samples)):
            raise InvalidParameterError("signal samples must be finite")
        dt = float(self.dt)
        if not (dt > 0 and math.isfinite(dt)):
            raise InvalidParameterError(f"sample spacing must be positive, got {dt}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", dt)

    @classmethod
    def centered(cls, samples, dt: float) -> "SampledSignal":
        """Place ``samples`` so that index ``n//2`` sits at the origin."""
        n = len(samples)
        return cls(samples, -(n // 2) * dt, dt)

    @classmethod
    def from_function(cls, func, grid: Grid) -> "SampledSignal":
        return cls(func(grid.points()), grid.start, grid.step)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def fs(self) -> float:
        return 1.0 / self.dt

    @property
    def grid(self) -> Grid:
        return Grid(self.t0, self.dt, self.n)

    def with_samples(self, samples) -> "SampledSignal":
        return SampledSignal(samples, self.t0, self.dt)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"SampledSignal(n={self.n}, t0={self.t0!r}, dt={self.dt!r})"


@dataclass(frozen=True)
class NoiseSpec:
    """AWGN with two-sided PSD ``eta/2`` per real dimension."""

    eta: float
    seed: int = 0

    def __post_init__(self):
        if not (self.eta >= 0 and math.isfinite(self.eta)):
            raise InvalidParameterError(f"noise scale eta must be >= 0, got {self.eta}")


def centered_frequencies(n: int, dt: float) -> np.ndarray:
    df = 1.0 / (n * dt)
    return (np.arange(n) - n // 2) * df


def dft_spectrum(x: SampledSignal) -> SampledSignal:
    """Centered spectrum ``X[k] = dt * sum_m x[m] exp(-2j*pi*f_k*t_m)``.

    The returned container's grid is the frequency axis (Hz).
    """
    if x.n < 2:
        raise InvalidParameterError("dft_spectrum needs at least two samples")
    f = centered_frequencies(x.n, x.dt)
    spectrum = np.fft.fftshift(np.fft.fft(x.samples)) * x.dt * np.exp(-2j * np.pi * f * x.t0)
    return SampledSignal(spectrum, f[0], f[1] - f[0])


def inverse_dft_spectrum(spectrum: SampledSignal, t0: float) -> SampledSignal:
    """Undo :func:`dft_spectrum` for a signal whose grid started at ``t0``."""
    n = spectrum.n
    dt = 1.0 / (n * spectrum.dt)
    f = centered_frequencies(n, dt)
    samples = np.fft.ifft(np.fft.ifftshift(spectrum.samples * np.exp(2j * np.pi * f * t0))) / dt
    return SampledSignal(samples, t0, dt)


def brickwall_lowpass(x: SampledSignal, w_cut: float) -> SampledSignal:
    """Zero every DFT bin with ``|f| > w_cut``."""
    nyquist = 0.5 * x.fs
    if not (0 < w_cut <= nyquist * (1 + 1e-12)):
        raise InvalidParameterError(f"cutoff {w_cut} Hz outside (0, fs/2 = {nyquist}]")
    f = np.fft.fftfreq(x.n, x.dt)
    spectrum = np.fft.fft(x.samples)
    spectrum[np.abs(f) > w_cut * (1 + 1e-12)] = 0.0
    return x.with_samples(np.fft.ifft(spectrum))


def add_awgn(x: SampledSignal, noise: NoiseSpec) -> SampledSignal:
    """Add circular complex Gaussian noise of total variance ``eta*fs`` per sample.

    Each of the real and imaginary parts gets ``eta*fs/2``, so the real
    component on its own has two-sided PSD ``eta/2``.
    """
    if noise.eta == 0:
        return x.with_samples(x.samples)
    rng = np.random.default_rng(noise.seed)
    sigma = math.sqrt(noise.eta * x.fs / 2.0)
    draws = rng.standard_normal((2, x.n))
    return x.with_samples(x.samples + sigma * (draws[0] + 1j * draws[1]))


def measure_energy(x: SampledSignal) -> float:
    return float(np.sum(np.abs(x.samples) ** 2) * x.dt)


def relative_l2(estimate, reference) -> float:
    """``||estimate - reference|| / ||reference||`` for arrays or signals."""
    est = estimate.samples if isinstance(estimate, SampledSignal) else np.asarray(estimate)
    ref = reference.samples if isinstance(reference, SampledSignal) else np.asarray(reference)
    return float(np.linalg.norm(est - ref) / np.linalg.norm(ref))


def interpolation_kernel(x, lobes: int = 64, taper: str = "kaiser", beta: float = 12.0) -> np.ndarray:
    """Windowed ``sinc`` truncated at ``lobes`` zero crossings per side.

    ``taper="kaiser"`` applies a Kaiser window over the full span;
    ``taper="raised_cosine"`` keeps the sinc flat and rolls off only the
    last 8 lobes, which leaves visible passband ripple near Nyquist.
    """
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    if taper == "kaiser":
        inside = np.clip(1.0 - (ax / lobes) ** 2, 0.0, None)
        window = np.i0(beta * np.sqrt(inside)) / np.i0(beta)
    elif taper == "raised_cosine":
        flat = lobes - 8
        window = np.where(ax <= flat, 1.0, 0.5 * (1 + np.cos(np.pi * (ax - flat) / 8)))
    else:
        raise InvalidParameterError(f"unknown taper {taper!r}")
    return np.where(ax < lobes, np.sinc(x) * window, 0.0)


def sinc_interpolate(x: SampledSignal, points, lobes: int = 64, taper: str = "kaiser") -> np.ndarray:
    """Band-limited interpolation of ``x`` at arbitrary ``points``.

    Samples outside the grid are treated as zero.
    """
    points = np.asarray(points, dtype=float).reshape(-1)
    out = np.empty(points.size, dtype=complex)
    offsets = np.arange(-lobes + 1, lobes + 1)
    for lo in range(0, points.size, 4096):
        chunk = points[lo:lo + 4096]
        pos = (chunk - x.t0) / x.dt
        base = np.floor(pos).astype(int)
        idx = base[:, None] + offsets[None, :]
        weights = interpolation_kernel(pos[:, None] - idx, lobes, taper)
        valid = (idx >= 0) & (idx < x.n)
        vals = x.samples[np.clip(idx, 0, x.n - 1)] * valid
        out[lo:lo + 4096] = np.sum(weights * vals, axis=1)
    return out


_HEADERS = {"time": ("t", "re", "im"), "frequency": ("f", "re", "im")}


def write_signal_csv(path, x: SampledSignal, axis: str = "time") -> None:
    """Write ``t,re,im`` (or ``f,re,im``) rows with 17 significant digits."""
    header = _HEADERS[axis]
    lines = [",".join(header)]
    for tk, v in zip(x.t, x.samples):
        lines.append(f"{tk:.17g},{v.real:.17g},{v.imag:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_signal_csv(path) -> tuple[SampledSignal, str]:
    """Load a signal CSV; returns the signal and its axis kind (``time``/``frequency``)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidParameterError(f"{path}: empty signal file")
    header = tuple(h.strip() for h in rows[0])
    axis = next((k for k, h in _HEADERS.items() if h == header), None)
    if axis is None:
        raise InvalidParameterError(f"{path}: header must be t,re,im or f,re,im, got {','.join(header)}")
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=float)
    except ValueError as exc:
        raise InvalidParameterError(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] != 3:
        raise InvalidParameterError(f"{path}: expected three numeric columns")
    t = data[:, 0]
    n = t.size
    dt = (t[-1] - t[0]) / (n - 1) if n > 1 else 1.0
    if n > 1:
        if dt <= 0:
            raise GridError(f"{path}: sample axis must be increasing")
        deviation = np.max(np.abs(t - (t[0] + dt * np.arange(n))))
        if deviation > 1e-9 * dt:
            raise GridError(f"{path}: non-uniform sample spacing (max deviation {deviation:.3g})")
    return SampledSignal(data[:, 1] + 1j * data[:, 2], t[0], dt), axis
