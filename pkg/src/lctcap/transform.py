"""Numerical linear canonical transform.

Forward transform for ``b != 0``::

    F(u) = sqrt(1/(2j*pi*b)) * int f(t) exp(j/2 * (d/b*u**2 - 2/b*u*t + a/b*t**2)) dt

and ``F(u) = sqrt(d) * exp(j*c*d*u**2/2) * f(d*u)`` for ``b = 0``.

Two fast paths are offered:

``method="chirp"``
    chirp multiplication, a Fourier sum (FFT on the natural output grid,
    chirp-z on any other uniform grid), then a second chirp. This is the
    Riemann sum of the integral over the finite input grid.
``method="spectral"``
    the factorization ``[a, b; c, d] = [1, 0; c/a, 1] [a, 0; 0, 1/a] [1, b/a; 0, 1]``
    (Fresnel filter in the DFT domain, grid rescaling, chirp). The input is
    treated as one period of a periodic signal, which keeps the
    conventional bandwidth of DFT-bandlimited inputs exact. Needs ``a != 0``.

Both are exactly unitary and exactly invertible on their natural grids.
:func:`lct_quadrature` is the direct O(n*m) summation used as the oracle.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.signal import czt

from .errors import GridError, InvalidParameterError
from .matrix import LctMatrix, frft_matrix, invert
from .signal import Grid, SampledSignal, sinc_interpolate

B_ZERO_TOL = 1e-9
SUPPORT_TOL = 1e-8


def _is_b_zero(m: LctMatrix) -> bool:
    return abs(m.b) <= B_ZERO_TOL


def _support_extent(x: SampledSignal, tol: float = SUPPORT_TOL) -> float:
    """Largest ``|t|`` at which ``|x|`` exceeds ``tol`` times its peak."""
    mag = np.abs(x.samples)
    peak = mag.max()
    if peak == 0:
        return 0.0
    idx = np.nonzero(mag > tol * peak)[0]
    t = x.t
    return float(max(abs(t[idx[0]]), abs(t[idx[-1]])))


ALIAS_TOL = 1e-6


def _edge_fraction(values: np.ndarray, x: SampledSignal) -> float:
    power = np.abs(np.fft.fft(values)) ** 2
    total = power.sum()
    if total == 0:
        return 0.0
    nu = np.abs(np.fft.fftfreq(x.n, x.dt))
    return float(power[nu > 0.4 * x.fs].sum() / total)


def check_chirp_sampling(x: SampledSignal, rate: float) -> None:
    """Refuse when multiplying ``x`` by ``exp(j*rate*t**2/2)`` aliases on its grid.

    The product is what the chirp method Fourier-sums. It counts as aliased
    when more than ``ALIAS_TOL`` of its energy sits above ``0.4 fs`` and the
    chirp put it there (at least 10x the input's own share). Measuring the
    product accepts inputs that already carry the opposite chirp, such as a
    forward transform's output, and leaves non-bandlimited inputs to the
    caller.
    """
    if rate == 0:
        return
    edge = _edge_fraction(x.samples * np.exp(0.5j * rate * x.t**2), x)
    if edge > ALIAS_TOL and edge > 10 * _edge_fraction(x.samples, x):
        t_max = _support_extent(x)
        raise GridError(
            f"chirped input has {edge:.2g} of its energy near fs/2 = {0.5 * x.fs:.4g} Hz "
            f"(chirp reaches {abs(rate) * t_max / (2 * math.pi):.4g} Hz at |t| = {t_max:.4g}); "
            "use a finer grid or a shorter signal"
        )


def _lct_constant(b: float) -> complex:
    return cmath.sqrt(1.0 / (2j * math.pi * b))


def natural_grid(f: SampledSignal, m: LctMatrix, method: str = "chirp", oversample: int = 1) -> Grid:
    """Output grid that :func:`lct_forward` uses when none is requested."""
    if _is_b_zero(m):
        step = f.dt / abs(m.d)
        start = (f.t0 if m.d > 0 else f.t0 + (f.n - 1) * f.dt) / m.d
        return Grid(start, step, f.n)
    if method == "spectral":
        step = abs(m.a) * f.dt
        start = m.a * (f.t0 if m.a > 0 else f.t0 + (f.n - 1) * f.dt)
        return Grid(start, step, f.n)
    n = oversample * f.n
    step = 2 * math.pi * abs(m.b) / (n * f.dt)
    return Grid(-(n // 2) * step, step, n)


def lct_quadrature(f: SampledSignal, m: LctMatrix, u_grid: Grid, edge_tol: float = 1e-6) -> SampledSignal:
    """Direct Riemann-sum evaluation of the ``b != 0`` integral at every grid point."""
    if _is_b_zero(m):
        raise InvalidParameterError(f"|b| = {abs(m.b):.3g} is below {B_ZERO_TOL}; use the b = 0 branch")
    mag = np.abs(f.samples)
    if max(mag[0], mag[-1]) > edge_tol * mag.max():
        raise GridError(
            f"signal has not decayed at the grid edges ({max(mag[0], mag[-1]) / mag.max():.2e} of peak, "
            f"limit {edge_tol:.0e})"
        )
    t = f.t
    u = u_grid.points()
    weighted = f.samples * np.exp(0.5j * m.a / m.b * t * t)
    out = np.empty(u.size, dtype=complex)
    for lo in range(0, u.size, 512):
        uc = u[lo:lo + 512]
        kernel = np.exp(-1j * np.outer(uc, t) / m.b)
        out[lo:lo + 512] = kernel @ weighted
    out *= f.dt * _lct_constant(m.b) * np.exp(0.5j * m.d / m.b * u * u)
    return SampledSignal(out, u_grid.start, u_grid.step)


def _fourier_sum(h: np.ndarray, t0: float, dt: float, b: float, grid: Grid, natural_step: float) -> np.ndarray:
    """``sum_m h[m] exp(-1j * u_k * t_m / b)`` on ``grid``."""
    n = h.size
    u0, du, n_out = grid
    k = np.arange(n_out)
    pre = h * np.exp(-1j * u0 * dt * np.arange(n) / b)
    if math.isclose(du, natural_step, rel_tol=1e-9) and n_out <= n:
        raw = np.fft.fft(pre) if b > 0 else np.fft.ifft(pre) * n
        raw = raw[:n_out]
    else:
        raw = czt(pre, m=n_out, w=np.exp(-1j * du * dt / b), a=1.0)
    return raw * np.exp(-1j * u0 * t0 / b) * np.exp(-1j * du * k * t0 / b)


def _b_zero_forward(f: SampledSignal, m: LctMatrix, grid: Grid | None) -> SampledSignal:
    scale = cmath.sqrt(m.d)
    if grid is None:
        grid = natural_grid(f, m)
        values = f.samples if m.d > 0 else f.samples[::-1]
    else:
        src = m.d * grid.points()
        _check_coverage(f, src)
        values = sinc_interpolate(f, src)
    u = grid.points()
    return SampledSignal(scale * np.exp(0.5j * m.c * m.d * u * u) * values, grid.start, grid.step)


def _b_zero_inverse(big_f: SampledSignal, m: LctMatrix, grid: Grid | None) -> SampledSignal:
    # exact reciprocal of _b_zero_forward: f(t) = F(t/d) exp(-j c t^2 / (2 d)) / sqrt(d)
    scale = cmath.sqrt(m.d)
    if grid is None:
        grid = natural_grid(big_f, invert(m))
        values = big_f.samples if m.d > 0 else big_f.samples[::-1]
    else:
        src = grid.points() / m.d
        _check_coverage(big_f, src)
        values = sinc_interpolate(big_f, src)
    t = grid.points()
    return SampledSignal(values * np.exp(-0.5j * m.c * t * t / m.d) / scale, grid.start, grid.step)


def _check_coverage(x: SampledSignal, points: np.ndarray) -> None:
    t_end = x.t0 + (x.n - 1) * x.dt
    outside = (points < x.t0 - 0.5 * x.dt) | (points > t_end + 0.5 * x.dt)
    if np.any(outside):
        mag = np.abs(x.samples)
        if max(mag[0], mag[-1]) > 1e-6 * mag.max():
            raise GridError("requested output grid reaches beyond the region where the input has decayed")


def _fresnel_filter(x: SampledSignal, beta: float) -> np.ndarray:
    nu = np.fft.fftfreq(x.n, x.dt)
    return np.fft.ifft(np.fft.fft(x.samples) * np.exp(-0.5j * beta * (2 * math.pi * nu) ** 2))


def _spectral_constant(m: LctMatrix) -> complex:
    if abs(m.a) <= B_ZERO_TOL:
        raise InvalidParameterError("the spectral method needs a != 0; use method='chirp'")
    # the factored form lands on the other square-root branch when a < 0 < b;
    # flip it so both methods share the direct kernel's constant
    const = cmath.sqrt(1.0 / m.a)
    return -const if (m.a < 0 and m.b > 0) else const


def _spectral_forward(f: SampledSignal, m: LctMatrix) -> SampledSignal:
    const = _spectral_constant(m)
    g = _fresnel_filter(f, m.b / m.a) * const
    grid = natural_grid(f, m, method="spectral")
    if m.a < 0:
        g = g[::-1]
    u = grid.points()
    return SampledSignal(g * np.exp(0.5j * (m.c / m.a) * u * u), grid.start, grid.step)


def _spectral_inverse(big_f: SampledSignal, m: LctMatrix) -> SampledSignal:
    const = _spectral_constant(m)
    u = big_f.t
    g = big_f.samples * np.exp(-0.5j * (m.c / m.a) * u * u) / const
    dt = big_f.dt / abs(m.a)
    if m.a > 0:
        t0 = big_f.t0 / m.a
    else:
        g = g[::-1]
        t0 = (big_f.t0 + (big_f.n - 1) * big_f.dt) / m.a
    x = SampledSignal(g, t0, dt)
    return x.with_samples(_fresnel_filter(x, -m.b / m.a))


def _chirp_forward(f: SampledSignal, m: LctMatrix, grid: Grid | None, oversample: int, check: bool) -> SampledSignal:
    if check:
        check_chirp_sampling(f, m.a / m.b)
    if oversample < 1:
        raise InvalidParameterError("oversample must be >= 1")
    samples, t0 = f.samples, f.t0
    if oversample > 1:
        pad = (oversample - 1) * f.n
        left = pad // 2
        samples = np.concatenate([np.zeros(left), samples, np.zeros(pad - left)])
        t0 = f.t0 - left * f.dt
    n = samples.size
    natural_step = 2 * math.pi * abs(m.b) / (n * f.dt)
    if grid is None:
        grid = Grid(-(n // 2) * natural_step, natural_step, n)
    t = t0 + f.dt * np.arange(n)
    h = samples * np.exp(0.5j * m.a / m.b * t * t)
    total = _fourier_sum(h, t0, f.dt, m.b, grid, natural_step)
    u = grid.points()
    out = f.dt * _lct_constant(m.b) * np.exp(0.5j * m.d / m.b * u * u) * total
    return SampledSignal(out, grid.start, grid.step)


def lct_forward(
    f: SampledSignal,
    m: LctMatrix,
    *,
    method: str = "chirp",
    grid: Grid | None = None,
    oversample: int = 1,
    check: bool = True,
) -> SampledSignal:
    """Linear canonical transform of ``f`` with matrix ``m``.

    Parameters
    ----------
    f : SampledSignal
        Input on a uniform grid.
    m : LctMatrix
        Transform parameters; ``|b| <= 1e-9`` uses the ``b = 0`` branch.
    method : {"chirp", "spectral"}
        Fast algorithm for ``b != 0`` (see module docstring).
    grid : Grid, optional
        Output grid for the chirp method or the ``b = 0`` branch. Defaults
        to the natural grid (see :func:`natural_grid`); other spacings use
        the chirp-z transform or band-limited resampling.
    oversample : int
        Zero-padding factor for the chirp method's natural grid.
    check : bool
        Refuse inputs whose chirp would alias on the grid.
    """
    if _is_b_zero(m):
        return _b_zero_forward(f, m, grid)
    if method == "chirp":
        return _chirp_forward(f, m, grid, oversample, check)
    if method == "spectral":
        if grid is not None:
            raise InvalidParameterError("the spectral method only produces its natural grid")
        return _spectral_forward(f, m)
    raise InvalidParameterError(f"unknown method {method!r}")


def lct_inverse(
    big_f: SampledSignal,
    m: LctMatrix,
    *,
    method: str = "chirp",
    grid: Grid | None = None,
    check: bool = True,
) -> SampledSignal:
    """Inverse transform: recover ``f`` from ``F = lct_forward(f, m)``.

    With the chirp method the inverse is the forward transform with
    ``invert(m)``; pass ``grid=f.grid`` to land back on the original
    samples (the default output grid is centered on the origin). The
    ``b = 0`` branch and the spectral method return to the original grid
    on their own.
    """
    if _is_b_zero(m):
        return _b_zero_inverse(big_f, m, grid)
    if method == "spectral":
        if grid is not None:
            raise InvalidParameterError("the spectral method only produces its natural grid")
        return _spectral_inverse(big_f, m)
    if method != "chirp":
        raise InvalidParameterError(f"unknown method {method!r}")
    inv = invert(m)
    if grid is not None and grid.n < big_f.n:
        # natural-spacing output computed in full, then trimmed
        step = 2 * math.pi * abs(inv.b) / (big_f.n * big_f.dt)
        if math.isclose(step, grid.step, rel_tol=1e-9):
            full = _chirp_forward(big_f, inv, Grid(grid.start, step, big_f.n), 1, check)
            return SampledSignal(full.samples[: grid.n], grid.start, step)
    return _chirp_forward(big_f, inv, grid, 1, check)


def frft(f: SampledSignal, alpha: float, **kwargs) -> SampledSignal:
    """Fractional Fourier transform by angle ``alpha`` (radians).

    Angles within 1e-6 of a multiple of pi are snapped onto it and handled
    by the ``b = 0`` branch (identity or parity).
    """
    k = round(alpha / math.pi)
    if abs(alpha - k * math.pi) < 1e-6:
        sign = 1.0 if k % 2 == 0 else -1.0
        return lct_forward(f, LctMatrix(sign, 0.0, 0.0, sign), **kwargs)
    return lct_forward(f, frft_matrix(alpha), **kwargs)
