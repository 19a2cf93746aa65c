"""Monte Carlo model of the LCT-modified AWGN channel.

A block of ``N = 2 W T`` real symbols is written onto pulses spaced
``1/(2W)`` apart, transformed with an LCT, sent through an AWGN channel of
bandwidth ``w_chan`` (brick-wall filter), transformed back and sampled at the
symbol instants.

The default pulse is the periodic sinc (Dirichlet kernel) of the record:
on the circular grid used by the spectral transform it is exactly
bandlimited to ``W``, so a noiseless run returns the symbols to rounding
error instead of to sinc-truncation error.
"""

from __future__ import annotations

import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .bands import effective_lct_support, symmetric_extent
from .errors import GridError, InvalidParameterError
from .matrix import LctMatrix
from .signal import (
    Grid,
    NoiseSpec,
    SampledSignal,
    add_awgn,
    brickwall_lowpass,
    sinc_interpolate,
)
from .transform import B_ZERO_TOL, lct_forward, lct_inverse

log = logging.getLogger(__name__)

MIN_SAMPLES_PER_SYMBOL = 8


@dataclass(frozen=True, eq=False)
class CodewordBlock:
    """Symbols ``x_1..x_N`` for a block of duration ``t_block`` at bandwidth ``w``.

    ``check_power`` enforces ``sum(x**2) <= 2 W P T``; Monte Carlo blocks
    drawn with variance ``P`` meet it only on average and switch it off.
    """

    symbols: np.ndarray
    w: float
    t_block: float
    power_budget: float
    check_power: bool = True

    def __post_init__(self):
        x = np.array(self.symbols, dtype=float).reshape(-1)
        x.setflags(write=False)
        object.__setattr__(self, "symbols", x)
        for name in ("w", "t_block", "power_budget"):
            value = float(getattr(self, name))
            if not (value > 0 and math.isfinite(value)):
                raise InvalidParameterError(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)
        n = round(2 * self.w * self.t_block)
        if n < 1:
            raise InvalidParameterError("2*W*T rounds to zero symbols")
        if x.size != n:
            raise InvalidParameterError(f"block needs 2*W*T = {n} symbols, got {x.size}")
        if self.check_power:
            budget = 2 * self.w * self.power_budget * self.t_block
            if np.sum(x * x) > budget * (1 + 1e-12):
                raise InvalidParameterError(f"sum(x^2) = {np.sum(x * x):.6g} exceeds 2WPT = {budget:.6g}")

    @property
    def n(self) -> int:
        return self.symbols.size

    @property
    def instants(self) -> np.ndarray:
        """Symbol times ``m/(2W)`` for ``m = 1..N``."""
        return np.arange(1, self.n + 1) / (2 * self.w)


def codeword_grid(w: float, t_block: float, guard_factor: float = 1.0, samples_per_symbol: int = 16) -> Grid:
    """Grid over ``[-G, T + G)`` with ``G = guard_factor * T`` and the symbol instants on it."""
    if samples_per_symbol < MIN_SAMPLES_PER_SYMBOL:
        raise GridError(f"need at least {MIN_SAMPLES_PER_SYMBOL} samples per symbol interval")
    if guard_factor < 0:
        raise InvalidParameterError("guard_factor must be >= 0")
    n_sym = round(2 * w * t_block)
    n_guard = math.ceil(guard_factor * n_sym)
    dt = 1.0 / (2 * w * samples_per_symbol)
    n = (n_sym + 2 * n_guard) * samples_per_symbol
    return Grid(-n_guard * samples_per_symbol * dt, dt, n)


def _periodic_sinc_codeword(block: CodewordBlock, grid: Grid) -> np.ndarray:
    n, dt = grid.n, grid.step
    span = n * dt
    if not math.isclose(2 * block.w * span, round(2 * block.w * span), rel_tol=0, abs_tol=1e-9):
        raise GridError("periodic sinc pulses need 2*W*(record length) to be an integer")
    f = np.fft.fftfreq(n, dt)
    tol = 1e-9 * block.w
    weight = np.where(np.abs(f) < block.w - tol, 1.0, np.where(np.abs(f) <= block.w + tol, 0.5, 0.0))
    phases = np.exp(-2j * np.pi * np.outer(f, block.instants - grid.start))
    spectrum = weight * (phases @ block.symbols)
    return np.fft.ifft(spectrum).real * n / (2 * block.w * span)


Pulse = Union[str, Callable, SampledSignal]


def synthesize_codeword(block: CodewordBlock, pulse: Pulse = "periodic_sinc", grid: Optional[Grid] = None) -> SampledSignal:
    """``sum_m x_m * pulse(t - m/(2W))`` on ``grid``.

    ``pulse`` is ``"sinc"`` (``sinc(2 W t)``, truncated by the grid),
    ``"periodic_sinc"`` (its periodic version over the record), a callable
    of ``t``, or a sampled pulse centered on ``t = 0`` (interpolated).
    The default grid is :func:`codeword_grid` with guard ``T``.
    """
    if grid is None:
        grid = codeword_grid(block.w, block.t_block)
    if grid.step > 1.0 / (2 * block.w * MIN_SAMPLES_PER_SYMBOL) * (1 + 1e-12):
        raise GridError(f"grid step {grid.step:.4g} s resolves fewer than {MIN_SAMPLES_PER_SYMBOL} samples per symbol")
    if pulse is None:
        raise InvalidParameterError("a pulse must be provided")
    t = grid.points()
    if isinstance(pulse, str):
        end = grid.start + (grid.n - 1) * grid.step
        if grid.start > -block.t_block + 1e-9 or end < 2 * block.t_block - grid.step - 1e-9:
            raise GridError("grid must span [-T, 2T] so pulse tails stay inside it")
        if pulse == "sinc":
            values = np.zeros(grid.n)
            for xm, tm in zip(block.symbols, block.instants):
                values += xm * np.sinc(2 * block.w * (t - tm))
            return SampledSignal(values, grid.start, grid.step)
        if pulse == "periodic_sinc":
            return SampledSignal(_periodic_sinc_codeword(block, grid), grid.start, grid.step)
        raise InvalidParameterError(f"unknown pulse {pulse!r}")
    values = np.zeros(grid.n, dtype=complex)
    for xm, tm in zip(block.symbols, block.instants):
        if isinstance(pulse, SampledSignal):
            values += xm * sinc_interpolate(pulse, t - tm)
        else:
            values += xm * np.asarray(pulse(t - tm))
    return SampledSignal(values, grid.start, grid.step)


@dataclass(frozen=True)
class PipelineConfig:
    """Grid and algorithm choices for :func:`run_fig1_pipeline`.

    ``method="auto"`` uses the spectral transform when the matrix has
    ``a != 0`` and the chirp transform otherwise. ``normalize_power``
    scales the transmitter by ``sqrt(W / w_chan)`` so that the LCT-domain
    signal, stretched by ``W / w_chan`` in duration, still carries power
    ``P`` into the channel.
    """

    guard_factor: float = 1.0
    samples_per_symbol: int = 16
    pulse: str = "periodic_sinc"
    method: str = "auto"
    normalize_power: bool = True


def _method_for(m: LctMatrix, method: str) -> str:
    if method == "auto":
        return "spectral" if abs(m.a) > B_ZERO_TOL else "chirp"
    return method


def transmit_gain(w: float, w_chan: float, config: PipelineConfig) -> float:
    return math.sqrt(w / w_chan) if config.normalize_power else 1.0


def run_fig1_pipeline(
    block: CodewordBlock,
    m_tilde: LctMatrix,
    noise: NoiseSpec,
    w_chan: float,
    config: PipelineConfig = PipelineConfig(),
    return_signals: bool = False,
):
    """Encode, transform, add noise, filter to ``w_chan``, invert and sample.

    Returns the recovered symbols (already divided by the transmit gain),
    or ``(symbols, signals)`` with the intermediate signals by name.
    """
    grid = codeword_grid(block.w, block.t_block, config.guard_factor, config.samples_per_symbol)
    gain = transmit_gain(block.w, w_chan, config)
    s = synthesize_codeword(block, config.pulse, grid)
    s = s.with_samples(gain * s.samples)
    method = _method_for(m_tilde, config.method)
    big_s = lct_forward(s, m_tilde, method=method)
    received = brickwall_lowpass(add_awgn(big_s, noise), w_chan)
    inv_grid = None if method == "spectral" or abs(m_tilde.b) <= B_ZERO_TOL else s.grid
    r = lct_inverse(received, m_tilde, method=method, grid=inv_grid)
    idx = np.rint((block.instants - r.t0) / r.dt).astype(int)
    x_hat = r.samples[idx].real / gain
    if return_signals:
        return x_hat, {"codeword": s, "transmitted": big_s, "received": received, "recovered": r}
    return x_hat


@dataclass(frozen=True)
class SimulationResult:
    """Pooled Monte Carlo statistics.

    ``snr_est`` is the ratio of mean-square symbol to mean-square error
    over all trials and ``rate_est = (N/T) * 0.5 * log2(1 + snr_est)``;
    ``rate_stderr`` is its delta-method standard error.
    """

    mse: float
    snr_est: float
    rate_est: float
    n_trials: int
    seed: int
    rate_stderr: float
    noise_free: bool
    params: dict = field(default_factory=dict)
    trials: list = field(default_factory=list, repr=False)

    def to_dict(self, include_trials: bool = False) -> dict:
        out = asdict(self)
        if not include_trials:
            out.pop("trials")
        return {k: _json_number(v) for k, v in out.items()}

    def to_json(self, include_trials: bool = False) -> str:
        return json.dumps(self.to_dict(include_trials), sort_keys=True, allow_nan=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("trial,mse,snr_est\n")
        for k, mse, snr in self.trials:
            buf.write(f"{k},{mse:.17g},{snr:.17g}\n")
        return buf.getvalue()


def _json_number(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def estimate_achievable_rate(
    w: float,
    p: float,
    t_block: float,
    m_tilde: LctMatrix,
    eta: float,
    w_chan: float,
    n_trials: int = 200,
    seed: int = 0,
    config: PipelineConfig = PipelineConfig(),
    min_trials: int = 100,
) -> SimulationResult:
    """Run independent trials of :func:`run_fig1_pipeline` with Gaussian symbols of variance ``p``.

    Trial ``k`` draws its symbols and noise from the ``k``-th child of
    ``SeedSequence(seed)``, so results do not depend on execution order.
    """
    if n_trials < min_trials:
        raise InvalidParameterError(f"need at least {min_trials} trials, got {n_trials}")
    n_sym = round(2 * w * t_block)
    children = np.random.SeedSequence(seed).spawn(n_trials)
    sig = np.empty(n_trials)
    err = np.empty(n_trials)
    trials = []
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        x = rng.normal(0.0, math.sqrt(p), n_sym)
        noise_seed = int(rng.integers(0, 2**63 - 1))
        block = CodewordBlock(x, w, t_block, p, check_power=False)
        x_hat = run_fig1_pipeline(block, m_tilde, NoiseSpec(eta, noise_seed), w_chan, config)
        sig[k] = np.mean(x * x)
        err[k] = np.mean((x_hat - x) ** 2)
        trials.append((k, float(err[k]), float(sig[k] / err[k]) if err[k] > 0 else math.inf))
    s_bar, e_bar = sig.mean(), err.mean()
    snr = s_bar / e_bar if e_bar > 0 else math.inf
    rate_scale = n_sym / t_block * 0.5
    rate = rate_scale * math.log2(1 + snr) if math.isfinite(snr) else math.inf
    if math.isfinite(snr) and n_trials > 1:
        cov = np.cov(sig, err)
        rel_var = (cov[0, 0] / s_bar**2 + cov[1, 1] / e_bar**2 - 2 * cov[0, 1] / (s_bar * e_bar)) / n_trials
        snr_se = snr * math.sqrt(max(rel_var, 0.0))
        rate_se = rate_scale * snr_se / (math.log(2) * (1 + snr))
    else:
        rate_se = 0.0
    return SimulationResult(
        mse=float(e_bar),
        snr_est=float(snr),
        rate_est=float(rate),
        n_trials=n_trials,
        seed=seed,
        rate_stderr=float(rate_se),
        noise_free=eta == 0,
        params={
            "w": w, "p": p, "eta": eta, "t_block": t_block, "w_chan": w_chan,
            "matrix": m_tilde.to_list(), "n_symbols": n_sym,
            "pulse": config.pulse, "guard_factor": config.guard_factor,
            "samples_per_symbol": config.samples_per_symbol,
        },
        trials=trials,
    )


@dataclass(frozen=True)
class CopyReport:
    """Copy structure of the LCT spectrum of an N-pulse codeword.

    Positions and widths are in LCT-domain units ``u``.
    """

    n_expected: int
    n_detected: int
    w_m: float
    a: float
    a_bound: float
    compliant: bool
    centers: list
    peaks: list
    per_copy_bandwidth: list
    leakage: float
    leakage_per_copy: list
    occupied_band: float
    expected_band: float
    marker_error: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def cosine_lobe_pulse(m: LctMatrix, w_m: float, grid: Grid) -> SampledSignal:
    """Pulse whose ``m``-domain transform is ``cos(pi u/(2 w_m))`` on ``|u| <= w_m``.

    Built by inverting the compactly supported profile, so its LCT-domain
    support is ``w_m`` by construction.
    """
    if abs(m.b) <= B_ZERO_TOL:
        raise InvalidParameterError("cosine_lobe_pulse needs b != 0")
    n = grid.n
    du = 2 * math.pi * abs(m.b) / (n * grid.step)
    u = (np.arange(n) - n // 2) * du
    profile = np.where(np.abs(u) <= w_m, np.cos(np.pi * u / (2 * w_m)), 0.0)
    return lct_inverse(SampledSignal(profile, u[0], du), m, grid=grid)


def _shift(x: SampledSignal, steps: int) -> SampledSignal:
    out = np.zeros(x.n, dtype=complex)
    if steps >= 0:
        out[steps:] = x.samples[: x.n - steps]
    else:
        out[:steps] = x.samples[-steps:]
    return x.with_samples(out)


def spectrum_copy_analysis(
    pulse: SampledSignal,
    m: LctMatrix,
    w: float,
    t_block: float,
    support_fraction: float = 0.9999,
    markers=None,
) -> CopyReport:
    """Check that the ``m``-domain spectrum of ``sum_m x_m pulse(t - m/(2W))`` holds N separated copies.

    Pulse ``k = 0..N-1`` is delayed by ``k/(2W)``, which shifts its copy to
    ``u = a k/(2W)``. ``W_M`` is the pulse's measured LCT-domain half-width
    (``support_fraction`` of its energy); copies are disjoint when
    ``a >= 4 W W_M``. Detection looks for local maxima of ``|F|**2``
    smoothed over ``W_M/4`` that exceed 10% of the global maximum.
    Leakage is the largest fraction of a copy's energy falling outside its
    assigned band (its Voronoi cell among the copy centers, capped at
    ``+-W_M``). Markers are recovered by projecting onto each copy's
    template within its band.
    """
    n_sym = round(2 * w * t_block)
    if n_sym < 1:
        raise InvalidParameterError("2*W*T rounds to zero symbols")
    step_per_symbol = 1.0 / (2 * w * pulse.dt)
    if not math.isclose(step_per_symbol, round(step_per_symbol), rel_tol=1e-9):
        raise GridError("symbol spacing 1/(2W) must be a whole number of pulse samples")
    step_per_symbol = round(step_per_symbol)
    if markers is None:
        markers = 1.0 + 0.5 * np.arange(n_sym) / max(n_sym, 1)
    markers = np.asarray(markers, dtype=float)

    w_m = effective_lct_support(pulse, m, support_fraction).extent
    templates = [lct_forward(_shift(pulse, k * step_per_symbol), m) for k in range(n_sym)]
    u = templates[0].t
    du = templates[0].dt
    total = sum(x * tpl.samples for x, tpl in zip(markers, templates))
    power = np.abs(total) ** 2

    width = max(1, int(round(0.25 * w_m / du)))
    smooth = np.convolve(power, np.ones(width) / width, mode="same")
    interior = (smooth[1:-1] > smooth[:-2]) & (smooth[1:-1] >= smooth[2:]) & (smooth[1:-1] > 0.1 * smooth.max())
    peaks = (u[1:-1][interior]).tolist()

    centers = np.array([m.a * k / (2 * w) for k in range(n_sym)])
    leak = []
    widths = []
    estimates = []
    for k, tpl in enumerate(templates):
        lo = max(centers[k] - w_m, 0.5 * (centers[k - 1] + centers[k]) if k > 0 else -np.inf)
        hi = min(centers[k] + w_m, 0.5 * (centers[k] + centers[k + 1]) if k + 1 < n_sym else np.inf)
        band = (u >= lo) & (u <= hi)
        energy = np.abs(tpl.samples) ** 2
        leak.append(float(1.0 - energy[band].sum() / energy.sum()))
        widths.append(2 * symmetric_extent(u - centers[k], tpl.samples, support_fraction))
        estimates.append(np.vdot(tpl.samples[band], total[band]).real / energy[band].sum())
    estimates = np.array(estimates)
    occupied = symmetric_extent(u, total, support_fraction)
    a_bound = 4 * w * w_m
    return CopyReport(
        n_expected=n_sym,
        n_detected=len(peaks),
        w_m=float(w_m),
        a=m.a,
        a_bound=float(a_bound),
        compliant=bool(m.a >= a_bound),
        centers=centers.tolist(),
        peaks=peaks,
        per_copy_bandwidth=widths,
        leakage=max(leak),
        leakage_per_copy=leak,
        occupied_band=float(occupied),
        expected_band=float((2 * n_sym - 1) * w_m),
        marker_error=float(np.linalg.norm(estimates - markers) / np.linalg.norm(markers)),
    )
