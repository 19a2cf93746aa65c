import logging
import math

import numpy as np
import pytest

from lctcap.bands import effective_bandwidth, effective_lct_support
from lctcap.errors import InvalidParameterError
from lctcap.matrix import LctMatrix, cft_matrix, frft_matrix, identity
from lctcap.sampling import (
    chirped_sinc,
    composite_matrix,
    demodulate,
    min_sampling_rate,
    reconstruct_from_samples,
    sample_signal,
)
from lctcap.signal import Grid, SampledSignal, relative_l2, sinc_interpolate
from lctcap.transform import lct_inverse

from oracles import phase_aligned_error

M = LctMatrix(2.0, 1.0, 0.0, 0.5)
ALPHA = math.pi / 2
DENSE = Grid(-200.0, 0.05, 8001)


def reconstruction_error(mult, m=M, alpha=ALPHA, w_m=1.0, force=False):
    rate = mult * min_sampling_rate(w_m, m.a, m.b, alpha)
    samples = sample_signal(lambda t: chirped_sinc(t, m, w_m, alpha), rate, -400.0, 400.0)
    rec = reconstruct_from_samples(samples, m, w_m, DENSE, alpha, force=force)
    return relative_l2(rec.samples, chirped_sinc(DENSE.points(), m, w_m, alpha))


def test_min_rate_examples():
    assert min_sampling_rate(3.0, 5.0, 1.0, 0.0) == 6.0
    assert min_sampling_rate(1.0, 2.0, 7.0, math.pi / 2) == 1.0
    assert min_sampling_rate(1.0, 1.0, 1.0, math.pi / 4) == pytest.approx(math.sqrt(2), rel=1e-12)
    with pytest.raises(InvalidParameterError):
        min_sampling_rate(1.0, -1.0, 0.0, math.pi / 2)
    with pytest.raises(InvalidParameterError):
        min_sampling_rate(0.0, 1.0, 1.0, 0.0)


def test_composite_matrix():
    comp = composite_matrix(M, ALPHA)
    np.testing.assert_allclose(comp.to_list(), [-1.0, 2.0, -0.5, 0.0], atol=1e-15)
    assert comp.b == pytest.approx(2.0)
    assert composite_matrix(M, 0.0) is M
    np.testing.assert_allclose(composite_matrix(identity(), ALPHA).to_list(), frft_matrix(ALPHA).to_list(), atol=1e-15)


def test_chirped_sinc_matches_inverse_lct_of_rectangle():
    comp = composite_matrix(M, ALPHA)
    n, dt = 16384, 0.05
    du = 2 * math.pi * abs(comp.b) / (n * dt)
    u = (np.arange(n) - n // 2) * du
    rect = SampledSignal(np.where(np.abs(u) <= 2 * math.pi, 1.0, 0.0), u[0], du)
    grid = Grid(-(n // 2) * dt, dt, n)
    x = lct_inverse(rect, comp, grid=grid)
    center = np.abs(grid.points()) < 50
    ref = chirped_sinc(grid.points()[center], M, 1.0, ALPHA)
    shape = x.samples[center] / np.abs(x.samples[center]).max()
    assert phase_aligned_error(shape, ref) < 1e-2


def test_chirped_sinc_support_in_composite_domain():
    grid = Grid(-409.6, 0.05, 16384)
    x = SampledSignal(chirped_sinc(grid.points(), M, 1.0, ALPHA), grid.start, grid.step)
    report = effective_lct_support(x, composite_matrix(M, ALPHA), method="spectral")
    assert report.w_eff == pytest.approx(1.0, rel=0.05)
    # demodulated: conventional bandwidth W_M / s
    assert effective_bandwidth(demodulate(x, M, ALPHA)).w_eff == pytest.approx(0.5, rel=0.05)


def test_identity_family_reconstruction():
    grid = Grid(-50.0, 0.01, 10001)
    w = 1.0
    samples = sample_signal(lambda t: np.sinc(2 * w * t) + 0.5 * np.sinc(2 * w * (t - 3.3)), 2.2 * w, -400.0, 400.0)
    # the Fourier matrix with alpha = 0: conventional bandlimiting
    rec = reconstruct_from_samples(samples, cft_matrix(), w, grid)
    ref = np.sinc(2 * w * grid.points()) + 0.5 * np.sinc(2 * w * (grid.points() - 3.3))
    assert relative_l2(rec.samples, ref) < 1e-3
    assert np.max(np.abs(rec.samples - sinc_interpolate(samples, grid.points()))) < 1e-9


def test_identity_with_quarter_turn_is_plain_interpolation():
    samples = sample_signal(lambda t: np.sinc(t), 2.5, -200.0, 200.0)
    grid = Grid(-20.0, 0.1, 401)
    rec = reconstruct_from_samples(samples, identity(), 1.0, grid, alpha=ALPHA)
    assert np.array_equal(rec.samples, sinc_interpolate(samples, grid.points()))


def test_reconstruction_above_minimum_rate():
    errors = [reconstruction_error(mult) for mult in (1.1, 1.5, 2.0)]
    assert max(errors) < 1e-3
    # nonincreasing with rate, up to rounding-level noise
    assert errors[1] <= errors[0] * 1.01 and errors[2] <= errors[1] * 1.01


def test_undersampling_refused_then_forced(caplog):
    with pytest.raises(InvalidParameterError, match="below the minimum"):
        reconstruction_error(0.5)
    with caplog.at_level(logging.WARNING, logger="lctcap.sampling"):
        aliased = reconstruction_error(0.5, force=True)
    assert "aliased" in caplog.text
    compliant = reconstruction_error(1.1)
    assert 20 * math.log10(aliased / compliant) >= 20


def test_demodulation_is_a_pure_phase():
    x = SampledSignal(np.ones(64, dtype=complex), -3.2, 0.1)
    d = demodulate(x, M, ALPHA)
    np.testing.assert_allclose(np.abs(d.samples), 1.0)
    assert demodulate(x, LctMatrix(0.0, 1.0, -1.0, 0.0)) is x


def test_degenerate_composite_refused():
    with pytest.raises(InvalidParameterError, match="b = 0"):
        chirped_sinc(np.zeros(3), identity(), 1.0, 0.0)


def test_sample_signal_grid():
    s = sample_signal(lambda t: t, 4.0, -1.1, 1.1)
    assert s.dt == 0.25
    assert s.t[0] <= -1.1 and s.t[-1] >= 1.1
    np.testing.assert_allclose(s.samples, s.t)
    with pytest.raises(InvalidParameterError):
        sample_signal(lambda t: t, 0.0, 0.0, 1.0)
