import json
import math

import numpy as np
import pytest

from lctcap.bands import (
    SupportReport,
    effective_bandwidth,
    effective_lct_support,
    effective_support,
    lct_domain_tag,
    symmetric_extent,
)
from lctcap.errors import InvalidParameterError
from lctcap.matrix import LctMatrix, identity, theorem2_matrix
from lctcap.signal import SampledSignal
from lctcap.transform import lct_forward

from oracles import gaussian, gaussian_energy_band, windowed_sinc


def test_sinc_bandwidth():
    report = effective_bandwidth(windowed_sinc(w=1.0))
    assert 0.95 <= report.w_eff <= 1.05
    assert report.domain_tag == "frequency"


def test_gaussian_bandwidth_matches_energy_oracle():
    # exp(-t^2/2) has spectrum exp(-2 pi^2 f^2): 99% of energy within erfinv(0.99)/(2 pi)
    report = effective_bandwidth(gaussian(4096, 0.04), 0.99)
    assert report.w_eff == pytest.approx(gaussian_energy_band(0.99), rel=1e-3)
    assert report.w_eff == pytest.approx(0.2898, abs=5e-4)


def test_tone_within_one_bin():
    n, dt = 4096, 1 / 32
    t = (np.arange(n) - n // 2) * dt
    f0 = 1.0
    x = SampledSignal(np.cos(2 * math.pi * f0 * t), t[0], dt)
    report = effective_bandwidth(x, 0.99)
    assert abs(report.w_eff - f0) <= 1 / (n * dt)


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
def test_a_zero_family_scales_with_b(b):
    f = windowed_sinc(w=1.0, sigma=7.0, n=8192, dt=1 / 32)
    report = effective_lct_support(f, LctMatrix(0.0, b, -1.0 / b, 0.3))
    assert report.w_eff / b == pytest.approx(1.0, rel=0.05)
    assert report.extent == pytest.approx(2 * math.pi * report.w_eff)


@pytest.mark.parametrize("a", [0.5, 2.0, 4.0])
@pytest.mark.parametrize("shear", [0.0, 0.3])
def test_theorem2_family_scales_inversely_with_a(a, shear):
    # the output's conventional spectrum is W / |a| wide; the shear is a pure phase
    f = windowed_sinc(w=1.0, sigma=7.0, n=8192, dt=1 / 32)
    out = lct_forward(f, theorem2_matrix(a, shear), method="spectral")
    assert effective_bandwidth(out).w_eff * a == pytest.approx(1.0, rel=0.05)


def test_monotone_in_fraction():
    f = gaussian()
    widths = [effective_bandwidth(f, q).w_eff for q in np.linspace(0.5, 0.999, 40)]
    assert np.all(np.diff(widths) > 0)


def test_identity_domain_is_time_support():
    f = gaussian()
    a = effective_lct_support(f, identity(), 0.95)
    b = effective_support(f, 0.95)
    assert a.w_eff == pytest.approx(b.w_eff, rel=1e-12)
    assert b.domain_tag == "time"
    # exp(-t^2): 95% of energy within erfinv(0.95)
    assert b.w_eff == pytest.approx(1.3859, abs=2e-3)


def test_symmetric_extent_cells():
    axis = np.arange(-2, 3, dtype=float)
    values = np.array([0, 0, 1, 0, 0], dtype=float)
    # the lone sample covers [-0.5, 0.5], so 50% of it is inside 0.25
    assert symmetric_extent(axis, values, 0.5) == pytest.approx(0.25)
    with pytest.raises(InvalidParameterError):
        symmetric_extent(axis, values, 1.0)
    with pytest.raises(InvalidParameterError):
        symmetric_extent(axis, np.zeros(5), 0.5)


def test_report_json_round_trip():
    report = effective_lct_support(gaussian(), theorem2_matrix(2.0, 0.3))
    data = json.loads(report.to_json())
    assert set(data) == {"w_eff", "fraction", "domain_tag", "extent"}
    assert SupportReport(**data) == report
    assert data["domain_tag"] == lct_domain_tag(theorem2_matrix(2.0, 0.3))


def test_report_validation():
    with pytest.raises(InvalidParameterError):
        SupportReport(-1.0, 0.9, "time", 1.0)
    with pytest.raises(InvalidParameterError):
        SupportReport(1.0, 0.0, "time", 1.0)
