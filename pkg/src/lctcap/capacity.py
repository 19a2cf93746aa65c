"""Closed-form AWGN capacities for LCT-based signaling, limits and optimizers.

All capacities reduce to the Shannon-Hartley form ``w * log2(1 + P/(eta*w))``
for some effective bandwidth ``w``, so they share :func:`_log_term` and stay
bit-for-bit equal wherever the algebra says they should.

Variant identifiers
-------------------
``eq4``   classic ``W log2(1 + P/(eta W))``
``eq5``   per transmission, ``0.5 log2(1 + P/(eta W))`` (bits/transmission)
``eq3``   channel bandlimited to ``W`` with an ``A = 0`` LCT: ``(W/B) log2(1 + P/(eta W))``
``eq8``   the same scheme seen as a channel of bandwidth ``W B``: ``W log2(1 + P/(eta W B))``
``eq9``   ``[A, B; 0, 1/A]`` scheme, channel bandlimited to ``W``: ``A W log2(1 + P/(eta W))``
``eq11``  the same scheme as a channel of bandwidth ``W/A``: ``W log2(1 + A P/(eta W))``
``eq12``  N-copy scheme: ``W log2(1 + P (4 W T - 1)/(eta W))``
``eq15``  the same through the copy width: ``W log2(1 + P/(eta W_M))``, ``W_M = W/(4 W T - 1)``
``eq17``  bandwidth ``W B`` used in full: ``W B log2(1 + P/(eta W B))``
``eq21``  infinite-bandwidth limit ``P/(eta ln 2)``
``eq23``  LCT-bandlimited signaling: ``(W_M/s) log2(1 + P s/(eta W_M))``,
          ``s = A sin(alpha) + B cos(alpha)``

The constant written 1.44 in the classical limit is ``log2(e) = 1/ln 2``
here; 1.44 is its two-decimal rounding.

Negative ``B`` (or ``A``) give the same occupied bandwidth as their
magnitude, so the formulas use ``|B|`` and ``|A|``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import bisect

from .errors import InvalidParameterError, NumericalPreconditionError

LOG2E = 1.0 / math.log(2.0)


def _positive(name, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise InvalidParameterError(f"{name} must be a positive finite number, got {value}")
    return value


@dataclass(frozen=True)
class ChannelSpec:
    """AWGN channel: bandwidth ``w`` (Hz), power ``p`` (W), noise scale ``eta`` (W/Hz).

    ``t_block`` (s) and the source rate ``r_b`` (bits/s) are optional; they
    fix ``n_symbols = 2 w t_block`` and the message count ``2**(r_b t_block)``.
    """

    w: float
    p: float
    eta: float
    t_block: Optional[float] = None
    r_b: Optional[float] = None

    def __post_init__(self):
        for name in ("w", "p", "eta"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))
        if self.t_block is not None:
            object.__setattr__(self, "t_block", _positive("t_block", self.t_block))
            if 2 * self.w * self.t_block < 1:
                raise InvalidParameterError(f"2*w*t_block = {2 * self.w * self.t_block:.6g} < 1 symbol")
        if self.r_b is not None:
            object.__setattr__(self, "r_b", _positive("r_b", self.r_b))

    @property
    def snr(self) -> float:
        return self.p / (self.eta * self.w)

    @property
    def n_symbols(self) -> Optional[float]:
        return None if self.t_block is None else 2 * self.w * self.t_block

    @property
    def k_messages(self) -> Optional[float]:
        if self.t_block is None or self.r_b is None:
            return None
        try:
            return math.pow(2.0, self.r_b * self.t_block)
        except OverflowError:
            return math.inf

    def to_dict(self) -> dict:
        return {"w": self.w, "p": self.p, "eta": self.eta, "t_block": self.t_block, "r_b": self.r_b}


@dataclass(frozen=True)
class CapacityReport:
    bits_per_second: float
    variant: str
    params: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        value = self.bits_per_second
        # custom solver objectives may be negative; capacities may not
        if not (math.isfinite(value) and (value >= 0 or self.variant in ("custom", "monotone-custom"))):
            raise NumericalPreconditionError(f"capacity evaluated to {value!r} for variant {self.variant}")

    def to_dict(self) -> dict:
        return {
            "bits_per_second": self.bits_per_second,
            "variant": self.variant,
            "params": dict(self.params),
            "diagnostics": dict(self.diagnostics),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


_LN2 = math.log(2.0)


def _log_term(p: float, eta: float, w: float) -> float:
    # log1p keeps full precision at the tiny SNRs of the wideband limit
    return math.log1p(p / (eta * w)) / _LN2


def shannon_hartley(w: float, p: float, eta: float) -> float:
    """``w log2(1 + p/(eta w))``: capacity of a bandwidth-``w`` AWGN channel."""
    return w * _log_term(p, eta, w)


def classic_capacity(ch: ChannelSpec) -> CapacityReport:
    per_tx = 0.5 * _log_term(ch.p, ch.eta, ch.w)
    return CapacityReport(
        ch.w * _log_term(ch.p, ch.eta, ch.w),
        "eq4",
        {"w": ch.w},
        {"per_transmission": per_tx, "transmissions_per_second": 2 * ch.w},
    )


def per_transmission_capacity(ch: ChannelSpec) -> CapacityReport:
    """Bits per transmission (the ``bits_per_second`` field holds bits/transmission)."""
    return CapacityReport(0.5 * _log_term(ch.p, ch.eta, ch.w), "eq5", {"w": ch.w}, {"units": "bits/transmission"})


def _nonzero(name, value):
    value = float(value)
    if value == 0 or not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite and nonzero, got {value}")
    return value


def theorem1_capacity(ch: ChannelSpec, b: float, form: str = "eq3") -> CapacityReport:
    """Capacity with an ``A = 0`` LCT of parameter ``b``.

    ``form="eq3"`` gives ``(W/B) log2(1 + P/(eta W))`` for a channel
    bandlimited to ``W``; ``form="eq8"`` gives ``W log2(1 + P/(eta W B))``
    for the channel of bandwidth ``W B``. The other form is in diagnostics.
    """
    b = abs(_nonzero("b", b))
    eq3 = (ch.w / b) * _log_term(ch.p, ch.eta, ch.w)
    eq8 = ch.w * _log_term(ch.p, ch.eta, ch.w * b)
    values = {"eq3": eq3, "eq8": eq8}
    if form not in values:
        raise InvalidParameterError(f"form must be eq3 or eq8, got {form!r}")
    other = "eq8" if form == "eq3" else "eq3"
    return CapacityReport(
        values[form], form, {"b": b}, {other: values[other], "channel_bandwidth": ch.w * b}
    )


def theorem2_capacity(ch: ChannelSpec, a: float, form: str = "eq9") -> CapacityReport:
    """Capacity with a ``[A, B; 0, 1/A]`` LCT.

    ``form="eq9"``: ``A W log2(1 + P/(eta W))``; ``form="eq11"``:
    ``W log2(1 + A P/(eta W))`` for the channel of bandwidth ``W/A``.
    """
    a = abs(_nonzero("a", a))
    eq9 = a * ch.w * _log_term(ch.p, ch.eta, ch.w)
    eq11 = ch.w * _log_term(a * ch.p, ch.eta, ch.w)
    values = {"eq9": eq9, "eq11": eq11}
    if form not in values:
        raise InvalidParameterError(f"form must be eq9 or eq11, got {form!r}")
    other = "eq11" if form == "eq9" else "eq9"
    return CapacityReport(
        values[form], form, {"a": a}, {other: values[other], "channel_bandwidth": ch.w / a}
    )


def bandwidth_scaled_capacity(ch: ChannelSpec, b: float) -> CapacityReport:
    """``W B log2(1 + P/(eta W B))``: the full bandwidth ``W_M = W B`` in use."""
    b = abs(_nonzero("b", b))
    w_m = ch.w * b
    return CapacityReport(w_m * _log_term(ch.p, ch.eta, w_m), "eq17", {"b": b}, {"w_m": w_m})


def theorem3_capacity(ch: ChannelSpec, form: str = "eq12", rtol: float = 1e-12) -> CapacityReport:
    """N-copy scheme with ``N = 2 W T`` symbols per block.

    Both ``W log2(1 + P (4WT - 1)/(eta W))`` and the copy-width form
    ``W log2(1 + P/(eta W_M))`` are evaluated and must agree to ``rtol``.
    """
    if ch.t_block is None:
        raise InvalidParameterError("theorem3_capacity needs t_block")
    factor = 4 * ch.w * ch.t_block - 1
    if factor <= 0:
        raise InvalidParameterError(f"4*W*T - 1 = {factor:.6g} must be positive")
    w_m = ch.w / factor
    eq12 = ch.w * math.log1p(ch.p * factor / (ch.eta * ch.w)) / _LN2
    eq15 = ch.w * _log_term(ch.p, ch.eta, w_m)
    if abs(eq12 - eq15) > rtol * max(abs(eq12), abs(eq15)):
        raise NumericalPreconditionError(f"copy-count and copy-width forms disagree: {eq12!r} vs {eq15!r}")
    values = {"eq12": eq12, "eq15": eq15}
    if form not in values:
        raise InvalidParameterError(f"form must be eq12 or eq15, got {form!r}")
    return CapacityReport(
        values[form],
        form,
        {"t_block": ch.t_block},
        {"eq12": eq12, "eq15": eq15, "w_m": w_m, "n_symbols": 2 * ch.w * ch.t_block},
    )


def lct_rate_factor(a: float, b: float, alpha: float) -> float:
    """``s = a sin(alpha) + b cos(alpha)``, the rate scaling of LCT-domain sampling."""
    sa, ca = math.sin(alpha), math.cos(alpha)
    # exact zeros at multiples of pi/2 keep a*sin + b*cos independent of the idle entry
    sa = 0.0 if abs(sa) < 1e-15 else sa
    ca = 0.0 if abs(ca) < 1e-15 else ca
    return a * sa + b * ca


def _lct_domain_value(w_m: float, p: float, eta: float, s: float) -> float:
    return shannon_hartley(w_m / s, p, eta)


def lct_domain_capacity(w_m: float, p: float, eta: float, a: float, b: float, alpha: float) -> CapacityReport:
    """``(W_M/s) log2(1 + P s/(eta W_M))`` for a signal with LCT-domain support ``W_M``.

    The value equals the classic capacity of a channel of bandwidth
    ``W_M/s`` and depends on ``(a, b, alpha)`` only through ``s``.
    """
    w_m = _positive("w_m", w_m)
    p = _positive("p", p)
    eta = _positive("eta", eta)
    s = lct_rate_factor(a, b, alpha)
    if not s > 0:
        raise InvalidParameterError(f"a*sin(alpha) + b*cos(alpha) = {s:.6g} must be positive")
    return CapacityReport(
        _lct_domain_value(w_m, p, eta, s),
        "eq23",
        {"w_m": w_m, "a": a, "b": b, "alpha": alpha},
        {"s": s, "u_s": 2 * w_m / s, "channel_bandwidth": w_m / s},
    )


def shannon_limit(kind: str, *, b: float = None, a: float = None, p: float = None, eta: float = None) -> float:
    """Wideband limits.

    ``theorem1`` (``b``): minimum ``E_b/eta`` equal to ``ln 2/|b|``;
    ``theorem2`` (``a``): ``|a| ln 2``;
    ``infinite_bandwidth`` (``p``, ``eta``): capacity ``P/(eta ln 2)`` bits/s.
    """
    if kind == "theorem1":
        if b is None:
            raise InvalidParameterError("theorem1 limit needs b")
        return math.log(2.0) / abs(_nonzero("b", b))
    if kind == "theorem2":
        if a is None:
            raise InvalidParameterError("theorem2 limit needs a")
        return abs(_nonzero("a", a)) * math.log(2.0)
    if kind == "infinite_bandwidth":
        if p is None or eta is None:
            raise InvalidParameterError("infinite_bandwidth limit needs p and eta")
        return _positive("p", p) * LOG2E / _positive("eta", eta)
    raise InvalidParameterError(f"unknown limit kind {kind!r}")


def stationarity_residual(x):
    """``g(x) = ln(1 + x) - x/(1 + x)``.

    With ``x = P/(eta w)``, ``d/dw [w log2(1 + x)] = g(x)/ln 2``, so a root of
    ``g`` marks a stationary point of the capacity in the bandwidth.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= -1):
        raise InvalidParameterError("stationarity residual needs x > -1")
    out = np.log1p(arr) - arr / (1.0 + arr)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class StationaryResult:
    root: Optional[float]
    sign_changes: int
    residual_sign: int
    scan: np.ndarray = field(repr=False)


def find_stationary_point(
    residual: Callable[[float], float],
    lo: float,
    hi: float,
    n_scan: int = 64,
    xtol: float = 1e-12,
    log_scan: Optional[bool] = None,
) -> StationaryResult:
    """Scan ``residual`` on ``n_scan`` points, then bisect the first sign change.

    The grid is log-spaced when ``lo > 0`` (unless ``log_scan`` says
    otherwise). Without a sign change ``root`` is None and
    ``residual_sign`` gives the common sign of the scan (0 if all zero).
    """
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise InvalidParameterError(f"invalid search range [{lo}, {hi}]")
    if log_scan is None:
        log_scan = lo > 0
    grid = np.geomspace(lo, hi, n_scan) if log_scan else np.linspace(lo, hi, n_scan)
    values = np.array([residual(float(x)) for x in grid])
    if not np.all(np.isfinite(values)):
        raise NumericalPreconditionError("stationarity residual is not finite on the scan grid")
    signs = np.sign(values)
    exact = np.nonzero(signs == 0)[0]
    changes = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    n_changes = changes.size + exact.size
    root = None
    if exact.size and (not changes.size or exact[0] <= changes[0]):
        root = float(grid[exact[0]])
    elif changes.size:
        k = changes[0]
        root = float(bisect(residual, grid[k], grid[k + 1], xtol=xtol, maxiter=400))
    nonzero = signs[signs != 0]
    common = int(nonzero[0]) if nonzero.size and np.all(nonzero == nonzero[0]) else 0
    return StationaryResult(root, int(n_changes), common, grid)


def _optimize_bandwidth(
    p: float,
    eta: float,
    w_lo: float,
    w_hi: float,
    to_params: Callable[[float], dict],
    variant: str,
    n_scan: int,
) -> CapacityReport:
    """Maximize ``shannon_hartley(w)`` over effective channel bandwidths ``[w_lo, w_hi]``."""
    limit = p * LOG2E / eta
    base = {"supremum_eq21": limit, "scan_points": n_scan}
    if w_lo == w_hi:
        return CapacityReport(
            shannon_hartley(w_lo, p, eta), variant, to_params(w_lo), {**base, "status": "degenerate-range"}
        )
    result = find_stationary_point(lambda w: stationarity_residual(p / (eta * w)), w_lo, w_hi, n_scan)
    if result.root is not None:
        w = result.root
        closed = LOG2E * w * p / (p + eta * w)
        return CapacityReport(
            shannon_hartley(w, p, eta),
            variant,
            to_params(w),
            {**base, "status": "interior", "stationary_form_value": closed, "sign_changes": result.sign_changes},
        )
    # capacity grows with bandwidth wherever g > 0, so the edge is the answer
    w = w_hi if result.residual_sign >= 0 else w_lo
    closed = LOG2E * w * p / (p + eta * w)
    return CapacityReport(
        shannon_hartley(w, p, eta),
        "monotone",
        to_params(w),
        {
            **base,
            "status": "no sign change",
            "direction": "increasing" if result.residual_sign >= 0 else "decreasing",
            "boundary": "upper" if w == w_hi else "lower",
            "stationary_form_value": closed,
            "objective": variant,
        },
    )


def _rate_factor_range(a_range, b_range, alpha_range) -> tuple[float, float, dict, dict]:
    """Extremes of ``a sin(alpha) + b cos(alpha)`` over a parameter box."""
    a_lo, a_hi = a_range
    b_lo, b_hi = b_range
    al_lo, al_hi = alpha_range
    candidates = []
    for a in (a_lo, a_hi):
        for b in (b_lo, b_hi):
            alphas = [al_lo, al_hi]
            # interior extremes of a sin + b cos sit where tan(alpha) = a/b
            base = math.atan2(a, b)
            k_lo = math.ceil((al_lo - base) / math.pi)
            k_hi = math.floor((al_hi - base) / math.pi)
            alphas += [base + k * math.pi for k in range(k_lo, k_hi + 1)]
            for alpha in alphas:
                candidates.append((lct_rate_factor(a, b, alpha), {"a": a, "b": b, "alpha": alpha}))
    s_min, arg_min = min(candidates, key=lambda item: item[0])
    s_max, arg_max = max(candidates, key=lambda item: item[0])
    return s_min, s_max, arg_min, arg_max


def _check_range(name, rng, positive=False):
    try:
        lo, hi = (float(v) for v in rng)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"{name} must be a [lo, hi] pair") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
        raise InvalidParameterError(f"{name} = [{lo}, {hi}] is not a valid range")
    if positive and lo <= 0:
        raise InvalidParameterError(f"{name} must be positive")
    return lo, hi


def optimize_capacity(
    target: str,
    *,
    p: float = None,
    eta: float = None,
    w: float = None,
    w_m: float = None,
    b_range=None,
    a_range=None,
    alpha_range=None,
    param_range=None,
    objective: Callable[[float], float] = None,
    residual: Callable[[float], float] = None,
    n_scan: int = 64,
) -> CapacityReport:
    """Maximize a capacity expression over its LCT parameters.

    ``target`` is one of

    ``eq17_over_B``
        ``W B log2(1 + P/(eta W B))`` for ``B`` in ``b_range`` (needs ``w``).
    ``eq23_over_params``
        ``(W_M/s) log2(1 + P s/(eta W_M))`` over the box ``a_range`` x
        ``b_range`` x ``alpha_range`` (needs ``w_m``).
    ``custom``
        any ``objective`` with derivative-sign function ``residual`` over
        ``param_range``; used to self-test the solver.

    A stationary point is reported only when the residual changes sign on
    the scan; otherwise the variant is ``monotone`` and the range edge in
    the increasing direction is returned.
    """
    if target == "custom":
        if objective is None or residual is None or param_range is None:
            raise InvalidParameterError("custom target needs objective, residual and param_range")
        lo, hi = _check_range("param_range", param_range)
        if lo == hi:
            return CapacityReport(objective(lo), "custom", {"x": lo}, {"status": "degenerate-range"})
        result = find_stationary_point(residual, lo, hi, n_scan)
        if result.root is not None:
            return CapacityReport(
                objective(result.root), "custom", {"x": result.root},
                {"status": "interior", "sign_changes": result.sign_changes},
            )
        x = hi if result.residual_sign >= 0 else lo
        return CapacityReport(objective(x), "monotone-custom", {"x": x}, {"status": "no sign change"})

    p = _positive("p", p)
    eta = _positive("eta", eta)
    if target == "eq17_over_B":
        w = _positive("w", w)
        lo, hi = _check_range("b_range", b_range, positive=True)
        report = _optimize_bandwidth(p, eta, w * lo, w * hi, lambda wc: {"b": wc / w, "w_m": wc}, "eq17", n_scan)
        if report.variant == "monotone":
            direction = report.diagnostics["direction"]
            report.diagnostics["note"] = f"monotone in B ({direction})"
        return report
    if target == "eq23_over_params":
        w_m = _positive("w_m", w_m)
        a_rng = _check_range("a_range", a_range)
        b_rng = _check_range("b_range", b_range)
        al_rng = _check_range("alpha_range", alpha_range)
        s_min, s_max, arg_min, arg_max = _rate_factor_range(a_rng, b_rng, al_rng)
        if not s_max > 0:
            raise InvalidParameterError("a*sin(alpha) + b*cos(alpha) is never positive on the parameter box")
        if not s_min > 0:
            # s reaches 0: bandwidth W_M/s is unbounded and only the limit remains
            limit = p * LOG2E / eta
            return CapacityReport(
                limit,
                "monotone",
                {"w_m": w_m, **arg_min, "s": s_min},
                {
                    "status": "supremum not attained",
                    "note": "s = a*sin(alpha) + b*cos(alpha) reaches 0 on the box; capacity tends to P/(eta ln 2)",
                    "supremum_eq21": limit,
                    "s_range": [s_min, s_max],
                },
            )

        def to_params(wc):
            s = w_m / wc
            arg = arg_min if math.isclose(s, s_min) else arg_max if math.isclose(s, s_max) else {}
            return {"w_m": w_m, **arg, "s": s}

        report = _optimize_bandwidth(p, eta, w_m / s_max, w_m / s_min, to_params, "eq23", n_scan)
        report.diagnostics["s_range"] = [s_min, s_max]
        if report.variant == "monotone":
            report.diagnostics["note"] = "monotone in s (capacity falls as s grows)"
        return report
    raise InvalidParameterError(f"unknown optimization target {target!r}")
