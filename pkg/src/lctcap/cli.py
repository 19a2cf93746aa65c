"""Command-line front end.

Usage::

    lctcap {transform,capacity,optimize,simulate,sample-demo} [--config PATH]
           [--seed N] [--out PATH] [--format csv|json] [--quiet]

Every command reads its parameters from a JSON config (see the README for
the schema of each). Outputs are byte-deterministic: CSV numbers carry 17
significant digits with LF line endings, and JSON is written with sorted
keys.

Exit status: 0 success, 2 configuration error, 3 numerical precondition
failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import capacity as cap
from .channel import PipelineConfig, estimate_achievable_rate
from .errors import ConfigError, InvalidParameterError, NumericalPreconditionError
from .matrix import matrix_from_config, theorem1_matrix, theorem2_matrix
from .sampling import chirped_sinc, composite_matrix, min_sampling_rate, reconstruct_from_samples, sample_signal
from .signal import Grid, read_signal_csv, relative_l2
from .transform import lct_forward, lct_inverse

log = logging.getLogger("lctcap")

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_RANGE = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_MATRIX = {
    "oneOf": [
        {"type": "array", "items": _NUM, "minItems": 4, "maxItems": 4},
        {"type": "object", "required": ["kind"], "properties": {"kind": {"type": "string"}}},
    ]
}

CAPACITY_VARIANTS = ["eq3", "eq4", "eq5", "eq8", "eq9", "eq11", "eq12", "eq15", "eq17", "eq21", "eq23"]
SWEEP_PARAMS = ["W", "P", "eta", "T", "B", "A", "alpha", "W_M"]
LINEAR_PARAMS = {"alpha"}

SCHEMAS = {
    "transform": {
        "type": "object",
        "required": ["input", "matrix"],
        "additionalProperties": False,
        "properties": {
            "input": {"type": "string"},
            "matrix": _MATRIX,
            "method": {"enum": ["chirp", "spectral"]},
            "inverse": {"type": "boolean"},
            "oversample": {"type": "integer", "minimum": 1},
        },
    },
    "capacity": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "variant": {"enum": CAPACITY_VARIANTS},
            "W": _POS, "P": _POS, "eta": _POS, "T": _POS,
            "B": _NUM, "A": _NUM, "alpha": _NUM, "W_M": _POS,
            "sweep": {
                "type": "object",
                "required": ["param"],
                "additionalProperties": False,
                "properties": {
                    "param": {"enum": SWEEP_PARAMS},
                    "start": _NUM,
                    "stop": _NUM,
                    "points": {"type": "integer", "minimum": 1},
                    "spacing": {"enum": ["log", "linear"]},
                    "values": {"type": "array", "items": _NUM, "minItems": 1},
                },
            },
        },
    },
    "optimize": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "target": {"enum": ["eq17_over_B", "eq23_over_params"]},
            "W": _POS, "P": _POS, "eta": _POS, "W_M": _POS,
            "B_range": _RANGE, "A_range": _RANGE, "alpha_range": _RANGE,
            "n_scan": {"type": "integer", "minimum": 2},
        },
    },
    "simulate": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "scheme": {"enum": ["theorem1", "theorem2", "general"]},
            "matrix": _MATRIX,
            "B": _NUM, "D": _NUM, "A": _NUM,
            "W": _POS, "P": _POS, "eta": {"type": "number", "minimum": 0}, "T": _POS,
            "w_chan": _POS,
            "n_trials": {"type": "integer", "minimum": 1},
            "seed": {"type": "integer", "minimum": 0},
            "guard_factor": {"type": "number", "minimum": 0},
            "grid_oversample": {"type": "integer", "minimum": 1},
            "pulse": {"enum": ["sinc", "periodic_sinc"]},
        },
    },
    "sample-demo": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "matrix": _MATRIX,
            "alpha": _NUM,
            "W_M": _POS,
            "multipliers": {"type": "array", "items": _POS, "minItems": 1},
            "dense_half_width": _POS,
            "dense_step": _POS,
            "sample_half_width": _POS,
        },
    },
}

DEFAULTS = {
    "transform": {"method": "chirp", "inverse": False, "oversample": 1},
    "capacity": {
        "variant": "eq3", "W": 1.0, "P": 1.0, "eta": 1.0, "B": 1.0, "A": 1.0, "alpha": 0.0, "W_M": 1.0,
        "sweep": {"param": "B", "start": 0.1, "stop": 10.0, "points": 51},
    },
    "optimize": {"target": "eq17_over_B", "W": 1.0, "P": 1.0, "eta": 1.0, "B_range": [0.01, 100.0], "n_scan": 64},
    "simulate": {
        "scheme": "theorem1", "D": 0.0, "A": 1.0, "W": 1.0, "P": 1.0, "eta": 0.1, "T": 8.0,
        "n_trials": 200, "seed": 0, "guard_factor": 1.0, "grid_oversample": 2, "pulse": "periodic_sinc",
    },
    "sample-demo": {
        "matrix": [2.0, 1.0, 0.0, 0.5], "alpha": math.pi / 2, "W_M": 1.0,
        "multipliers": [0.5, 1.1, 1.5, 2.0], "dense_half_width": 200.0, "dense_step": 0.05,
        "sample_half_width": 400.0,
    },
}


def validate_config(command: str, raw: dict) -> dict:
    """Check ``raw`` against the command's schema; every violation is reported."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    validator = jsonschema.Draft202012Validator(SCHEMAS[command])
    problems = []
    for err in sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path)):
        where = ".".join(str(p) for p in err.absolute_path) or "(top level)"
        problems.append(f"{where}: {err.message}")
    if problems:
        raise ConfigError(problems)
    merged = {**DEFAULTS[command], **raw}
    if command == "capacity" and "sweep" in raw:
        merged["sweep"] = {"start": 0.1, "stop": 10.0, "points": 51, **raw["sweep"]}
    return merged


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def sweep_values(sweep: dict) -> np.ndarray:
    """Swept parameter values; log spacing for scale parameters, linear for angles.

    Log-spaced points that land within 1e-12 of a power of ten are snapped
    onto it so decade rows print exactly.
    """
    if "values" in sweep:
        return np.asarray(sweep["values"], dtype=float)
    start, stop, n = float(sweep["start"]), float(sweep["stop"]), int(sweep["points"])
    spacing = sweep.get("spacing", "linear" if sweep["param"] in LINEAR_PARAMS else "log")
    if spacing == "linear":
        return np.linspace(start, stop, n)
    if start <= 0 or stop <= 0:
        raise ConfigError("sweep: log spacing needs positive start and stop")
    values = np.geomspace(start, stop, n)
    decades = np.round(np.log10(values))
    snap = np.abs(values / 10.0**decades - 1) < 1e-12
    values[snap] = 10.0 ** decades[snap]
    return values


def evaluate_variant(variant: str, params: dict) -> cap.CapacityReport:
    w, p, eta = params["W"], params["P"], params["eta"]
    if variant == "eq23":
        return cap.lct_domain_capacity(params["W_M"], p, eta, params["A"], params["B"], params["alpha"])
    if variant == "eq21":
        return cap.CapacityReport(cap.shannon_limit("infinite_bandwidth", p=p, eta=eta), "eq21", {"p": p, "eta": eta})
    ch = cap.ChannelSpec(w, p, eta, t_block=params.get("T"))
    if variant == "eq4":
        return cap.classic_capacity(ch)
    if variant == "eq5":
        return cap.per_transmission_capacity(ch)
    if variant in ("eq3", "eq8"):
        return cap.theorem1_capacity(ch, params["B"], form=variant)
    if variant in ("eq9", "eq11"):
        return cap.theorem2_capacity(ch, params["A"], form=variant)
    if variant in ("eq12", "eq15"):
        return cap.theorem3_capacity(ch, form=variant)
    if variant == "eq17":
        return cap.bandwidth_scaled_capacity(ch, params["B"])
    raise ConfigError(f"variant: unknown formula {variant!r}")


def cmd_capacity(cfg: dict, fmt: str) -> str:
    sweep = cfg["sweep"]
    name = sweep["param"]
    if cfg["variant"] in ("eq12", "eq15") and "T" not in cfg and name != "T":
        raise ConfigError("T: required for the copy-count formulas")
    rows = []
    for value in sweep_values(sweep):
        params = {**cfg, name: float(value)}
        report = evaluate_variant(cfg["variant"], params)
        rows.append((name, float(value), report.bits_per_second, report.variant))
    if fmt == "json":
        return _dump_json(
            [{"param": r[0], "value": r[1], "bits_per_second": r[2], "variant": r[3]} for r in rows]
        )
    lines = ["param,value,bits_per_second,variant"]
    lines += [f"{r[0]},{_fmt(r[1])},{_fmt(r[2])},{r[3]}" for r in rows]
    return "\n".join(lines) + "\n"


def _flatten(prefix: str, value, out: list):
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else key, value[key], out)
    elif isinstance(value, (list, tuple)):
        for i, item in enumerate(value):
            _flatten(f"{prefix}.{i}", item, out)
    elif isinstance(value, float):
        out.append((prefix, _fmt(value)))
    else:
        out.append((prefix, str(value)))


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _as_csv_fields(obj: dict) -> str:
    rows = []
    _flatten("", obj, rows)
    return "field,value\n" + "".join(f"{k},{v}\n" for k, v in rows)


def cmd_optimize(cfg: dict, fmt: str) -> str:
    if cfg["target"] == "eq17_over_B":
        report = cap.optimize_capacity(
            "eq17_over_B", p=cfg["P"], eta=cfg["eta"], w=cfg["W"], b_range=cfg["B_range"], n_scan=cfg["n_scan"]
        )
    else:
        missing = [k for k in ("W_M", "A_range", "B_range", "alpha_range") if k not in cfg]
        if missing:
            raise ConfigError([f"{k}: required for eq23_over_params" for k in missing])
        report = cap.optimize_capacity(
            "eq23_over_params", p=cfg["P"], eta=cfg["eta"], w_m=cfg["W_M"], a_range=cfg["A_range"],
            b_range=cfg["B_range"], alpha_range=cfg["alpha_range"], n_scan=cfg["n_scan"],
        )
    out = report.to_dict()
    out["limit"] = cap.shannon_limit("infinite_bandwidth", p=cfg["P"], eta=cfg["eta"])
    return _dump_json(out) if fmt == "json" else _as_csv_fields(out)


def simulation_matrix(cfg: dict):
    """Matrix and default channel bandwidth for a simulate config.

    ``theorem1`` uses ``B`` (default 1) and ``D``; ``theorem2`` uses ``A`` and
    the shear ``B`` (default 0). An explicit ``matrix`` overrides both.
    """
    scheme = cfg["scheme"]
    if scheme == "theorem1":
        b = cfg.get("B", 1.0)
        m = theorem1_matrix(b, cfg["D"])
        w_default = cfg["W"] * abs(b)
    elif scheme == "theorem2":
        m = theorem2_matrix(cfg["A"], cfg.get("B", 0.0))
        w_default = cfg["W"] / abs(cfg["A"])
    else:
        if "matrix" not in cfg:
            raise ConfigError("matrix: required for scheme 'general'")
        w_default = None
    if "matrix" in cfg:
        m = matrix_from_config(cfg["matrix"])
    w_chan = cfg.get("w_chan", w_default)
    if w_chan is None:
        raise ConfigError("w_chan: required for scheme 'general'")
    return m, w_chan


def cmd_simulate(cfg: dict, fmt: str):
    m, w_chan = simulation_matrix(cfg)
    config = PipelineConfig(
        guard_factor=cfg["guard_factor"], samples_per_symbol=8 * cfg["grid_oversample"], pulse=cfg["pulse"]
    )
    result = estimate_achievable_rate(
        cfg["W"], cfg["P"], cfg["T"], m, cfg["eta"], w_chan, cfg["n_trials"], cfg["seed"], config
    )
    summary = _dump_json(result.to_dict())
    trials = result.to_csv()
    log.info("rate_est = %.6g bits/s (snr_est = %.6g, %d trials)", result.rate_est, result.snr_est, result.n_trials)
    if fmt == "json":
        return summary, (".trials.csv", trials)
    return trials, (".summary.json", summary)


def cmd_transform(cfg: dict, fmt: str, base: Path) -> str:
    src = Path(cfg["input"])
    if not src.is_absolute():
        src = base / src
    x, _ = read_signal_csv(src)
    m = matrix_from_config(cfg["matrix"])
    if cfg["inverse"]:
        y = lct_inverse(x, m, method=cfg["method"])
    else:
        y = lct_forward(x, m, method=cfg["method"], oversample=cfg["oversample"])
    if fmt == "json":
        return _dump_json({
            "t0": y.t0, "dt": y.dt, "n": y.n,
            "re": [float(v) for v in y.samples.real], "im": [float(v) for v in y.samples.imag],
        })
    buf = io.StringIO()
    buf.write("t,re,im\n")
    for tk, v in zip(y.t, y.samples):
        buf.write(f"{_fmt(tk)},{_fmt(v.real)},{_fmt(v.imag)}\n")
    return buf.getvalue()


def cmd_sample_demo(cfg: dict, fmt: str) -> str:
    m = matrix_from_config(cfg["matrix"])
    alpha, w_m = cfg["alpha"], cfg["W_M"]
    comp = composite_matrix(m, alpha)
    base_rate = min_sampling_rate(w_m, m.a, m.b, alpha)
    half = cfg["dense_half_width"]
    n_dense = int(round(2 * half / cfg["dense_step"])) + 1
    dense = Grid(-half, cfg["dense_step"], n_dense)
    reference = chirped_sinc(dense.points(), m, w_m, alpha)
    rows = []
    for mult in cfg["multipliers"]:
        samples = sample_signal(lambda t: chirped_sinc(t, m, w_m, alpha), mult * base_rate,
                                -cfg["sample_half_width"], cfg["sample_half_width"])
        rec = reconstruct_from_samples(samples, m, w_m, dense, alpha, force=True)
        rows.append((float(mult), relative_l2(rec.samples, reference)))
    log.info("composite matrix %s, minimum rate %.6g/s", comp.to_list(), base_rate)
    if fmt == "json":
        return _dump_json([{"rate_multiplier": a, "reconstruction_error": e} for a, e in rows])
    return "rate_multiplier,reconstruction_error\n" + "".join(f"{_fmt(a)},{_fmt(e)}\n" for a, e in rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lctcap", description="LCT channel-capacity toolkit")
    parser.add_argument("command", choices=sorted(SCHEMAS))
    parser.add_argument("--config", type=Path, help="JSON parameter file")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", type=Path, help="output file (default: stdout)")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    parser.add_argument("--quiet", action="store_true", help="only report errors")
    return parser


def _load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def _write(path: Path | None, text: str):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def run_command(command: str, cfg_raw: dict, fmt: str = "csv", out: Path | None = None,
                seed: int | None = None, base: Path = Path(".")) -> None:
    """Validate ``cfg_raw`` and run ``command``, writing to ``out`` (stdout if None)."""
    if seed is not None:
        if command != "simulate":
            log.info("--seed has no effect on %s (the command draws no random numbers)", command)
        else:
            cfg_raw = {**cfg_raw, "seed": seed}
    cfg = validate_config(command, cfg_raw)
    if command == "capacity":
        _write(out, cmd_capacity(cfg, fmt))
    elif command == "optimize":
        _write(out, cmd_optimize(cfg, fmt))
    elif command == "transform":
        _write(out, cmd_transform(cfg, fmt, base))
    elif command == "sample-demo":
        _write(out, cmd_sample_demo(cfg, fmt))
    elif command == "simulate":
        main_text, (suffix, side_text) = cmd_simulate(cfg, fmt)
        _write(out, main_text)
        if out is not None:
            _write(out.with_suffix(suffix), side_text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO, format="lctcap: %(message)s")
    try:
        raw = _load_config(args.config)
        base = args.config.parent if args.config else Path(".")
        run_command(args.command, raw, args.format, args.out, args.seed, base)
    except (ConfigError, InvalidParameterError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except NumericalPreconditionError as exc:
        log.error("numerical precondition failed: %s", exc)
        return EXIT_NUMERICAL
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
