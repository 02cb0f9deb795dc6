"""Command-line front end: every module as a subcommand with seeded reports.

Usage
-----
    sdl <bounds|constants|simulate|estimate|verify|report> [--config file.json] [flags]

Configuration is a JSON object plus flag overrides; flags win, unknown
config keys are rejected. The seed is resolved as: ``--seed`` flag, then
the ``SDL_SEED`` environment variable, then the config file, then the
built-in default. The fully resolved configuration is echoed into every
report, so a report regenerates bit-identically from its own record.

Outputs on stdout are stable: canonical JSON (sorted keys, shortest float
repr) or plain CSV, with no timestamps. Wall-clock time appears only in
the ``--report`` JSONL file, outside the record's stable core.

Exit codes: 0 success, 2 invalid configuration or malformed input file,
3 numerical failure (quadrature/root bracketing), 4 statistical FAIL.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
import time

import numpy as np

from .bounds import BoundQuery, bound_at
from .constants import beta_time_integral, c_alpha_K, c_alpha_unit
from .empirical import ecdf, holder_modulus
from .errors import (
    BracketFailure,
    FormatError,
    InvalidConfig,
    QuadratureFailure,
    SdlError,
)
from .normal import phi_holder_constant
from .reports import append_record, canonical_json, load_records, make_record
from .sim import batch_to_bytes, make_control, read_samples, simulate, write_csv, write_sdl1
from .sim.io import MAGIC
from . import verify as _verify

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_STAT = 4

DEFAULT_SEED = 1729

# kind codes: f float, i int, b bool, s string; None defaults stay None
# unless noted in the runner.
_SCHEMAS = {
    "bounds": {
        "t": ("f", 1.0),
        "c": ("f", 1.0),
        "x_grid": ("s", "-3:3:0.1"),
        "literal_subscript": ("b", False),
        "out": ("s", None),
    },
    "constants": {
        "t": ("f", 1.0),
        "k": ("f", 1.0),
        "alpha": ("f", 0.5),
        "literal_subscript": ("b", False),
    },
    "simulate": {
        "control": ("s", "constant:-1"),
        "x0": ("f", 0.0),
        "t": ("f", 1.0),
        "n_steps": ("i", 1024),
        "n_paths": ("i", 1000),
        "seed": ("i", DEFAULT_SEED),
        "threads": ("i", None),
        "chunk_size": ("i", None),
        "out": ("s", None),
    },
    "estimate": {
        "input": ("s", None),
        "alpha": ("f", 0.5),
        "delta": ("f", 0.01),
        "stat_budget": ("f", None),
        "t": ("f", None),
    },
    "verify": {
        "n_paths": ("i", 1_000_000),
        "n_steps": ("i", 1024),
        "seed": ("i", DEFAULT_SEED),
        "t": ("f", 1.0),
        "alpha": ("f", 0.5),
        "threads": ("i", None),
        "chunk_size": ("i", None),
    },
    "report": {
        "file": ("s", None),
        "index": ("i", None),
        "regenerate": ("b", False),
    },
}


def _coerce(kind: str, value, name: str):
    if value is None:
        return None
    if kind == "b":
        if isinstance(value, bool):
            return value
        raise InvalidConfig(f"{name} must be a boolean, got {value!r}")
    if kind == "i":
        if isinstance(value, bool) or not isinstance(value, int):
            raise InvalidConfig(f"{name} must be an integer, got {value!r}")
        return value
    if kind == "f":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidConfig(f"{name} must be a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            raise InvalidConfig(f"{name} must be finite, got {value!r}")
        return value
    if not isinstance(value, str):
        raise InvalidConfig(f"{name} must be a string, got {value!r}")
    return value


def _load_config_file(path) -> dict:
    import json

    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InvalidConfig(f"cannot read config file {path}: {exc}") from exc
    except ValueError as exc:
        raise InvalidConfig(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise InvalidConfig(f"config file {path} must hold a JSON object")
    return obj


def resolve_config(command: str, flags: dict, config_path=None) -> dict:
    """Merge defaults < config file < environment seed < explicit flags."""
    schema = _SCHEMAS[command]
    resolved = {key: default for key, (_, default) in schema.items()}
    if config_path is not None:
        file_cfg = _load_config_file(config_path)
        for key, value in file_cfg.items():
            if key not in schema:
                raise InvalidConfig(
                    f"unknown config key {key!r} for command {command!r}; "
                    f"known keys: {sorted(schema)}"
                )
            resolved[key] = _coerce(schema[key][0], value, key)
    if "seed" in schema:
        env_seed = os.environ.get("SDL_SEED")
        if env_seed is not None:
            try:
                resolved["seed"] = int(env_seed)
            except ValueError as exc:
                raise InvalidConfig(f"SDL_SEED must be an integer, got {env_seed!r}") from exc
    for key, value in flags.items():
        if value is None:
            continue
        if key not in schema:
            raise InvalidConfig(f"unknown flag {key!r} for command {command!r}")
        resolved[key] = _coerce(schema[key][0], value, key)
    return resolved


def _parse_grid(text: str) -> np.ndarray:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise InvalidConfig(f"x-grid must be lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError as exc:
        raise InvalidConfig(f"x-grid must be numeric lo:hi:step, got {text!r}") from exc
    if not (math.isfinite(lo) and math.isfinite(hi) and math.isfinite(step)):
        raise InvalidConfig("x-grid endpoints and step must be finite")
    if step <= 0.0 or hi < lo:
        raise InvalidConfig("x-grid needs step > 0 and hi >= lo")
    n = int(round((hi - lo) / step)) + 1
    if n > 1_000_000:
        raise InvalidConfig(f"x-grid would have {n} points; cap is 1000000")
    return lo + step * np.arange(n)


def _fmt(value: float) -> str:
    """Shortest float representation that round-trips (stable across runs)."""
    return repr(float(value))


# ---------------------------------------------------------------------------
# runners: pure config -> (results, verdicts, stdout_text); no printing,
# file writes only when write_files is set (report regeneration disables it)
# ---------------------------------------------------------------------------


def run_bounds(cfg: dict, write_files: bool = True):
    xs = _parse_grid(cfg["x_grid"])
    lines = ["x,lower,upper,quad_error"]
    for x in xs:
        ev = bound_at(
            BoundQuery(t=cfg["t"], C=cfg["c"], x=float(x)),
            literal_subscript=cfg["literal_subscript"],
        )
        lines.append(
            f"{_fmt(x)},{_fmt(ev.lower)},{_fmt(ev.upper)},{_fmt(ev.quad_error)}"
        )
    csv_text = "\n".join(lines) + "\n"
    results = {
        "t": cfg["t"],
        "c": cfg["c"],
        "rows": len(xs),
        "x_first": float(xs[0]),
        "x_last": float(xs[-1]),
        "csv_sha256": hashlib.sha256(csv_text.encode("utf-8")).hexdigest(),
    }
    stdout_text = csv_text
    if cfg["out"]:
        if write_files:
            with open(cfg["out"], "w", encoding="utf-8", newline="") as fh:
                fh.write(csv_text)
        stdout_text = canonical_json(results) + "\n"
    return results, {}, stdout_text


def run_constants(cfg: dict, write_files: bool = True):
    T, K, alpha = cfg["t"], cfg["k"], cfg["alpha"]
    pref = phi_holder_constant(alpha)
    _, err_unit = beta_time_integral(T, alpha)
    _, err_k = beta_time_integral(T * K * K, alpha)
    results = {
        "T": T,
        "K": K,
        "alpha": alpha,
        "c_alpha_unit": c_alpha_unit(T, alpha),
        "c_alpha_K": c_alpha_K(T, K, alpha),
        "quad_error_unit": 4.0 * pref * err_unit,
        "quad_error_K": K ** (1.0 + alpha) * 4.0 * pref * err_k,
    }
    if cfg["literal_subscript"]:
        q = BoundQuery(t=T, C=K, x=1.0)
        per_convention = {}
        for key, literal in (("unit_inner", False), ("literal_inner", True)):
            ev = bound_at(q, literal_subscript=literal)
            per_convention[key] = {
                "lower": ev.lower,
                "upper": ev.upper,
                "quad_error": ev.quad_error,
            }
        results["convention_comparison"] = {"t": T, "C": K, "x": 1.0, **per_convention}
    return results, {}, canonical_json(results) + "\n"


def run_simulate(cfg: dict, write_files: bool = True):
    control = make_control(cfg["control"])
    threads = cfg["threads"] if cfg["threads"] is not None else (os.cpu_count() or 1)
    batch = simulate(
        control,
        cfg["x0"],
        cfg["t"],
        cfg["n_steps"],
        cfg["n_paths"],
        cfg["seed"],
        chunk_size=cfg["chunk_size"],
        threads=threads,
    )
    blob = batch_to_bytes(batch)
    out = cfg["out"]
    fmt = None
    if out:
        fmt = "csv" if str(out).lower().endswith(".csv") else "sdl1"
        if write_files:
            if fmt == "csv":
                write_csv(batch, out)
            else:
                write_sdl1(batch, out)
    results = {
        "control": control.label,
        "x0": cfg["x0"],
        "T": batch.T,
        "n_steps": batch.n_steps,
        "n_paths": batch.n_paths,
        "seed": batch.seed,
        "clamp_violations": batch.clamp_violations,
        "payload_sha256": hashlib.sha256(blob).hexdigest(),
        "output": out,
        "format": fmt,
    }
    return results, {}, canonical_json(results) + "\n"


def _sniff_horizon(path) -> float | None:
    """Pull the horizon out of an SDL1 header or a batch-CSV comment line."""
    try:
        with open(path, "rb") as fh:
            head = fh.read(4)
            if head == MAGIC:
                import struct

                rest = fh.read(24)
                if len(rest) == 24:
                    _, _, T = struct.unpack("<QQd", rest)
                    return float(T)
                return None
        with open(path, "r", encoding="utf-8", errors="replace") as fh:
            first = fh.readline()
    except OSError as exc:
        raise InvalidConfig(f"cannot read input file {path}: {exc}") from exc
    if first.startswith("# sdl1:"):
        for tok in first.split()[2:]:
            key, _, val = tok.partition("=")
            if key == "T":
                try:
                    return float(val)
                except ValueError:
                    return None
    return None


def run_estimate(cfg: dict, write_files: bool = True):
    if not cfg["input"]:
        raise InvalidConfig("estimate needs --input (SDL1 batch or CSV samples)")
    samples = read_samples(cfg["input"])
    T = cfg["t"]
    if T is None:
        T = _sniff_horizon(cfg["input"])
    if T is None:
        T = 1.0
    if T <= 0.0:
        raise InvalidConfig(f"horizon T must be positive, got {T}")
    est = holder_modulus(
        ecdf(samples), cfg["alpha"], stat_budget=cfg["stat_budget"], delta=cfg["delta"]
    )
    constant = c_alpha_unit(T, cfg["alpha"])
    passed = est.modulus - est.stat_error <= constant
    results = {
        "input": cfg["input"],
        "samples_sha256": hashlib.sha256(
            np.ascontiguousarray(samples, dtype="<f8").tobytes()
        ).hexdigest(),
        "n_samples": int(samples.size),
        "alpha": cfg["alpha"],
        "T": T,
        "delta": cfg["delta"],
        "h_min": est.h_min,
        "modulus": est.modulus,
        "stat_error": est.stat_error,
        "constant": constant,
        "verdict": "PASS" if passed else "FAIL",
    }
    verdicts = {"modulus_le_constant": passed}
    return results, verdicts, canonical_json(results) + "\n"


def run_verify(cfg: dict, write_files: bool = True):
    threads = cfg["threads"] if cfg["threads"] is not None else (os.cpu_count() or 1)
    checks = _verify.run_verification(
        n_paths=cfg["n_paths"],
        n_steps=cfg["n_steps"],
        seed=cfg["seed"],
        T=cfg["t"],
        alpha=cfg["alpha"],
        threads=threads,
        chunk_size=cfg["chunk_size"],
    )
    results = {c.name: {"claim": c.claim, **c.details} for c in checks}
    verdicts = {c.name: c.passed for c in checks}
    n_fail = sum(1 for c in checks if not c.passed)
    lines = [c.line() for c in checks]
    if n_fail == 0:
        lines.append(f"VERDICT: ALL PASS ({len(checks)} checks)")
    else:
        lines.append(f"VERDICT: FAIL ({n_fail}/{len(checks)} checks failed)")
    return results, verdicts, "\n".join(lines) + "\n"


_RUNNERS = {
    "bounds": run_bounds,
    "constants": run_constants,
    "simulate": run_simulate,
    "estimate": run_estimate,
    "verify": run_verify,
}


def run_report(cfg: dict, write_files: bool = True):
    if not cfg["file"]:
        raise InvalidConfig("report needs --file (a JSONL report file)")
    records = load_records(cfg["file"])
    if not records:
        raise InvalidConfig(f"{cfg['file']}: no records")
    index = cfg["index"]
    if not cfg["regenerate"] and index is None:
        text = "".join(canonical_json(r.stable_core()) + "\n" for r in records)
        return {"records": len(records)}, {}, text
    if index is None:
        index = -1
    try:
        rec = records[index]
    except IndexError as exc:
        raise InvalidConfig(
            f"index {index} out of range for {len(records)} records"
        ) from exc
    if not cfg["regenerate"]:
        return (
            {"records": len(records), "index": index},
            {},
            canonical_json(rec.stable_core()) + "\n",
        )
    if rec.command not in _RUNNERS:
        raise InvalidConfig(f"cannot regenerate records of command {rec.command!r}")
    results, verdicts, _ = _RUNNERS[rec.command](rec.config, write_files=False)
    fresh = make_record(rec.command, rec.config, results, verdicts).stable_core()
    stored = rec.stable_core()
    match = fresh == stored
    summary = {
        "command": rec.command,
        "config_hash": rec.config_hash,
        "match": match,
    }
    if not match:
        summary["mismatched_fields"] = sorted(
            key for key in set(fresh) | set(stored) if fresh.get(key) != stored.get(key)
        )
    return summary, {"regeneration_match": match}, canonical_json(summary) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdl",
        description=(
            "Density regularity toolkit: envelope bounds, Holder constants, "
            "drifted-Brownian simulation, empirical estimation, verification."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument(
            "--report",
            dest="report_file",
            help="append a JSONL report record (includes wall-clock time)",
        )

    p = sub.add_parser("bounds", help="density envelope table over an x grid (CSV)")
    common(p)
    p.add_argument("--t", type=float, help="time point (default 1)")
    p.add_argument("--c", type=float, help="drift bound (default 1)")
    p.add_argument("--x-grid", dest="x_grid", help="lo:hi:step (default -3:3:0.1)")
    p.add_argument(
        "--literal-subscript",
        dest="literal_subscript",
        action="store_true",
        default=None,
        help="use the drift bound inside the envelope integrals' inner constant",
    )
    p.add_argument("--out", help="write the CSV here instead of stdout")

    p = sub.add_parser("constants", help="Holder constants with quadrature error (JSON)")
    common(p)
    p.add_argument("--t", type=float, help="horizon (default 1)")
    p.add_argument("--k", type=float, help="drift bound (default 1)")
    p.add_argument("--alpha", type=float, help="Holder order in (0,1) (default 0.5)")
    p.add_argument(
        "--literal-subscript",
        dest="literal_subscript",
        action="store_true",
        default=None,
        help="also emit the envelope-convention comparison at x=1",
    )

    p = sub.add_parser("simulate", help="Euler paths of dX = u dt + dW (SDL1/CSV)")
    common(p)
    p.add_argument(
        "--control",
        help="control spec: constant:<v>, bang_bang_sgn[:scale], running_max[:scale]",
    )
    p.add_argument("--x0", type=float, help="start point (default 0)")
    p.add_argument("--t", type=float, help="horizon (default 1)")
    p.add_argument("--n-steps", dest="n_steps", type=int, help="time steps (default 1024)")
    p.add_argument("--n-paths", dest="n_paths", type=int, help="paths (default 1000)")
    p.add_argument("--seed", type=int, help="RNG seed (beats SDL_SEED and config)")
    p.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    p.add_argument("--chunk-size", dest="chunk_size", type=int, help="paths per work unit")
    p.add_argument("--out", help="output file; .csv extension selects CSV, else SDL1")

    p = sub.add_parser("estimate", help="Holder modulus of a sample file vs theory")
    common(p)
    p.add_argument("--input", help="SDL1 batch or CSV sample file")
    p.add_argument("--alpha", type=float, help="Holder order in (0,1) (default 0.5)")
    p.add_argument("--delta", type=float, help="DKW confidence level (default 0.01)")
    p.add_argument(
        "--stat-budget",
        dest="stat_budget",
        type=float,
        help="statistical budget used to pick the smallest window",
    )
    p.add_argument("--t", type=float, help="horizon (default: from file, else 1)")

    p = sub.add_parser("verify", help="full statistical verification suite")
    common(p)
    p.add_argument("--n-paths", dest="n_paths", type=int, help="paths (default 1000000)")
    p.add_argument("--n-steps", dest="n_steps", type=int, help="steps (default 1024)")
    p.add_argument("--seed", type=int, help="RNG seed (beats SDL_SEED and config)")
    p.add_argument("--t", type=float, help="horizon (default 1)")
    p.add_argument("--alpha", type=float, help="order for the bound checks (default 0.5)")
    p.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    p.add_argument("--chunk-size", dest="chunk_size", type=int, help="paths per work unit")

    p = sub.add_parser("report", help="inspect or regenerate JSONL report records")
    common(p)
    p.add_argument("--file", help="JSONL report file to read")
    p.add_argument("--index", type=int, help="record index (default: all, or last)")
    p.add_argument(
        "--regenerate",
        action="store_true",
        default=None,
        help="re-run the selected record's command and compare stable cores",
    )

    return parser


_FLAG_KEYS = {
    command: tuple(schema) for command, schema in _SCHEMAS.items()
}


def _join_grid_flags(argv) -> list:
    """Fuse ``--x-grid -3:3:0.1`` into one token; argparse would otherwise
    read a grid starting with a negative number as an unknown option."""
    out = []
    tokens = iter(argv)
    for token in tokens:
        if token == "--x-grid":
            value = next(tokens, None)
            out.append(token if value is None else f"--x-grid={value}")
        else:
            out.append(token)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_join_grid_flags(argv))
    command = args.command
    started = time.monotonic()
    try:
        flags = {
            key: getattr(args, key, None) for key in _FLAG_KEYS[command]
        }
        cfg = resolve_config(command, flags, config_path=args.config)
        runner = run_report if command == "report" else _RUNNERS[command]
        results, verdicts, stdout_text = runner(cfg)
    except (BracketFailure, QuadratureFailure) as exc:
        print(f"sdl {command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SdlError as exc:
        print(f"sdl {command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"sdl {command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if stdout_text:
        sys.stdout.write(stdout_text)
    if args.report_file:
        record = make_record(
            command,
            cfg,
            results,
            verdicts,
            wall_clock_s=time.monotonic() - started,
        )
        append_record(record, args.report_file)
    if verdicts and not all(verdicts.values()):
        return EXIT_STAT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
