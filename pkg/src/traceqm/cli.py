"""Command-line workbench: seeded experiments with machine-readable artifacts.

Usage: ``traceqm EXPERIMENT [--flag value ...]``.  Flags override config-file
values (``--config FILE``, flat ``key = value`` lines with ``#`` comments),
which override the ``WORKBENCH_SEED`` environment fallback, which overrides
compiled defaults.  The same configuration and seed always produce byte
identical artifacts.

Exit codes: 0 all checks passed, 1 a check failed (or the run errored),
2 usage or validation problem, 3 could not write output.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import UsageError, ValidationError, WorkbenchError
from .experiments import (
    EXPERIMENT_DEFAULTS,
    EXPERIMENTS,
    GLOBAL_DEFAULTS,
    TOL_KEYS,
    Check,
    ExperimentConfig,
)

__all__ = [
    "parse_config",
    "run_experiment",
    "main",
    "read_rows_csv",
    "read_report_json",
]

#: flags that take a value, besides --tol-<name>.
FLAG_KEYS = (
    "n", "seed", "grid-n", "length", "mass", "omega", "hbar", "d",
    "times", "a1", "a2", "out", "format", "config",
)

USAGE = """usage: traceqm EXPERIMENT [--flag value ...]

experiments:
  cat               two-outcome superposition statistics
  well-spectrum     hard-wall level energies against the analytic law
  spread            free-packet width growth and stationary-state width
  poisson           classical bracket vs commutator expectations
  vn-generator      single generator of a commuting family
  ensemble-density  sampled position density against the state density
  claims            structural invariant sweep

common flags: --seed INT --out PATH --format csv|json --config FILE
model flags:  --n INT --grid-n INT --length X --mass X --omega X --hbar X
              --d INT --times T1,T2,... --a1 X --a2 X
tolerances:   --tol-NAME X (echoed into the checks output)
"""


def _parse_flags(tokens: list[str]) -> dict[str, str]:
    flags: dict[str, str] = {}
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if not token.startswith("--"):
            raise UsageError(f"expected a --flag, got {token!r}")
        key = token[2:]
        if not _known_key(key):
            raise UsageError(f"unknown flag --{key}")
        if i + 1 >= len(tokens):
            raise UsageError(f"flag --{key} needs a value")
        flags[key] = tokens[i + 1]
        i += 2
    return flags


def _known_key(key: str) -> bool:
    if key in FLAG_KEYS:
        return True
    return key.startswith("tol-") and key[4:] in TOL_KEYS


def _read_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key == "config":
            raise UsageError(f"{path}:{lineno}: config files cannot nest")
        if not _known_key(key):
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _to_int(key: str, raw, minimum: int | None = None) -> int:
    try:
        value = int(str(raw), 10)
    except ValueError as exc:
        raise ValidationError(f"{key} must be an integer, got {raw!r}") from exc
    if minimum is not None and value < minimum:
        raise ValidationError(f"{key} must be at least {minimum}, got {value}")
    return value


def _to_float(key: str, raw, positive: bool = False) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{key} must be a number, got {raw!r}") from exc
    if not np.isfinite(value):
        raise ValidationError(f"{key} must be finite, got {value!r}")
    if positive and value <= 0.0:
        raise ValidationError(f"{key} must be positive, got {value!r}")
    return value


def _to_times(raw) -> tuple[float, ...]:
    if isinstance(raw, tuple):
        parts = list(raw)
    else:
        parts = [piece for piece in str(raw).split(",") if piece.strip() != ""]
    if not parts:
        raise ValidationError("times must list at least one value")
    times = tuple(_to_float("times", piece) for piece in parts)
    if any(t < 0 for t in times):
        raise ValidationError("times must be non-negative")
    if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
        raise ValidationError("times must be strictly ascending")
    return times


def parse_config(args, file: str | None = None) -> ExperimentConfig:
    """Resolve an argument list (and optional config file) into a config.

    Raises :class:`UsageError` for unknown experiments, flags, or keys, and
    :class:`ValidationError` for values that fail validation.
    """
    args = [str(a) for a in args]
    if not args:
        raise UsageError("missing experiment name")
    experiment = args[0]
    if experiment not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {experiment!r}")

    flags = _parse_flags(args[1:])
    config_path = flags.pop("config", None) or file
    file_values = _read_config_file(config_path) if config_path is not None else {}

    merged: dict[str, str] = {}
    if "WORKBENCH_SEED" in os.environ:
        merged["seed"] = os.environ["WORKBENCH_SEED"]
    merged.update(file_values)
    merged.update(flags)

    resolved: dict[str, object] = dict(GLOBAL_DEFAULTS)
    resolved.update(EXPERIMENT_DEFAULTS[experiment])

    tols: dict[str, float] = {}
    for key, raw in merged.items():
        if key.startswith("tol-"):
            value = _to_float(key, raw)
            if value < 0:
                raise ValidationError(f"{key} must be non-negative, got {value!r}")
            tols[key[4:]] = value
        elif key == "n":
            resolved["n"] = _to_int(key, raw, minimum=1)
        elif key == "seed":
            resolved["seed"] = _to_int(key, raw)
        elif key == "grid-n":
            resolved["grid_n"] = _to_int(key, raw, minimum=8)
        elif key == "d":
            resolved["d"] = _to_int(key, raw, minimum=4)
        elif key in ("length", "mass", "omega", "hbar"):
            resolved[key] = _to_float(key, raw, positive=True)
        elif key in ("a1", "a2"):
            resolved[key] = _to_float(key, raw)
        elif key == "times":
            resolved["times"] = _to_times(raw)
        elif key == "out":
            resolved["out"] = str(raw)
        elif key == "format":
            if raw not in ("csv", "json"):
                raise ValidationError(f"format must be csv or json, got {raw!r}")
            resolved["format"] = raw
        else:
            raise UsageError(f"unknown key {key!r}")

    if experiment == "cat" and resolved["a1"] == resolved["a2"]:
        raise ValidationError("a1 and a2 must be distinct outcomes")

    return ExperimentConfig(
        experiment=experiment,
        n=resolved["n"],
        seed=resolved["seed"],
        grid_n=resolved["grid_n"],
        length=resolved["length"],
        mass=resolved["mass"],
        omega=resolved["omega"],
        hbar=resolved["hbar"],
        d=resolved["d"],
        times=resolved["times"],
        a1=resolved["a1"],
        a2=resolved["a2"],
        out=resolved["out"],
        format=resolved["format"],
        tols=tols,
    )


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _parse_cell(text: str):
    try:
        return int(text, 10)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def write_rows_csv(path, rows) -> None:
    header = list(rows[0].keys())
    for row in rows:
        if list(row.keys()) != header:
            raise ValueError("all rows must share one column set")
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(row[key]) for key in header))
    Path(path).write_text("\n".join(lines) + "\n")


def read_rows_csv(path) -> list[dict]:
    """Inverse of :func:`write_rows_csv`: ``read(write(rows)) == rows``."""
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    return [
        {key: _parse_cell(cell) for key, cell in zip(header, line.split(","))}
        for line in lines[1:]
    ]


def _config_echo(cfg: ExperimentConfig) -> dict:
    return {
        "experiment": cfg.experiment,
        "n": cfg.n,
        "seed": cfg.seed,
        "grid_n": cfg.grid_n,
        "length": cfg.length,
        "mass": cfg.mass,
        "omega": cfg.omega,
        "hbar": cfg.hbar,
        "d": cfg.d,
        "times": None if cfg.times is None else list(cfg.times),
        "a1": cfg.a1,
        "a2": cfg.a2,
        "format": cfg.format,
    }


def _check_record(check: Check) -> dict:
    return {
        "name": check.name,
        "value": check.value,
        "bound": check.bound,
        "mode": check.mode,
        "passed": check.passed,
    }


def _jsonable(value):
    if isinstance(value, dict):
        return {key: _jsonable(v) for key, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def write_report_json(path, cfg: ExperimentConfig, rows, checks) -> None:
    report = {
        "config": _config_echo(cfg),
        "rows": _jsonable(rows),
        "checks": [_jsonable(_check_record(c)) for c in checks],
    }
    Path(path).write_text(json.dumps(report, indent=2) + "\n")


def read_report_json(path) -> dict:
    """Inverse of :func:`write_report_json` up to tuple/list coercion."""
    return json.loads(Path(path).read_text())


def _checks_csv_records(cfg: ExperimentConfig, checks) -> list[dict]:
    records = []
    for key, value in _config_echo(cfg).items():
        if key == "times":
            value = "" if value is None else ";".join(repr(t) for t in value)
        records.append({"record": "config", "name": key, "value": value,
                        "bound": "", "mode": "", "passed": ""})
    for check in checks:
        records.append({"record": "check", "name": check.name, "value": check.value,
                        "bound": check.bound, "mode": check.mode, "passed": int(check.passed)})
    return records


def run_experiment(cfg: ExperimentConfig) -> int:
    """Run one configured experiment, write artifacts, print check lines."""
    try:
        rows, checks = EXPERIMENTS[cfg.experiment](cfg)
    except WorkbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    suffix = ".csv" if cfg.format == "csv" else ".json"
    out = Path(cfg.out) if cfg.out is not None else Path(cfg.experiment + suffix)
    try:
        if cfg.format == "json":
            write_report_json(out, cfg, rows, checks)
            written = [out]
        else:
            write_rows_csv(out, rows)
            checks_path = out.with_name(out.stem + ".checks.csv")
            write_rows_csv(checks_path, _checks_csv_records(cfg, checks))
            written = [out, checks_path]
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 3

    for check in checks:
        relation = "<=" if check.mode == "max" else ">="
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}: {check.value:.6g} {relation} {check.bound:.6g}")
    for path in written:
        print(f"wrote {path}")
    return 0 if all(check.passed for check in checks) else 1


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    if argv and argv[0] in ("-h", "--help"):
        print(USAGE)
        return 0
    try:
        cfg = parse_config(argv)
    except (UsageError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(USAGE, file=sys.stderr)
        return 2
    return run_experiment(cfg)


if __name__ == "__main__":
    sys.exit(main())
