"""TOML run configuration -> ProblemSpec plus output controls."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, ParseError
from .geometry import TypeChangeCurve
from .parabolic import KernelConfig
from .pipeline import ProblemSpec
from .source import SourceTerm
from .traces import Sigma

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

ALLOWED = {
    "sigma": {"s1", "s2", "s3"},
    "curve_1": {"kind", "c", "points"},
    "curve_2": {"kind", "c", "points"},
    "curve_3": {"kind", "c", "points"},
    "source": {"kind", "expr", "table", "smooth"},
    "grid": {"M"},
    "quad": {"tol"},
    "kernel": {"series_tol", "n_cap", "min_dt"},
    "output": {"dir", "field_resolution", "probe_M"},
}
REQUIRED = ("sigma", "curve_1", "curve_2", "curve_3", "source")


@dataclass(frozen=True)
class RunConfig:
    spec: ProblemSpec
    output_dir: Path
    field_resolution: int = 64
    probe_M: int = 16
    path: Path | None = None


def _number(table, section, key, default=None, kind=float):
    if key not in table:
        if default is None:
            raise ConfigError(f"{section}.{key}", "missing")
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{section}.{key}", f"expected a number, got {v!r}")
    if kind is int:
        if float(v) != int(v):
            raise ConfigError(f"{section}.{key}", f"expected an integer, got {v!r}")
        return int(v)
    return float(v)


def _points(rows, key):
    out = []
    if not isinstance(rows, list):
        raise ConfigError(key, "expected a list of rows 't,value'")
    for j, row in enumerate(rows):
        try:
            if isinstance(row, str):
                t, v = (float(s) for s in row.split(","))
            else:
                t, v = (float(s) for s in row)
        except (TypeError, ValueError):
            raise ConfigError(f"{key}[{j}]", f"cannot read {row!r} as 't,value'") from None
        out.append((t, v))
    return out


def _curve(index, table):
    section = f"curve_{index}"
    kind = table.get("kind", "bump")
    if kind == "bump":
        return TypeChangeCurve.bump(index, _number(table, section, "c"))
    if kind == "table":
        if "points" not in table:
            raise ConfigError(f"{section}.points", "missing")
        return TypeChangeCurve.table(index, _points(table["points"], f"{section}.points"))
    raise ConfigError(f"{section}.kind", f"expected 'bump' or 'table', got {kind!r}")


def _source(table, base: Path):
    kind = table.get("kind", "expr")
    smooth = table.get("smooth")
    if kind == "expr":
        if not isinstance(table.get("expr"), str):
            raise ConfigError("source.expr", "expected a string expression")
        try:
            return SourceTerm.from_expr(table["expr"], True if smooth is None else bool(smooth))
        except ParseError as exc:
            raise ConfigError("source.expr", str(exc)) from None
    if kind == "table":
        if not isinstance(table.get("table"), str):
            raise ConfigError("source.table", "expected a CSV path")
        path = Path(table["table"])
        if not path.is_absolute():
            path = base / path
        if not path.exists():
            raise ConfigError("source.table", f"{path} does not exist")
        return SourceTerm.from_table(path, False if smooth is None else bool(smooth))
    raise ConfigError("source.kind", f"expected 'expr' or 'table', got {kind!r}")


def parse_config(data: dict, base: Path = Path("."), path: Path | None = None) -> RunConfig:
    """Build a RunConfig from parsed TOML; SigmaInvalid and CurveInvalid pass through."""
    for section, table in data.items():
        if section not in ALLOWED:
            raise ConfigError(section, "unknown section")
        if not isinstance(table, dict):
            raise ConfigError(section, "expected a table")
        for key in table:
            if key not in ALLOWED[section]:
                raise ConfigError(f"{section}.{key}", "unknown key")
    for section in REQUIRED:
        if section not in data:
            raise ConfigError(section, "missing section")

    sg = data["sigma"]
    sigma = Sigma(*(_number(sg, "sigma", k) for k in ("s1", "s2", "s3")))
    curves = tuple(_curve(i, data[f"curve_{i}"]) for i in (1, 2, 3))
    source = _source(data["source"], base)

    grid = data.get("grid", {})
    M = _number(grid, "grid", "M", 256, int)
    if M < 16:
        raise ConfigError("grid.M", "must be at least 16")
    tol = _number(data.get("quad", {}), "quad", "tol", 1e-10)
    if tol <= 0:
        raise ConfigError("quad.tol", "must be positive")
    kt = data.get("kernel", {})
    try:
        kernel = KernelConfig(
            _number(kt, "kernel", "series_tol", 1e-12),
            _number(kt, "kernel", "n_cap", 32, int),
            _number(kt, "kernel", "min_dt", 1e-12),
        )
    except ValueError as exc:
        raise ConfigError("kernel", str(exc)) from None

    out = data.get("output", {})
    out_dir = out.get("dir", "out")
    if not isinstance(out_dir, str):
        raise ConfigError("output.dir", "expected a path string")
    res = _number(out, "output", "field_resolution", 64, int)
    if res < 16:
        raise ConfigError("output.field_resolution", "must be at least 16")
    probe = _number(out, "output", "probe_M", 16, int)
    if probe < 8:
        raise ConfigError("output.probe_M", "must be at least 8")
    spec = ProblemSpec(sigma, curves, source, M, kernel, tol)
    return RunConfig(spec, Path(out_dir), res, probe, path)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError("<file>", f"{path} not found") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<file>", f"TOML syntax error: {exc}") from None
    return parse_config(data, path.parent, path)
