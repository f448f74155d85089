"""mixtype command line: solve, verify, convergence."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import backend
from .config import RunConfig, load_config
from .errors import ConfigError, CurveInvalid, DomainError, MixtypeError, NonMonotone, NoIntersection, SigmaInvalid, StepSingular
from .geometry import SubdomainId, classify_xy
from .pipeline import ResidualReport, Solution, convergence_study, solution_from_traces, solve, verify

EXIT_OK, EXIT_CONFIG, EXIT_SIGMA, EXIT_NUMERIC, EXIT_REGRESSION = 0, 2, 3, 4, 5
LINES = {1: "AB", 2: "AD", 3: "BC"}
LABELS = {0: "Omega0", 1: "Omega1", 2: "Omega2", 3: "Omega3", -2: "Interface"}
# the closure of the mixed domain always lies inside this box
BOX = (-0.5, 1.5, -0.5, 1.0)


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_traces(path: Path, sol: Solution):
    rows = []
    for i, name in LINES.items():
        tau, nu = sol.tau[i], sol.nu[i]
        for t, a, b in zip(tau.grid, tau.values, nu.values):
            rows.append((name, fmt(t), fmt(a), fmt(b)))
    _write_csv(path, ("line", "t", "tau", "nu"), rows)


def read_traces(path: Path) -> dict:
    by_line = {name: ([], []) for name in LINES.values()}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["line", "t", "tau", "nu"]:
            raise ConfigError(str(path), "expected header line,t,tau,nu")
        for row in reader:
            if row["line"] not in by_line:
                raise ConfigError(str(path), f"unknown line {row['line']!r}")
            by_line[row["line"]][0].append(float(row["tau"]))
            by_line[row["line"]][1].append(float(row["nu"]))
    return {i: by_line[name] for i, name in LINES.items()}


def write_field(path: Path, sol: Solution, resolution: int):
    x0, x1, y0, y1 = BOX
    xs = np.linspace(x0, x1, resolution + 1)
    ys = np.linspace(y0, y1, resolution + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    lab = classify_xy(X, Y, sol.spec.curves)
    keep = lab != SubdomainId.OUTSIDE
    X, Y, lab = X[keep], Y[keep], lab[keep]
    U = sol.evaluate_xy(X, Y)
    rows = [(LABELS[int(k)], fmt(a), fmt(b), fmt(u)) for k, a, b, u in zip(lab, X, Y, U)]
    _write_csv(path, ("subdomain", "x", "y", "u"), rows)


def write_report(path: Path, report: ResidualReport):
    path.write_text(report.to_json() + "\n")


def _summary(report: ResidualReport) -> str:
    g = report.groups()
    return "  ".join(f"{k}={v:.3e}" for k, v in g.items())


def cmd_solve(cfg: RunConfig, out_dir: Path | None = None) -> int:
    out = Path(out_dir or cfg.output_dir)
    sol = solve(cfg.spec)
    report = verify(sol, cfg.spec, cfg.probe_M)
    out.mkdir(parents=True, exist_ok=True)
    write_traces(out / "traces.csv", sol)
    write_field(out / "field.csv", sol, cfg.field_resolution)
    write_report(out / "report.json", report)
    print(f"solved M={cfg.spec.grid_M} -> {out}")
    print(_summary(report))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, sol_dir: Path) -> int:
    sol_dir = Path(sol_dir)
    path = sol_dir / "traces.csv"
    if not path.exists():
        raise ConfigError("solution-dir", f"{path} not found")
    rows = read_traces(path)
    sizes = {len(v[0]) for v in rows.values()}
    if sizes != {cfg.spec.grid_M + 1}:
        raise ConfigError("grid.M", f"traces have {sorted(sizes)} nodes, config expects {cfg.spec.grid_M + 1}")
    sol = solution_from_traces(cfg.spec, rows)
    report = verify(sol, cfg.spec, cfg.probe_M)
    write_report(sol_dir / "report.json", report)
    print(_summary(report))
    return EXIT_OK


def parse_levels(text: str) -> list:
    try:
        levels = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError("--levels", f"cannot read {text!r} as comma-separated integers") from None
    if len(levels) < 3:
        raise ConfigError("--levels", "need at least 3 levels")
    if any(b <= a for a, b in zip(levels[:-1], levels[1:])):
        raise ConfigError("--levels", "levels must increase strictly")
    if levels[0] < 16:
        raise ConfigError("--levels", "levels must be at least 16")
    return levels


def cmd_convergence(cfg: RunConfig, levels, out_dir: Path | None = None) -> int:
    out = Path(out_dir or cfg.output_dir)
    rows = convergence_study(cfg.spec, levels, cfg.probe_M)
    out.mkdir(parents=True, exist_ok=True)
    table = [(r.M, fmt(r.residual_max), "na" if r.eoc is None else fmt(r.eoc)) for r in rows]
    _write_csv(out / "convergence.csv", ("M", "residual_max", "eoc"), table)
    for M, r, e in table:
        print(f"M={M:<6} residual_max={float(r):.3e} eoc={e if e == 'na' else format(float(e), '.2f')}")
    last = rows[-1].eoc
    if last is not None and last < 0.5:
        print(f"final eoc {last:.2f} is below 0.5", file=sys.stderr)
        return EXIT_REGRESSION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mixtype", description="Nonlocal mixed parabolic-hyperbolic problem solver.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", help="solve and write field.csv, traces.csv, report.json")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p = sub.add_parser("verify", help="re-verify traces.csv from a solution directory")
    p.add_argument("config")
    p.add_argument("solution_dir")
    p = sub.add_parser("convergence", help="refinement study, writes convergence.csv")
    p.add_argument("config")
    p.add_argument("--levels", required=True, help="comma-separated grid sizes, e.g. 64,128,256")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    backend.set_threads()
    try:
        if args.command == "convergence":
            levels = parse_levels(args.levels)
        cfg = load_config(args.config)
        if args.command == "solve":
            return cmd_solve(cfg, args.out)
        if args.command == "verify":
            return cmd_verify(cfg, args.solution_dir)
        return cmd_convergence(cfg, levels, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SigmaInvalid as exc:
        print(f"invalid sigma: {exc}", file=sys.stderr)
        return EXIT_SIGMA
    except (StepSingular, NonMonotone, NoIntersection) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CurveInvalid, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MixtypeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
