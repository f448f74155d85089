"""Right-hand side f(x, y) and its characteristic form f1(xi, eta) = f/4."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import DomainError
from .expr import Node, Num, parse_expression, to_text
from .geometry import CharPoint, in_mixed_hull


@dataclass(frozen=True, eq=False)
class SourceTerm:
    """Vectorised f(x, y) plus a record of where it came from.

    ``smoothness_claim`` records the caller's assertion that f is C^2; it is
    carried into reports but cannot be checked from samples.
    """

    f: Callable
    smoothness_claim: bool = True
    kind: str = "callable"
    description: str = ""
    expr: Node | None = field(default=None, repr=False)
    is_zero: bool = False

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.asarray(self.f(x, y), dtype=float)
        out = np.broadcast_to(out, np.broadcast(x, y).shape)
        if not np.all(np.isfinite(out)):
            raise DomainError(f"source {self.description or self.kind} is not finite at some point")
        return out

    @classmethod
    def from_expr(cls, text: str, smoothness_claim: bool = True) -> "SourceTerm":
        node = parse_expression(text)
        zero = _is_literal_zero(node)
        return cls(node.evaluate, smoothness_claim, "expr", to_text(node), node, zero)

    @classmethod
    def from_table(cls, path, smoothness_claim: bool = False) -> "SourceTerm":
        """Bilinear interpolant of a CSV with header ``x,y,f`` on a full grid."""
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["x", "y", "f"]:
                raise DomainError(f"{path}: expected header 'x,y,f'")
            try:
                rows = [(float(r["x"]), float(r["y"]), float(r["f"])) for r in reader]
            except (TypeError, ValueError) as exc:
                raise DomainError(f"{path}: {exc}") from None
        return cls.from_samples(np.array(rows), smoothness_claim, description=str(path))

    @classmethod
    def from_samples(cls, rows, smoothness_claim=False, description="table") -> "SourceTerm":
        rows = np.asarray(rows, dtype=float)
        xs = np.unique(rows[:, 0])
        ys = np.unique(rows[:, 1])
        if xs.size * ys.size != rows.shape[0]:
            raise DomainError("source table must cover a full tensor grid")
        grid = np.full((xs.size, ys.size), np.nan)
        grid[np.searchsorted(xs, rows[:, 0]), np.searchsorted(ys, rows[:, 1])] = rows[:, 2]
        interp = RegularGridInterpolator((xs, ys), grid, method="linear", bounds_error=False, fill_value=np.nan)

        def f(x, y):
            x, y = np.broadcast_arrays(x, y)
            return interp(np.stack([x.ravel(), y.ravel()], axis=-1)).reshape(x.shape)

        return cls(f, smoothness_claim, "table", description, None, bool(np.all(rows[:, 2] == 0.0)))

    @classmethod
    def zero(cls) -> "SourceTerm":
        return cls.from_expr("0")

    @classmethod
    def constant(cls, value: float) -> "SourceTerm":
        return cls.from_expr(repr(float(value)))


def _is_literal_zero(node: Node) -> bool:
    return isinstance(node, Num) and node.value == 0.0


def f1(source: SourceTerm, xi, eta):
    """f1(xi, eta) = f((xi+eta)/2, (xi-eta)/2) / 4, vectorised, no hull check."""
    return 0.25 * source(0.5 * (xi + eta), 0.5 * (xi - eta))


def f1_eval(source: SourceTerm, cp: CharPoint) -> float:
    x = 0.5 * (cp.xi + cp.eta)
    y = 0.5 * (cp.xi - cp.eta)
    if not in_mixed_hull(x, y):
        raise DomainError(f"({x:g}, {y:g}) lies outside the closure of the mixed domain")
    return float(0.25 * source(x, y))
