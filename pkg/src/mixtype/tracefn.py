"""Sampled one-dimensional trace functions on a uniform grid over [0, 1]."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline, PPoly

MIN_CELLS = 8


@dataclass(frozen=True, eq=False)
class TraceFn:
    """Nodal samples of a trace with a C^1 cubic interpolant.

    With ``deriv_values`` the interpolant is the cubic Hermite spline through
    (value, slope) pairs; otherwise a not-a-knot cubic spline.
    """

    values: np.ndarray
    deriv_values: np.ndarray | None = None
    ppoly: PPoly | None = field(default=None, repr=False)
    _spline: object = field(init=False, repr=False)
    _anti: object = field(init=False, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size - 1 < MIN_CELLS:
            raise ValueError(f"trace needs at least {MIN_CELLS + 1} nodes, got {v.size}")
        object.__setattr__(self, "values", v)
        t = self.grid
        if self.deriv_values is not None:
            d = np.asarray(self.deriv_values, dtype=float)
            if d.shape != v.shape:
                raise ValueError("deriv_values must match values in shape")
            object.__setattr__(self, "deriv_values", d)
        if self.ppoly is not None:
            spline = self.ppoly
        elif self.deriv_values is not None:
            spline = CubicHermiteSpline(t, v, self.deriv_values)
        else:
            spline = CubicSpline(t, v)
        object.__setattr__(self, "_spline", spline)
        object.__setattr__(self, "_anti", spline.antiderivative())

    @property
    def M(self) -> int:
        return self.values.size - 1

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.values.size)

    @property
    def h(self) -> float:
        return 1.0 / self.M

    def __call__(self, t):
        return self._spline(_clip(t))

    def derivative(self, t, order: int = 1):
        return self._spline(_clip(t), order)

    def integral(self, a, b):
        """int_a^b of the interpolant, vectorised over a and b."""
        return self._anti(_clip(b)) - self._anti(_clip(a))

    def nodal_derivatives(self) -> np.ndarray:
        if self.deriv_values is not None:
            return self.deriv_values
        return self._spline(self.grid, 1)

    def scaled(self, factor: float) -> "TraceFn":
        d = None if self.deriv_values is None else factor * self.deriv_values
        pp = PPoly(factor * self._spline.c, self._spline.x)
        return TraceFn(factor * self.values, d, pp)

    def antiderivative(self, anchor: float = 0.0) -> "TraceFn":
        """Exact antiderivative of the interpolant, equal to ``anchor`` at 0."""
        anti = self._spline.antiderivative()
        c = anti.c.copy()
        c[-1] += anchor - float(anti(0.0))
        pp = PPoly(c, anti.x)
        return TraceFn(pp(self.grid), self.values.copy(), pp)

    @classmethod
    def sample(cls, func, M: int, deriv=None) -> "TraceFn":
        t = np.linspace(0.0, 1.0, M + 1)
        values = np.broadcast_to(func(t), t.shape).astype(float)
        slopes = None if deriv is None else np.broadcast_to(deriv(t), t.shape).astype(float)
        return cls(values, slopes)

    @classmethod
    def zeros(cls, M: int) -> "TraceFn":
        return cls(np.zeros(M + 1), np.zeros(M + 1))


def _clip(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < -1e-9) or np.any(t > 1.0 + 1e-9):
        raise ValueError("trace evaluated outside [0, 1]")
    return np.clip(t, 0.0, 1.0)
