"""Mixed domain, bounding curves, characteristic coordinates and affixes.

Omega0 is the unit square with vertices A=(0,0), B=(1,0), C=(1,1), D=(0,1).
The hyperbolic pieces hang off the three type-change lines:

* Omega1 below AB, bounded by y = -gamma1(x);
* Omega2 left of AD, bounded by x = -gamma2(y);
* Omega3 right of BC, bounded by x = gamma3(y), gamma3(0) = gamma3(1) = 1.

Each hyperbolic piece gets a local characteristic chart (p, q) in which its
type-change line is the diagonal p = q = t (t the arc parameter, x on AB and
y on AD/BC), the piece lies in p <= q, and its bounding curve is the image
of t -> (t - g(t), t + g(t)) where g is the curve's bulge away from the line
(g = gamma1, gamma2, gamma3 - 1).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import CurveInvalid, NoIntersection, NonMonotone

A = (0.0, 0.0)
B = (1.0, 0.0)
C = (1.0, 1.0)
D = (0.0, 1.0)

ROOT_TOL = 1e-12
_SAMPLES = 101


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class CharPoint:
    xi: float
    eta: float


def to_char(p: Point) -> CharPoint:
    return CharPoint(p.x + p.y, p.x - p.y)


def from_char(cp: CharPoint) -> Point:
    return Point(0.5 * (cp.xi + cp.eta), 0.5 * (cp.xi - cp.eta))


class SubdomainId(enum.IntEnum):
    OMEGA0 = 0
    OMEGA1 = 1
    OMEGA2 = 2
    OMEGA3 = 3
    OUTSIDE = -1
    INTERFACE = -2


# ---------------------------------------------------------------------------
# local characteristic charts


@dataclass(frozen=True)
class Chart:
    """Affine map between (x, y) and the local (p, q) of one hyperbolic piece.

    ``source_sign`` is the factor s with u_pq = s * f(x, y) / 4, and
    ``nu_sign`` the factor k in u = (tau(p) + tau(q))/2 - (k/2) int_p^q nu.
    """

    region: int
    source_sign: float
    nu_sign: float

    def to_local(self, x, y):
        if self.region == 1:
            return x + y, x - y
        if self.region == 2:
            return x + y, y - x
        return 1.0 - x + y, x + y - 1.0

    def to_xy(self, p, q):
        if self.region == 1:
            return 0.5 * (p + q), 0.5 * (p - q)
        if self.region == 2:
            return 0.5 * (p - q), 0.5 * (p + q)
        return 1.0 + 0.5 * (q - p), 0.5 * (p + q)

    def grad_to_char(self, u_p, u_q):
        """(u_p, u_q) -> (u_xi, u_eta)."""
        if self.region == 1:
            return u_p, u_q
        if self.region == 2:
            return u_p, -u_q
        return u_q, -u_p

    def line_point(self, t):
        """Point of the type-change line at arc parameter t."""
        if self.region == 1:
            return t, 0.0 * t
        if self.region == 2:
            return 0.0 * t, t
        return 1.0 + 0.0 * t, t


CHARTS = {1: Chart(1, 1.0, 1.0), 2: Chart(2, -1.0, 1.0), 3: Chart(3, -1.0, -1.0)}


# ---------------------------------------------------------------------------
# bounding curves


@dataclass(frozen=True, eq=False)
class TypeChangeCurve:
    """Bounding curve gamma_i on its parameter interval [0, 1].

    ``gamma``/``gamma_prime`` are vectorised callables; ``samples`` is the
    101-point (t, gamma(t)) table used for validation and inversion seeds.
    """

    index: int
    gamma: Callable
    gamma_prime: Callable
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    samples: np.ndarray = field(init=False, repr=False)
    require_interior: bool = True

    def __post_init__(self):
        if self.index not in (1, 2, 3):
            raise CurveInvalid(f"curve index must be 1, 2 or 3, got {self.index}")
        t = np.linspace(0.0, 1.0, _SAMPLES)
        g = np.asarray(self.gamma(t), dtype=float)
        object.__setattr__(self, "samples", np.column_stack([t, g]))
        self._validate()

    @property
    def base(self) -> float:
        return 1.0 if self.index == 3 else 0.0

    def bulge(self, t):
        return np.asarray(self.gamma(t), dtype=float) - self.base

    def bulge_prime(self, t):
        return np.asarray(self.gamma_prime(t), dtype=float)

    def _validate(self):
        t, g = self.samples[:, 0], self.samples[:, 1] - self.base
        if not np.all(np.isfinite(g)):
            raise CurveInvalid(f"gamma{self.index} is not finite on [0, 1]")
        if abs(g[0]) > 1e-12 or abs(g[-1]) > 1e-12:
            raise CurveInvalid(
                f"gamma{self.index} must equal {self.base:g} at t=0 and t=1 "
                f"(got {g[0] + self.base:.3g}, {g[-1] + self.base:.3g})"
            )
        h = t[1] - t[0]
        d2 = (g[2:] - 2.0 * g[1:-1] + g[:-2]) / h**2
        if not np.all(np.isfinite(d2)):
            raise CurveInvalid(f"gamma{self.index} has non-finite second differences")
        lo, hi = t - g, t + g
        if np.any(np.diff(lo) <= 0.0) or np.any(np.diff(hi) <= 0.0):
            raise NonMonotone(f"t - gamma{self.index}(t) and t + gamma{self.index}(t) must increase strictly")
        if self.require_interior and np.any(g[1:-1] <= 0.0):
            raise CurveInvalid(f"gamma{self.index} must lie strictly inside its characteristic triangle")

    @classmethod
    def bump(cls, index: int, c: float, **kw) -> "TypeChangeCurve":
        """gamma(t) = base + c t (1 - t); admissible for 0 < c < 1."""
        c = float(c)
        base = 1.0 if index == 3 else 0.0
        return cls(
            index,
            lambda t: base + c * np.asarray(t) * (1.0 - np.asarray(t)),
            lambda t: c * (1.0 - 2.0 * np.asarray(t)),
            kind="bump",
            params={"c": c},
            **kw,
        )

    @classmethod
    def table(cls, index: int, points, **kw) -> "TypeChangeCurve":
        """Cubic-spline curve through tabulated (t, gamma) rows spanning [0, 1]."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 4:
            raise CurveInvalid("curve table needs at least 4 rows of (t, value)")
        order = np.argsort(pts[:, 0])
        t, v = pts[order, 0], pts[order, 1]
        if t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) <= 0.0):
            raise CurveInvalid("curve table must have strictly increasing t from 0 to 1")
        spline = CubicSpline(t, v)
        deriv = spline.derivative()
        return cls(
            index,
            lambda s: spline(np.asarray(s, dtype=float)),
            lambda s: deriv(np.asarray(s, dtype=float)),
            kind="table",
            params={"points": pts[order].tolist()},
            **kw,
        )


# ---------------------------------------------------------------------------
# characteristic-plane maps


def _invert_monotone(F, dF, seed, target, tol=ROOT_TOL, maxiter=80):
    """Solve F(t) = target on [0, 1] for increasing F with F(0)=0, F(1)=1.

    Safeguarded Newton: the bracket shrinks every step and bisection takes
    over whenever a Newton step leaves it.
    """
    target = np.asarray(target, dtype=float)
    t = np.clip(seed(target), 0.0, 1.0)
    lo = np.zeros_like(target)
    hi = np.ones_like(target)
    for _ in range(maxiter):
        r = F(t) - target
        lo = np.where(r < 0.0, t, lo)
        hi = np.where(r > 0.0, t, hi)
        d = dF(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(d > 0.0, r / d, np.nan)
        new = t - step
        bad = ~np.isfinite(new) | (new <= lo) | (new >= hi)
        new = np.where(bad, 0.5 * (lo + hi), new)
        done = (np.abs(new - t) <= tol) | (r == 0.0)
        t = np.where(r == 0.0, t, new)
        if np.all(done):
            break
    else:
        raise NoIntersection("monotone inversion did not converge")
    return t


@dataclass(frozen=True, eq=False)
class CharMaps:
    """Bounding curve of one piece as maps in its local chart.

    ``upsilon`` sends p to the q of the curve point with that p; ``rho`` is
    its inverse. Both are strictly increasing maps of [0, 1] onto itself.
    """

    curve: TypeChangeCurve
    _seed_p: PchipInterpolator = field(repr=False)
    _seed_q: PchipInterpolator = field(repr=False)

    @property
    def chart(self) -> Chart:
        return CHARTS[self.curve.index]

    def t_of_p(self, p):
        g, dg = self.curve.bulge, self.curve.bulge_prime
        return _invert_monotone(lambda t: t - g(t), lambda t: 1.0 - dg(t), self._seed_p, p)

    def t_of_q(self, q):
        g, dg = self.curve.bulge, self.curve.bulge_prime
        return _invert_monotone(lambda t: t + g(t), lambda t: 1.0 + dg(t), self._seed_q, q)

    def upsilon(self, p):
        p = _check_unit(p)
        t = self.t_of_p(p)
        return t + self.curve.bulge(t)

    def rho(self, q):
        q = _check_unit(q)
        t = self.t_of_q(q)
        return t - self.curve.bulge(t)


def _check_unit(s):
    s = np.asarray(s, dtype=float)
    if np.any(s < -ROOT_TOL) or np.any(s > 1.0 + ROOT_TOL):
        raise NoIntersection("characteristic parameter outside [0, 1]")
    return np.clip(s, 0.0, 1.0)


def build_char_maps(curve: TypeChangeCurve) -> CharMaps:
    t, gamma = curve.samples[:, 0], curve.samples[:, 1] - curve.base
    lo, hi = t - gamma, t + gamma
    if np.any(np.diff(lo) <= 0.0) or np.any(np.diff(hi) <= 0.0):
        raise NonMonotone(f"characteristic image of gamma{curve.index} is not strictly monotone")
    # monotone interpolants of the sampled image seed the Newton polish
    return CharMaps(curve, PchipInterpolator(lo, t), PchipInterpolator(hi, t))


def affix(i: int, t: float, starred: bool, maps: CharMaps) -> Point:
    """Intersection of gamma_i with the characteristic through line parameter t.

    Unstarred: x-y=t (i=1), y-x=t (i=2), x+y=1+t (i=3).
    Starred:   x+y=t (i=1), x+y=t (i=2), x-y=1-t (i=3).
    """
    if maps.curve.index != i:
        raise ValueError(f"maps belong to curve {maps.curve.index}, not {i}")
    p, q = affix_local(t, starred, maps)
    x, y = maps.chart.to_xy(p, q)
    return Point(float(x), float(y))


def affix_local(t, starred: bool, maps: CharMaps):
    """Local (p, q) of the affix; vectorised over t."""
    t = _check_unit(t)
    if starred:
        return t, maps.upsilon(t)
    return maps.rho(t), t


# ---------------------------------------------------------------------------
# classification

_EDGE_TOL = 1e-12


def classify_xy(x, y, curves) -> np.ndarray:
    """Vectorised labels (``SubdomainId`` values) for arrays of points.

    Points on a bounding curve belong to their piece; the top edge y=1
    belongs to Omega0; AB, AD and BC (closed) are interfaces.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    by_index = {c.index: c for c in curves}
    out = np.full(np.broadcast(x, y).shape, int(SubdomainId.OUTSIDE))
    x, y = np.broadcast_arrays(x, y)

    in_x = (x >= -_EDGE_TOL) & (x <= 1.0 + _EDGE_TOL)
    in_y = (y >= -_EDGE_TOL) & (y <= 1.0 + _EDGE_TOL)
    square = in_x & in_y
    on_line = square & ((np.abs(y) <= _EDGE_TOL) | (np.abs(x) <= _EDGE_TOL) | (np.abs(x - 1.0) <= _EDGE_TOL))
    out[square] = int(SubdomainId.OMEGA0)
    out[on_line] = int(SubdomainId.INTERFACE)

    pieces = (
        (1, in_x & (y < -_EDGE_TOL), x, -y),
        (2, in_y & (x < -_EDGE_TOL), y, -x),
        (3, in_y & (x > 1.0 + _EDGE_TOL), y, x - 1.0),
    )
    for index, mask, t, dist in pieces:
        if not np.any(mask):
            continue
        g = by_index[index].bulge(np.clip(t[mask], 0.0, 1.0))
        inside = dist[mask] <= g + _EDGE_TOL
        sub = np.where(inside, index, int(SubdomainId.OUTSIDE))
        out[mask] = sub
    return out


def classify(p: Point, curves) -> SubdomainId:
    return SubdomainId(int(classify_xy(p.x, p.y, curves)))


def in_mixed_hull(x, y, tol: float = 1e-12) -> np.ndarray:
    """True inside the square or one of the three characteristic triangles.

    This is the largest region any admissible curves can enclose, so it is
    where a source term must be defined.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sq = (x >= -tol) & (x <= 1 + tol) & (y >= -tol) & (y <= 1 + tol)
    t1 = (y <= tol) & (x + y >= -tol) & (x - y <= 1 + tol)
    t2 = (x <= tol) & (x + y >= -tol) & (y - x <= 1 + tol)
    t3 = (x >= 1 - tol) & (x - y <= 1 + tol) & (x + y <= 2 + tol)
    return sq | t1 | t2 | t3
