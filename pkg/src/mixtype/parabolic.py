"""Strip heat kernels and the first-boundary-problem representation in Omega0.

In Omega0 the operator is u_xx - u_y = f. With K(z, s) = exp(-z^2/4s) / (2 sqrt(pi s))
the Dirichlet and Neumann image kernels of the strip 0 < x < 1 are

    G = sum_n K(x - x1 + 2n, s) - K(x + x1 + 2n, s),
    N = sum_n K(x - x1 + 2n, s) + K(x + x1 + 2n, s),     s = y - y1,

and G_x = -N_x1, G_x1x = N_y1. The representation is

    u = int tau1 G(., x1, 0) + int tau2 G_x1(., 0, y1) - int tau3 G_x1(., 1, y1) - iint f G.

Time integrals are taken in r = sqrt(y - y1), which turns the (y - y1)^(-1/2)
behaviour of every kernel into a smooth integrand for Gauss-Legendre panels.
The side integrals are integrated by parts onto tau2', tau3' so that the
layer kernel is the bounded erfc sum of ``backend.erfc_layer``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from ._kernels_numpy import G as _G
from ._kernels_numpy import GX as _GX
from ._kernels_numpy import GX1 as _GX1
from ._kernels_numpy import N as _N
from .errors import InvalidTime, OutOfRegion
from .geometry import Point
from .quadrature import gauss_legendre, panel_rule
from .source import SourceTerm
from .tracefn import TraceFn

_NODES = 8
_REACH = 6


@dataclass(frozen=True)
class KernelConfig:
    series_tol: float = 1e-12
    n_cap: int = 32
    # below this y - y1 the kernel is evaluated at min_dt (its limiting rule)
    min_dt: float = 1e-12

    def __post_init__(self):
        if not self.series_tol > 0:
            raise ValueError("series_tol must be positive")
        if self.n_cap < 4:
            raise ValueError("n_cap must be at least 4")
        if self.min_dt < 0:
            raise ValueError("min_dt must be nonnegative")


DEFAULT_KERNEL = KernelConfig()


def _kernel(kind, x, y, x1, y1, cfg: KernelConfig):
    dt = np.asarray(y, dtype=float) - np.asarray(y1, dtype=float)
    if np.any(dt <= 0.0):
        raise InvalidTime("kernel needs y1 < y")
    s = np.maximum(dt, cfg.min_dt)
    return backend.image_sum(kind, x, x1, s, cfg.n_cap, cfg.series_tol)


def green_G(x, y, x1, y1, cfg: KernelConfig = DEFAULT_KERNEL):
    return _kernel(_G, x, y, x1, y1, cfg)


def kernel_N(x, y, x1, y1, cfg: KernelConfig = DEFAULT_KERNEL):
    return _kernel(_N, x, y, x1, y1, cfg)


def green_Gx(x, y, x1, y1, cfg: KernelConfig = DEFAULT_KERNEL):
    return _kernel(_GX, x, y, x1, y1, cfg)


def green_Gx1(x, y, x1, y1, cfg: KernelConfig = DEFAULT_KERNEL):
    return _kernel(_GX1, x, y, x1, y1, cfg)


def kernel_N_scaled(x, x1, s, cfg: KernelConfig = DEFAULT_KERNEL):
    """sqrt(s) N(x, y; x1, y - s), with its finite limit at s = 0."""
    s = np.asarray(s, dtype=float)
    pos = np.maximum(s, cfg.min_dt)
    out = np.sqrt(pos) * backend.image_sum(_N, x, x1, pos, cfg.n_cap, cfg.series_tol)
    if np.any(s == 0.0):
        same = np.broadcast_to(np.asarray(x) == np.asarray(x1), out.shape)
        limit = np.where(same, 1.0 / np.sqrt(np.pi), 0.0)
        out = np.where(s == 0.0, limit, out)
    return out


# ---------------------------------------------------------------------------
# quadrature building blocks


def _space_rule(x, y, knots):
    """Panels over [0, 1] for a kernel of width ~ 2 sqrt(y) centred at x."""
    w = 2.0 * np.sqrt(y)
    k = np.arange(-_REACH, _REACH + 1)
    breaks = np.concatenate((knots, np.clip(x + w * k, 0.0, 1.0)))
    return panel_rule(breaks, _NODES)


def _r_breaks(y, knots, scales):
    R = np.sqrt(y)
    parts = [np.array([0.0, R]), R * np.linspace(0.0, 1.0, 5)]
    if knots is not None:
        below = knots[knots < y]
        parts.append(np.sqrt(y - below))
    for d in scales:
        if d > 0.0:
            parts.append(d * 2.0 ** np.arange(-4, 4))
    b = np.concatenate(parts)
    return b[(b >= 0.0) & (b <= R)]


def time_convolution(phi, kern, y, knots=None, scales=()):
    """int_0^y phi(y1) kern(y - y1) dy1 in the variable r = sqrt(y - y1).

    ``kern`` may behave like s^(-1/2) at s = 0; ``scales`` are lengths d at
    which kern(r^2) changes character (an erfc layer at r ~ d / 2), used to
    grade the r panels.
    """
    if y <= 0.0:
        return 0.0
    r, w = panel_rule(_r_breaks(y, knots, scales), _NODES)
    s = r * r
    return float(np.sum(w * 2.0 * r * phi(y - s) * kern(s)))


def source_potential(kind, source: SourceTerm, x, y, cfg: KernelConfig = DEFAULT_KERNEL):
    """int_0^y ds int_0^1 f(x1, y - s) K_kind(x, y; x1, y - s) dx1."""
    if source.is_zero or y <= 0.0:
        return 0.0
    r, wr = panel_rule(_r_breaks(y, None, (x, 1.0 - x)), _NODES)
    # per-r inner panels of width 2r about x; clipped duplicates give zero weight
    k = np.arange(-_REACH, _REACH + 1)
    breaks = np.clip(x + 2.0 * r[:, None] * k[None, :], 0.0, 1.0)
    breaks = np.concatenate((np.zeros((r.size, 1)), breaks, np.ones((r.size, 1))), axis=1)
    breaks.sort(axis=1)
    lo, hi = breaks[:, :-1], breaks[:, 1:]
    t, wt = gauss_legendre(_NODES)
    width = (hi - lo)[..., None]
    x1 = lo[..., None] + width * t
    w1 = width * wt
    s = (r * r)[:, None, None]
    vals = source(x1, y - s) * backend.image_sum(kind, x, x1, s, cfg.n_cap, cfg.series_tol)
    inner = np.sum(vals * w1, axis=(1, 2))
    return float(np.sum(wr * 2.0 * r * inner))


# ---------------------------------------------------------------------------
# representation


def _check_point(x, y):
    if not (-1e-12 <= x <= 1.0 + 1e-12) or not (0.0 < y <= 1.0 + 1e-12):
        raise OutOfRegion(f"({x:g}, {y:g}) is not in the parabolic piece with y > 0")


def heat_u(p: Point, tau1: TraceFn, tau2: TraceFn, tau3: TraceFn, source: SourceTerm, cfg: KernelConfig = DEFAULT_KERNEL) -> float:
    """Value of the representation at p; the side traces are returned on x = 0, 1."""
    x, y = float(p.x), float(p.y)
    _check_point(x, y)
    if x <= 0.0:
        return float(tau2(y))
    if x >= 1.0:
        return float(tau3(y))
    x1, w1 = _space_rule(x, y, tau1.grid)
    total = float(np.sum(w1 * tau1(x1) * green_G(x, y, x1, 0.0, cfg)))

    def layer(z):
        return lambda s: backend.erfc_layer(z, s, cfg.n_cap, cfg.series_tol)

    total += float(tau2(0.0)) * float(layer(x)(y))
    total += time_convolution(tau2.derivative, layer(x), y, tau2.grid, (x,))
    total -= float(tau3(0.0)) * float(layer(x - 1.0)(y))
    total -= time_convolution(tau3.derivative, layer(x - 1.0), y, tau3.grid, (1.0 - x,))
    total -= source_potential(_G, source, x, y, cfg)
    return total


def flux_parts(side: int, y: float, tau1: TraceFn, source: SourceTerm, cfg: KernelConfig = DEFAULT_KERNEL):
    """The tau1 and source parts (U1, U4) of u_x on x = side."""
    xb = float(side)
    if y <= 0.0:
        raise InvalidTime("boundary flux needs y > 0")
    x1, w1 = _space_rule(xb, y, tau1.grid)
    U1 = float(np.sum(w1 * tau1.derivative(x1) * kernel_N(xb, y, x1, 0.0, cfg)))
    U1 += float(tau1(0.0) * kernel_N(xb, y, 0.0, 0.0, cfg) - tau1(1.0) * kernel_N(xb, y, 1.0, 0.0, cfg))
    U4 = -source_potential(_GX, source, xb, y, cfg)
    return U1, U4


def heat_ux_boundary(side: int, y: float, tau1: TraceFn, tau2: TraceFn, tau3: TraceFn, source: SourceTerm, cfg: KernelConfig = DEFAULT_KERNEL) -> float:
    """u_x(side, y) of the representation, from its integrated-by-parts N form."""
    if side not in (0, 1):
        raise ValueError("side must be 0 or 1")
    if not y > 0.0:
        raise InvalidTime("boundary flux needs y > 0")
    xb = float(side)
    U1, U4 = flux_parts(side, y, tau1, source, cfg)

    def n_from(x1):
        return lambda s: kernel_N(xb, s, x1, 0.0, cfg)

    U2 = -float(tau2(0.0) * kernel_N(xb, y, 0.0, 0.0, cfg))
    U2 -= time_convolution(tau2.derivative, n_from(0.0), y, tau2.grid, (xb,))
    U3 = float(tau3(0.0) * kernel_N(xb, y, 1.0, 0.0, cfg))
    U3 += time_convolution(tau3.derivative, n_from(1.0), y, tau3.grid, (1.0 - xb,))
    return U1 + U2 + U3 + U4
