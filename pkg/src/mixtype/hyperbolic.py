"""D'Alembert representations in the three wave pieces and the A_i builders.

Everything is written in the local chart (p, q) of ``geometry.Chart``, where
the piece's Cauchy problem reads u_pq = g with g = s * f / 4 and Cauchy data
tau, nu on the diagonal p = q:

    u(p, q) = (tau(p) + tau(q)) / 2 - (k/2) int_p^q nu - W(p, q),
    W(p, q) = int_p^q dp1 int_p1^q g(p1, q1) dq1.

Region 1 (chart (xi, eta)) is the textbook formula verbatim. In regions 2
and 3 the chart reflects eta, which flips the sign of the source double
integral relative to a literal (xi, eta) reading and evaluates f at the
reflected arguments; ``SOURCE_CONVENTION`` records this for reports.
"""

from __future__ import annotations

import numpy as np

from .errors import OutOfRegion
from .geometry import CHARTS, CharMaps, CharPoint
from .quadrature import gauss_legendre
from .source import SourceTerm
from .tracefn import TraceFn

__all__ = [
    "TraceFn",
    "SOURCE_CONVENTION",
    "char_to_local",
    "dalembert_u",
    "dalembert_u_local",
    "dalembert_grad",
    "dalembert_grad_local",
    "triangle_integral",
    "compute_A",
    "gl_order",
]

SOURCE_CONVENTION = {
    "region1": "u = D'Alembert part - int int f1(xi1, eta1) over xi <= xi1 <= eta1 <= eta",
    "region2": "source double integral enters with + sign, f1 evaluated at (xi1, -zeta1), zeta = -eta",
    "region3": "source double integral enters with + sign, f1 evaluated at (q1 + 1, 1 - p1), p = 1 - eta, q = xi - 1",
}

_TOL = 1e-12


def gl_order(quad_tol: float) -> int:
    """Fixed Gauss-Legendre order used for smooth source integrals."""
    if quad_tol >= 1e-8:
        return 16
    if quad_tol >= 1e-12:
        return 24
    return 32


def char_to_local(region: int, cp: CharPoint):
    xi, eta = cp.xi, cp.eta
    if region == 1:
        return xi, eta
    if region == 2:
        return xi, -eta
    if region == 3:
        return 1.0 - eta, xi - 1.0
    raise ValueError(f"region must be 1, 2 or 3, got {region}")


def _check_local(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    bad = (p < -_TOL) | (q > 1.0 + _TOL) | (p > q + _TOL)
    if np.any(bad):
        raise OutOfRegion("point outside the characteristic triangle of the piece")
    q = np.clip(q, 0.0, 1.0)
    p = np.clip(np.minimum(p, q), 0.0, 1.0)
    return p, q


def _g(region, source, p, q):
    x, y = CHARTS[region].to_xy(p, q)
    return CHARTS[region].source_sign * 0.25 * source(x, y)


def triangle_integral(region: int, source: SourceTerm, p, q, n: int = 24):
    """W(p, q) over the triangle p <= p1 <= q1 <= q, vectorised.

    Collapsed coordinates p1 = p + (q-p) a, q1 = p1 + (q-p1) b turn the
    triangle into the unit square with Jacobian (q-p)^2 (1-a).
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if source.is_zero:
        return np.zeros(np.broadcast(p, q).shape)
    t, w = gauss_legendre(n)
    L = (q - p)[..., None, None]
    p1 = p[..., None, None] + L * t[:, None]
    q1 = p1 + (q[..., None, None] - p1) * t[None, :]
    jac = L * L * (1.0 - t[:, None])
    vals = _g(region, source, p1, q1) * jac * w[:, None] * w[None, :]
    return vals.sum(axis=(-2, -1))


def _line_integrals(region, source, p, q, n):
    """(int_p^q g(p, q1) dq1, int_p^q g(p1, q) dp1), vectorised."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if source.is_zero:
        z = np.zeros(np.broadcast(p, q).shape)
        return z, z
    t, w = gauss_legendre(n)
    L = (q - p)[..., None]
    along_q = p[..., None] + L * t
    gp = (_g(region, source, p[..., None], along_q) * w).sum(axis=-1) * L[..., 0]
    gq = (_g(region, source, along_q, q[..., None]) * w).sum(axis=-1) * L[..., 0]
    return gp, gq


def dalembert_u_local(region: int, tau: TraceFn, nu: TraceFn, source: SourceTerm, p, q, n: int = 24):
    p, q = _check_local(p, q)
    k = CHARTS[region].nu_sign
    hom = 0.5 * (tau(p) + tau(q)) - 0.5 * k * nu.integral(p, q)
    return hom - triangle_integral(region, source, p, q, n)


def dalembert_grad_local(region: int, tau: TraceFn, nu: TraceFn, source: SourceTerm, p, q, n: int = 24):
    """(u_p, u_q) of the representation, by differentiating it analytically."""
    p, q = _check_local(p, q)
    k = CHARTS[region].nu_sign
    along_q, along_p = _line_integrals(region, source, p, q, n)
    u_p = 0.5 * tau.derivative(p) + 0.5 * k * nu(p) + along_q
    u_q = 0.5 * tau.derivative(q) - 0.5 * k * nu(q) - along_p
    return u_p, u_q


def dalembert_u(region: int, tau: TraceFn, nu: TraceFn, source: SourceTerm, cp: CharPoint, n: int = 24) -> float:
    p, q = char_to_local(region, cp)
    return float(dalembert_u_local(region, tau, nu, source, p, q, n))


def dalembert_grad(region: int, tau: TraceFn, nu: TraceFn, source: SourceTerm, cp: CharPoint, n: int = 24):
    """(u_xi, u_eta) at a characteristic point; u_x +- u_y = 2 u_xi, 2 u_eta."""
    p, q = char_to_local(region, cp)
    u_p, u_q = dalembert_grad_local(region, tau, nu, source, p, q, n)
    u_xi, u_eta = CHARTS[region].grad_to_char(u_p, u_q)
    return float(u_xi), float(u_eta)


# (sign on the sigma term, sign on the other term) of A_1, A_2, A_3
_A_SIGNS = {1: (1.0, 1.0), 2: (-1.0, 1.0), 3: (1.0, -1.0)}


def compute_A(i: int, t, sigma: float, source: SourceTerm, maps: CharMaps, n: int = 24):
    """Right-hand side of the functional relation on type-change line i.

    With f1 taken in the piece's chart,
    A_i(t) = 2 a sigma int_t^{upsilon(t)} f1(t, q1) dq1 + 2 b int_{rho(t)}^t f1(p1, t) dp1
    and (a, b) = (1, 1), (-1, 1), (1, -1) for i = 1, 2, 3.
    """
    if maps.curve.index != i:
        raise ValueError(f"maps belong to curve {maps.curve.index}, not {i}")
    t = np.asarray(t, dtype=float)
    if source.is_zero:
        return np.zeros_like(t)
    a, b = _A_SIGNS[i]
    chart = CHARTS[i]
    up = maps.upsilon(t)
    rh = maps.rho(t)
    # f1 = s * g in the chart; undo the chart sign so a, b carry all signs
    s = chart.source_sign
    along_q, _ = _line_integrals(i, source, t, up, n)
    _, along_p = _line_integrals(i, source, rh, t, n)
    return 2.0 * a * sigma * s * along_q + 2.0 * b * s * along_p
