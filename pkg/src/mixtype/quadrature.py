"""Gauss-Legendre panel rules and product-integration weights."""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point rule mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def panel_rule(breaks, n: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """Composite n-point rule over consecutive breakpoints.

    Breakpoints are sorted and de-duplicated; zero-length panels are dropped.
    """
    b = np.unique(np.asarray(breaks, dtype=np.float64))
    lo, hi = b[:-1], b[1:]
    keep = hi - lo > 0.0
    lo, hi = lo[keep], hi[keep]
    t, w = gauss_legendre(n)
    width = (hi - lo)[:, None]
    nodes = lo[:, None] + width * t[None, :]
    weights = width * w[None, :]
    return nodes.ravel(), weights.ravel()


def peak_breaks(center: float, width: float, lo: float, hi: float, reach: int = 6) -> np.ndarray:
    """Breakpoints of width ``width`` around ``center``, clipped to [lo, hi].

    Resolves Gaussian-type features of scale ``width`` without touching the
    flat remainder of the interval, which is covered by the end panels.
    """
    k = np.arange(-reach, reach + 1)
    pts = np.clip(center + width * k, lo, hi)
    return np.concatenate(([lo, hi], pts))


def geometric_breaks(anchor: float, scale: float, lo: float, hi: float, levels: int = 8) -> np.ndarray:
    """Breakpoints at anchor - scale * 4**j (j from -levels/2 up), inside [lo, hi].

    Grades panels toward ``anchor`` = ``hi`` for boundary-layer integrands of
    width ``scale`` at the upper end.
    """
    j = np.arange(-levels // 2, levels // 2 + 1)
    pts = anchor - scale * 4.0 ** j
    return pts[(pts > lo) & (pts < hi)]


def integrate(f, a: float, b: float, n: int = 20) -> float:
    """Fixed-order Gauss-Legendre integral of a vectorised ``f`` over [a, b]."""
    t, w = gauss_legendre(n)
    x = a + (b - a) * t
    return float((b - a) * np.dot(w, f(x)))


def abel_moments(m_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact moments of (m - theta)^(-1/2) against the two linear hat pieces.

    Returns arrays a, b indexed by m = 0..m_max (entry 0 unused):
    a[m] = int_0^1 (1 - theta) (m - theta)^(-1/2) dtheta,
    b[m] = int_0^1 theta (m - theta)^(-1/2) dtheta.
    """
    m = np.arange(m_max + 1, dtype=np.float64)
    a = np.zeros(m_max + 1)
    b = np.zeros(m_max + 1)
    mm = m[1:]
    r1 = np.sqrt(mm)
    r0 = np.sqrt(mm - 1.0)
    # rationalised differences of square roots keep large m accurate
    zeroth = 2.0 / (r1 + r0)
    three_halves = (3.0 * mm * mm - 3.0 * mm + 1.0) / (mm * r1 + (mm - 1.0) * r0)
    b[1:] = mm * zeroth - (2.0 / 3.0) * three_halves
    a[1:] = zeroth - b[1:]
    return a, b
