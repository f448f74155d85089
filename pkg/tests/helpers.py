"""Shared fixtures-by-function for the test modules (cached across modules)."""

from functools import lru_cache

import numpy as np

from mixtype import ProblemSpec, SourceTerm, TypeChangeCurve, solve
from mixtype.geometry import CHARTS, build_char_maps

LEVELS = (64, 128, 256)


def bump_curves(c=0.25):
    return tuple(TypeChangeCurve.bump(i, c) for i in (1, 2, 3))


@lru_cache(maxsize=None)
def maps_for(c=0.25):
    return {cv.index: build_char_maps(cv) for cv in bump_curves(c)}


@lru_cache(maxsize=None)
def constant_source_solution(M):
    spec = ProblemSpec.bumps((0.0, 0.0, 0.0), SourceTerm.constant(1.0), M=M)
    return solve(spec)


@lru_cache(maxsize=None)
def zero_solution(M=256, sigma=(0.3, -0.4, 0.5)):
    spec = ProblemSpec.bumps(sigma, SourceTerm.zero(), M=M)
    return solve(spec)


def sweep_points(curves, n=51):
    """n x n probes per subdomain, generated in each piece's own coordinates.

    Omega0 gets the closed square; each wave piece gets points (t, theta)
    with theta in [0, 1] the fraction of the bulge at line parameter t.
    """
    s = np.linspace(0.0, 1.0, n)
    X, Y = np.meshgrid(s, s, indexing="ij")
    out = {0: (X.ravel(), Y.ravel())}
    for cv in curves:
        T, TH = np.meshgrid(s, s, indexing="ij")
        g = cv.bulge(T.ravel()) * TH.ravel()
        p, q = T.ravel() - g, T.ravel() + g
        x, y = CHARTS[cv.index].to_xy(p, q)
        out[cv.index] = (x, y)
    return out
