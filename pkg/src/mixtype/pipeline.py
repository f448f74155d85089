"""Full solve in construction order, the global evaluator, and verification.

Order of the solve: characteristic maps, A1, tau1 on AB, A2 and A3, the
Volterra right-hand sides, tau2' and tau3', tau2 and tau3 anchored at the
shared vertices A and B, and finally nu on every line.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import backend
from .errors import OutOfRegion
from .geometry import (
    CHARTS,
    CharMaps,
    Point,
    SubdomainId,
    TypeChangeCurve,
    build_char_maps,
    classify_xy,
)
from .hyperbolic import (
    SOURCE_CONVENTION,
    compute_A,
    dalembert_grad_local,
    dalembert_u_local,
    gl_order,
)
from .parabolic import DEFAULT_KERNEL, KernelConfig, heat_u, heat_ux_boundary
from .source import SourceTerm
from .traces import (
    MIN_M,
    Sigma,
    VolterraGrid,
    build_E_nodes,
    integrate_deriv,
    recover_nu,
    solve_tau1,
    solve_volterra,
)
from .tracefn import TraceFn

# residuals at or below this are roundoff and get no convergence order
FLOOR = 1e-10
GROUPS = ("pde", "nonlocal", "vertex", "jump_u", "jump_grad")


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    sigma: Sigma
    curves: tuple
    source: SourceTerm
    grid_M: int = 256
    kernel: KernelConfig = DEFAULT_KERNEL
    quad_tol: float = 1e-10

    def __post_init__(self):
        curves = tuple(self.curves)
        if [c.index for c in curves] != [1, 2, 3]:
            raise ValueError("curves must be the three bounding curves in order 1, 2, 3")
        object.__setattr__(self, "curves", curves)
        if self.grid_M < MIN_M:
            raise ValueError(f"grid_M must be at least {MIN_M}")
        if not self.quad_tol > 0:
            raise ValueError("quad_tol must be positive")

    def with_M(self, M: int) -> "ProblemSpec":
        return replace(self, grid_M=int(M))

    @classmethod
    def bumps(cls, sigma, source, c=0.25, M=256, **kw) -> "ProblemSpec":
        if not isinstance(sigma, Sigma):
            sigma = Sigma(*sigma)
        curves = tuple(TypeChangeCurve.bump(i, c) for i in (1, 2, 3))
        return cls(sigma, curves, source, M, **kw)


# ---------------------------------------------------------------------------
# solution


@dataclass(frozen=True, eq=False)
class Solution:
    spec: ProblemSpec
    maps: dict
    tau: dict
    nu: dict
    volterra: VolterraGrid | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def traces(self) -> dict:
        out = {f"tau{i}": self.tau[i] for i in (1, 2, 3)}
        out.update({f"nu{i}": self.nu[i] for i in (1, 2, 3)})
        return out

    @property
    def order(self) -> int:
        return gl_order(self.spec.quad_tol)

    def evaluate(self, p: Point) -> float:
        return float(self.evaluate_xy(np.array([p.x]), np.array([p.y]))[0])

    def evaluate_xy(self, x, y) -> np.ndarray:
        """u at arrays of points; raises OutOfRegion for points outside the domain."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        x, y = np.broadcast_arrays(x, y)
        labels = classify_xy(x, y, self.spec.curves)
        if np.any(labels == SubdomainId.OUTSIDE):
            raise OutOfRegion("some points lie outside the mixed domain")
        out = np.empty(x.shape)
        for i in (1, 2, 3):
            m = labels == i
            if np.any(m):
                p, q = CHARTS[i].to_local(x[m], y[m])
                out[m] = dalembert_u_local(i, self.tau[i], self.nu[i], self.spec.source, p, q, self.order)
        m = labels == SubdomainId.INTERFACE
        if np.any(m):
            out[m] = self._on_lines(x[m], y[m])
        for k in np.flatnonzero(labels == SubdomainId.OMEGA0):
            out.flat[k] = self.heat(x.flat[k], y.flat[k])
        return out

    def _on_lines(self, x, y):
        out = np.empty(x.shape)
        on_ab = np.abs(y) <= 1e-12
        on_ad = ~on_ab & (np.abs(x) <= 1e-12)
        on_bc = ~on_ab & ~on_ad
        out[on_ab] = self.tau[1](np.clip(x[on_ab], 0.0, 1.0))
        out[on_ad] = self.tau[2](np.clip(y[on_ad], 0.0, 1.0))
        out[on_bc] = self.tau[3](np.clip(y[on_bc], 0.0, 1.0))
        return out

    def heat(self, x, y) -> float:
        return heat_u(Point(x, y), self.tau[1], self.tau[2], self.tau[3], self.spec.source, self.spec.kernel)

    def heat_flux(self, side, y) -> float:
        return heat_ux_boundary(side, y, self.tau[1], self.tau[2], self.tau[3], self.spec.source, self.spec.kernel)

    def perturbed(self, name: str, factor: float) -> "Solution":
        """Copy with one trace scaled, for negative controls."""
        kind, i = name[:-1], int(name[-1])
        tau, nu = dict(self.tau), dict(self.nu)
        target = tau if kind == "tau" else nu
        target[i] = target[i].scaled(factor)
        meta = dict(self.metadata, perturbed={"trace": name, "factor": factor})
        return replace(self, tau=tau, nu=nu, volterra=None, metadata=meta)


def _A_funcs(spec: ProblemSpec, maps):
    n = gl_order(spec.quad_tol)
    s = spec.sigma.as_tuple()
    return {i: (lambda t, i=i: compute_A(i, t, s[i - 1], spec.source, maps[i], n)) for i in (1, 2, 3)}


def _metadata(spec: ProblemSpec) -> dict:
    return {
        "grid_M": spec.grid_M,
        "quad_tol": spec.quad_tol,
        "gl_order": gl_order(spec.quad_tol),
        "kernel": {"series_tol": spec.kernel.series_tol, "n_cap": spec.kernel.n_cap, "min_dt": spec.kernel.min_dt},
        "sigma": list(spec.sigma.as_tuple()),
        "source": spec.source.description or spec.source.kind,
        "source_smoothness_claim": spec.source.smoothness_claim,
        "curves": [{"index": c.index, "kind": c.kind, **c.params} for c in spec.curves],
        "backend": backend.BACKEND,
        "conventions": {
            "hyperbolic_source": SOURCE_CONVENTION,
            "relations": {
                "AB": "(1-s1) tau1' - (1+s1) nu1 = A1, nu1 = u_y",
                "AD": "(1-s2) nu2 - (1+s2) tau2' = A2, nu2 = u_x",
                "BC": "(1+s3) tau3' + (1-s3) nu3 = A3, nu3 = u_x",
            },
            "volterra_rhs": "E1 = -A2/(1-s2) + U1(0) + U4(0), E2 = A3/(1-s3) - U1(1) - U4(1)",
            "neumann_kernel": "second image term uses x + x1 + 2n",
            "anchors": "tau2(0) = tau1(0) = 0, tau3(0) = tau1(1) = 0",
        },
    }


def solve(spec: ProblemSpec) -> Solution:
    M = spec.grid_M
    maps = {c.index: build_char_maps(c) for c in spec.curves}
    A = _A_funcs(spec, maps)
    sig = spec.sigma
    tau1 = solve_tau1(sig, spec.source, A[1], M)
    E1, E2 = build_E_nodes(M, sig, tau1, spec.source, A[2], A[3], spec.kernel)
    vg = solve_volterra(sig, E1, E2, spec.kernel, M)
    d2 = TraceFn(vg.tau2p_deriv)
    d3 = TraceFn(vg.tau3m_deriv)
    tau2 = integrate_deriv(d2, float(tau1(0.0)))
    tau3 = integrate_deriv(d3, float(tau1(1.0)))
    nu = {
        1: recover_nu(1, TraceFn(tau1.deriv_values), A[1], sig),
        2: recover_nu(2, d2, A[2], sig),
        3: recover_nu(3, d3, A[3], sig),
    }
    return Solution(spec, maps, {1: tau1, 2: tau2, 3: tau3}, nu, vg, _metadata(spec))


def solution_from_traces(spec: ProblemSpec, rows: dict) -> Solution:
    """Rebuild a Solution from sampled (tau, nu) per line.

    ``rows`` maps 1, 2, 3 to (tau_values, nu_values) on the uniform grid; the
    slopes of tau are recovered from the functional relations.
    """
    maps = {c.index: build_char_maps(c) for c in spec.curves}
    A = _A_funcs(spec, maps)
    s1, s2, s3 = spec.sigma.as_tuple()
    tau, nu = {}, {}
    for i in (1, 2, 3):
        tv, nv = (np.asarray(v, dtype=float) for v in rows[i])
        grid = np.linspace(0.0, 1.0, tv.size)
        a = np.asarray(A[i](grid), dtype=float)
        if i == 1:
            slope = (a + (1.0 + s1) * nv) / (1.0 - s1)
        elif i == 2:
            slope = ((1.0 - s2) * nv - a) / (1.0 + s2)
        else:
            slope = (a - (1.0 - s3) * nv) / (1.0 + s3)
        tau[i] = TraceFn(tv, slope) if i == 1 else TraceFn(slope).antiderivative(float(tv[0]))
        nu[i] = TraceFn(nv)
    return Solution(spec, maps, tau, nu, None, _metadata(spec))


# ---------------------------------------------------------------------------
# residual report


@dataclass
class ResidualReport:
    pde_residual: dict
    nonlocal_residual: dict
    vertex_residual: dict
    interface_jump: dict
    eoc: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def groups(self) -> dict:
        """Headline number per residual family."""
        return {
            "pde": max(v["max"] for v in self.pde_residual.values()),
            "nonlocal": max(self.nonlocal_residual.values()),
            "vertex": max(self.vertex_residual.values()),
            "jump_u": max(v["u"] for v in self.interface_jump.values()),
            "jump_grad": max(v["grad"] for v in self.interface_jump.values()),
        }

    def residual_max(self) -> float:
        return max(self.groups().values())

    def is_valid(self) -> bool:
        vals = list(self.groups().values())
        vals += [v["l2"] for v in self.pde_residual.values()]
        return all(math.isfinite(v) and v >= 0.0 for v in vals)

    def to_dict(self) -> dict:
        return {
            "pde_residual": self.pde_residual,
            "nonlocal_residual": self.nonlocal_residual,
            "vertex_residual": self.vertex_residual,
            "interface_jump": self.interface_jump,
            "eoc": self.eoc,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ResidualReport":
        return cls(
            d["pde_residual"],
            d["nonlocal_residual"],
            d["vertex_residual"],
            d["interface_jump"],
            d.get("eoc", {}),
            d.get("metadata", {}),
        )

    def to_json(self) -> str:
        # repr-based float output keeps the round trip exact
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ResidualReport":
        return cls.from_dict(json.loads(text))


def _stats(r):
    r = np.abs(np.asarray(r, dtype=float))
    if r.size == 0:
        return {"max": 0.0, "l2": 0.0, "count": 0}
    return {"max": float(r.max()), "l2": float(np.sqrt(np.mean(r * r))), "count": int(r.size)}


def _pde_omega0(sol: Solution, probe_M: int, h: float):
    pts = np.arange(2, probe_M - 1) / probe_M
    f = sol.spec.source
    res = []
    for x in pts:
        for y in pts:
            u = sol.heat(x, y)
            uxx = (sol.heat(x + h, y) - 2.0 * u + sol.heat(x - h, y)) / (h * h)
            uy = (sol.heat(x, y + h) - sol.heat(x, y - h)) / (2.0 * h)
            res.append(uxx - uy - float(f(x, y)))
    return res


_THETAS = (0.25, 0.5, 0.75)


def _pde_hyperbolic(sol: Solution, i: int, probe_M: int, h: float):
    """4 u_xi_eta - f by the mixed difference along the characteristics."""
    curve = sol.spec.curves[i - 1]
    chart = CHARTS[i]
    f = sol.spec.source
    t = np.arange(2, probe_M - 1) / probe_M
    g = curve.bulge(t)
    res = []
    for tk, gk in zip(t, g):
        for th in _THETAS:
            hk = min(h, 0.5 * min(th, 1.0 - th) * gk)
            p, q = tk - th * gk, tk + th * gk
            # corners of the (xi, eta) stencil, in local coordinates
            x, y = chart.to_xy(p, q)
            xi, eta = x + y, x - y
            corners = [(xi + a * hk, eta + b * hk, a * b) for a in (-1, 1) for b in (-1, 1)]
            cx = np.array([0.5 * (c[0] + c[1]) for c in corners])
            cy = np.array([0.5 * (c[0] - c[1]) for c in corners])
            if np.any(classify_xy(cx, cy, sol.spec.curves) != i):
                continue
            lp, lq = chart.to_local(cx, cy)
            u = dalembert_u_local(i, sol.tau[i], sol.nu[i], f, lp, lq, sol.order)
            signs = np.array([c[2] for c in corners], dtype=float)
            mixed = float(np.dot(signs, u)) / (4.0 * hk * hk)
            res.append(4.0 * mixed - float(f(x, y)))
    return res


def nonlocal_residuals(sol: Solution, n: int = 101) -> dict:
    """Violations of the three nonlocal conditions at n affix pairs."""
    t = np.linspace(0.0, 1.0, n)
    s = sol.spec.sigma.as_tuple()
    out = {}
    for i, key in zip((1, 2, 3), ("eq2", "eq3", "eq4")):
        maps: CharMaps = sol.maps[i]
        chart = CHARTS[i]
        grads = []
        for p, q in ((maps.rho(t), t), (t, maps.upsilon(t))):
            u_p, u_q = dalembert_grad_local(i, sol.tau[i], sol.nu[i], sol.spec.source, p, q, sol.order)
            grads.append(chart.grad_to_char(u_p, u_q))
        (xi_a, eta_a), (xi_b, eta_b) = grads
        # u_x + u_y = 2 u_xi, u_x - u_y = 2 u_eta
        if i in (1, 2):
            r = 2.0 * eta_a - s[i - 1] * 2.0 * xi_b
        else:
            r = 2.0 * xi_a - s[i - 1] * 2.0 * eta_b
        out[key] = float(np.max(np.abs(r)))
    return out


# one-sided offset for interface limits; far below the corner layer scale
JUMP_OFFSET = 1e-5


def _limit(u1, u2, u3):
    """u(0) from u(d), u(2d), u(3d), third order."""
    return 3.0 * u1 - 3.0 * u2 + u3


def _slope(u0, u1, u2, u3, d):
    """u'(0) from u(0), u(d), u(2d), u(3d), third order."""
    return (-11.0 * u0 + 18.0 * u1 - 9.0 * u2 + 2.0 * u3) / (6.0 * d)


def _jumps(sol: Solution, probe_M: int, d: float = JUMP_OFFSET) -> dict:
    k = np.arange(1, probe_M) / probe_M
    ab_u, ab_g = [], []
    for x in k:
        u1, u2, u3 = (sol.heat(x, j * d) for j in (1, 2, 3))
        t0 = float(sol.tau[1](x))
        ab_u.append(_limit(u1, u2, u3) - t0)
        ab_g.append(_slope(t0, u1, u2, u3, d) - float(sol.nu[1](x)))
    out = {"AB": {"u": _stats(ab_u)["max"], "grad": _stats(ab_g)["max"]}}
    for name, side, i in (("AD", 0, 2), ("BC", 1, 3)):
        ju, jg = [], []
        for y in k:
            xs = [j * d if side == 0 else 1.0 - j * d for j in (1, 2, 3)]
            ju.append(_limit(*(sol.heat(x, y) for x in xs)) - float(sol.tau[i](y)))
            jg.append(sol.heat_flux(side, y) - float(sol.nu[i](y)))
        out[name] = {"u": _stats(ju)["max"], "grad": _stats(jg)["max"]}
    return out


def verify(sol: Solution, spec: ProblemSpec | None = None, probe_M: int = 16) -> ResidualReport:
    """Residuals of the defining conditions on fixed probe sets.

    Finite-difference steps for the PDE residuals are 1/M for the solver's M,
    so they refine together with the solution; interface limits use a fixed
    offset ``JUMP_OFFSET`` well inside the smooth part of the heat solution.
    """
    spec = spec or sol.spec
    h = 1.0 / spec.grid_M
    pde = {"omega0": _stats(_pde_omega0(sol, probe_M, h))}
    for i in (1, 2, 3):
        pde[f"omega{i}"] = _stats(_pde_hyperbolic(sol, i, probe_M, h))
    vertex = {
        "A": abs(float(sol.evaluate(Point(0.0, 0.0)))),
        "B": abs(float(sol.evaluate(Point(1.0, 0.0)))),
    }
    meta = dict(sol.metadata, probe_M=probe_M, fd_step=h, jump_offset=JUMP_OFFSET, floor=FLOOR)
    return ResidualReport(pde, nonlocal_residuals(sol), vertex, _jumps(sol, probe_M), {}, meta)


# ---------------------------------------------------------------------------
# convergence


def eoc(r0: float, r1: float):
    """log2(r0 / r1), or None when the finer residual sits at roundoff."""
    if r1 <= FLOOR or r0 <= FLOOR:
        return None
    return math.log2(r0 / r1)


@dataclass
class ConvergenceRow:
    M: int
    report: ResidualReport
    residual_max: float
    eoc: float | None


def eoc_table(reports: list) -> list:
    """Per-group orders between consecutive reports: list of dicts."""
    out = []
    for a, b in zip(reports[:-1], reports[1:]):
        ga, gb = a.groups(), b.groups()
        out.append({k: eoc(ga[k], gb[k]) for k in GROUPS})
    return out


def convergence_study(spec: ProblemSpec, levels, probe_M: int = 16, solutions: list | None = None) -> list:
    levels = [int(m) for m in levels]
    if len(levels) < 3:
        raise ValueError("a convergence study needs at least 3 levels")
    if any(b <= a for a, b in zip(levels[:-1], levels[1:])):
        raise ValueError("levels must increase strictly")
    rows = []
    prev = None
    for k, M in enumerate(levels):
        sol = solutions[k] if solutions is not None else solve(spec.with_M(M))
        rep = verify(sol, spec.with_M(M), probe_M)
        rmax = rep.residual_max()
        order = None if prev is None else eoc(prev.residual_max, rmax)
        if prev is not None:
            rep.eoc = {k2: v for k2, v in eoc_table([prev.report, rep])[0].items()}
        row = ConvergenceRow(M, rep, rmax, order)
        rows.append(row)
        prev = row
    return rows
