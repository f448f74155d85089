"""The eight acceptance criteria, one test each.

Every test prints a single ``[PASS]`` or ``[FAIL]`` line with the measured
numbers, visible in ``pytest -v`` output. Run this file directly with
``python tests/test_acceptance.py`` to get only the eight lines.
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.special import erf

sys.path.insert(0, str(Path(__file__).resolve().parent))

from helpers import LEVELS, constant_source_solution, sweep_points, zero_solution  # noqa: E402

from mixtype import Point, Sigma, SigmaInvalid, SourceTerm, TraceFn, TypeChangeCurve  # noqa: E402
from mixtype.geometry import CHARTS  # noqa: E402
from mixtype.hyperbolic import dalembert_u_local  # noqa: E402
from mixtype.parabolic import green_G, green_Gx, heat_u, heat_ux_boundary, kernel_N  # noqa: E402
from mixtype.pipeline import FLOOR, GROUPS, ProblemSpec, eoc, verify  # noqa: E402
from mixtype.traces import solve_tau1, solve_volterra  # noqa: E402

EOC_MIN = 0.8
NONLOCAL_MAX = 5e-3


def report_line(n, title, ok, detail, out=print):
    out(f"[{'PASS' if ok else 'FAIL'}] criterion {n} {title}: {detail}")


# ---------------------------------------------------------------------------
# criterion bodies: each returns (ok, detail)


def criterion_1():
    sol = zero_solution(256, (0.3, -0.4, 0.5))
    worst = {}
    for k, (x, y) in sweep_points(sol.spec.curves, 51).items():
        worst[k] = float(np.max(np.abs(sol.evaluate_xy(x, y))))
    m = max(worst.values())
    return m <= 1e-8, f"max |u| = {m:.2e} over 4 x 51 x 51 probes (bound 1e-8)"


def criterion_2():
    M = 256
    tau1 = TraceFn.sample(lambda x: np.sin(np.pi * x), M, lambda x: np.pi * np.cos(np.pi * x))
    zero = TraceFn.zeros(M)
    f0 = SourceTerm.zero()
    xs = np.linspace(0.05, 0.95, 19)
    ys = np.linspace(0.05, 1.0, 20)
    err_u = max(
        abs(heat_u(Point(x, y), tau1, zero, zero, f0) - np.exp(-np.pi**2 * y) * np.sin(np.pi * x)) for x in xs for y in ys
    )
    err_f = 0.0
    for y in ys:
        exact = np.pi * np.exp(-np.pi**2 * y)
        err_f = max(err_f, abs(heat_ux_boundary(0, y, tau1, zero, zero, f0) - exact))
        err_f = max(err_f, abs(heat_ux_boundary(1, y, tau1, zero, zero, f0) + exact))
    ok = err_u <= 1e-6 and err_f <= 1e-5
    return ok, f"field error {err_u:.2e} (bound 1e-6), flux error {err_f:.2e} (bound 1e-5)"


ABEL_KERNELS = (lambda s: np.full_like(s, 1 / np.sqrt(np.pi)), np.zeros_like, np.zeros_like, np.zeros_like)


def _abel_errors(phi, E):
    errs = []
    for M in LEVELS:
        vg = solve_volterra(Sigma(0.0, 0.0, 0.0), E, np.zeros_like, M=M, kernels=ABEL_KERNELS)
        errs.append(float(np.max(np.abs(vg.tau2p_deriv - phi(vg.nodes)))))
    return errs


def criterion_3():
    errs = _abel_errors(np.ones_like, lambda y: 1 + 2 * np.sqrt(y / np.pi))
    orders = [eoc(a, b) for a, b in zip(errs[:-1], errs[1:])]
    # the product-trapezoid rule is exact on this pair, so the order is not
    # measurable from it; the smooth pair phi = e^y exercises the same march
    comp = _abel_errors(np.exp, lambda y: np.exp(y) * (1 + erf(np.sqrt(y))))
    comp_orders = [eoc(a, b) for a, b in zip(comp[:-1], comp[1:])]
    exact = all(o is None for o in orders)
    order_ok = all(o is not None and o >= 1.3 for o in comp_orders) if exact else all(o >= 1.3 for o in orders)
    ok = errs[-1] <= 1e-3 and order_ok
    shown = ", ".join("na" if o is None else f"{o:.2f}" for o in orders)
    comp_shown = ", ".join(f"{o:.2f}" for o in comp_orders)
    return ok, (
        f"error at M=256 {errs[-1]:.1e} (bound 1e-3), eoc [{shown}]"
        f" (exact to roundoff); smooth pair e^y eoc [{comp_shown}] (bound 1.3)"
    )


def criterion_4():
    tau = solve_tau1(Sigma(0.0, 0.0, 0.0), SourceTerm.from_expr("2*x - 3"), lambda t: np.zeros_like(t), 256)
    x = tau.grid
    err = float(np.max(np.abs(tau.values - x * (1 - x))))
    ends = tau.values[0] == 0.0 and tau.values[-1] == 0.0
    return err <= 1e-8 and ends, f"max error {err:.1e} (bound 1e-8), endpoints exactly zero: {ends}"


def _trapezoid_triangle(f1, xi, eta, n=400):
    a = np.linspace(xi, eta, n)
    inner = np.array([np.trapezoid(f1(ak, np.linspace(ak, eta, n)), np.linspace(ak, eta, n)) for ak in a])
    return float(np.trapezoid(inner, a))


def criterion_5():
    curve = TypeChangeCurve.bump(1, 0.25)
    s = np.linspace(0.05, 0.95, 10)
    T, TH = (v.ravel() for v in np.meshgrid(s, s, indexing="ij"))
    g = curve.bulge(T) * TH
    p, q = T - g, T + g
    x, y = CHARTS[1].to_xy(p, q)
    tau = TraceFn.sample(lambda t: 2 * t * t, 64, lambda t: 4 * t)
    zero = TraceFn.zeros(64)
    u = dalembert_u_local(1, tau, zero, SourceTerm.zero(), p, q)
    err_q = float(np.max(np.abs(u - (2 * x * x + 2 * y * y))))
    one = SourceTerm.constant(1.0)
    err_b = 0.0
    for pk, qk in list(zip(p, q))[::11]:
        brute = _trapezoid_triangle(lambda a, b: 0.25 + 0.0 * b, pk, qk)
        val = float(dalembert_u_local(1, zero, zero, one, pk, qk))
        err_b = max(err_b, abs(val + brute))
    ok = err_q <= 1e-9 and err_b <= 1e-6
    return ok, f"quadratic data error {err_q:.1e} at 100 probes (bound 1e-9), f=1 vs 400x400 trapezoid {err_b:.1e} (bound 1e-6)"


def convergence_verdict(reports):
    """Criterion 6 applied to reports at LEVELS: (ok, detail)."""
    groups = [r.groups() for r in reports]
    bad = []
    cells = []
    for k in GROUPS:
        vals = [g[k] for g in groups]
        orders = [eoc(a, b) for a, b in zip(vals[:-1], vals[1:])]
        for a, b, o in zip(vals[:-1], vals[1:], orders):
            # a pair passes with eoc >= 0.8, or when the finer value is at roundoff
            if not (b <= FLOOR or (o is not None and o >= EOC_MIN)):
                bad.append(k)
        cells.append(f"{k} " + "/".join("na" if o is None else f"{o:.2f}" for o in orders))
    final_nl = groups[-1]["nonlocal"]
    if final_nl > NONLOCAL_MAX:
        bad.append("nonlocal bound")
    detail = "eoc " + ", ".join(cells) + f"; final nonlocal {final_nl:.1e} (bound {NONLOCAL_MAX:g})"
    return not bad, detail + (f"; failing: {sorted(set(bad))}" if bad else "")


_REPORTS = {}


def constant_source_reports():
    if not _REPORTS:
        for M in LEVELS:
            _REPORTS[M] = verify(constant_source_solution(M))
    return [_REPORTS[M] for M in LEVELS]


def criterion_6():
    return convergence_verdict(constant_source_reports())


def criterion_7():
    x = np.linspace(0, 1, 21)[:, None]
    s = np.geomspace(1e-4, 2.0, 25)[None, :]
    dirichlet = max(float(np.max(np.abs(green_G(x, 0.1 + s, x1, 0.1)))) for x1 in (0.0, 1.0))
    rng = np.random.default_rng(20240607)
    xs, x1s = rng.uniform(0, 1, (2, 50))
    y1 = rng.uniform(0, 0.5, 50)
    y = y1 + rng.uniform(0.01, 0.5, 50)
    h = 1e-5
    dN = (kernel_N(xs, y, x1s + h, y1) - kernel_N(xs, y, x1s - h, y1)) / (2 * h)
    ident = float(np.max(np.abs(green_Gx(xs, y, x1s, y1) + dN)))

    # the same check with both image terms centred on x - x1 must fail
    def n_verbatim(x1):
        k = np.arange(-30, 31)[:, None]
        K = lambda z, t: np.exp(-(z**2) / (4 * t)) / (2 * np.sqrt(np.pi * t))
        return np.sum(2 * K(xs - x1 + 2 * k, y - y1), axis=0)

    dV = (n_verbatim(x1s + h) - n_verbatim(x1s - h)) / (2 * h)
    verbatim = float(np.max(np.abs(green_Gx(xs, y, x1s, y1) + dV)))
    ok = dirichlet <= 1e-11 and ident <= 1e-6 and verbatim > 1e-3
    return ok, (
        f"Dirichlet vanishing {dirichlet:.1e} (bound 1e-11), |G_x + N_x1| {ident:.1e} at 50 tuples (bound 1e-6);"
        f" unrepaired N gives {verbatim:.1e}"
    )


def criterion_8():
    rejected = []
    for sig, name in (((0.0, 1.0, 0.0), "s2"), ((-1.0, 0.0, 0.0), "s1")):
        try:
            ProblemSpec.bumps(sig, SourceTerm.constant(1.0))
        except SigmaInvalid as exc:
            rejected.append(exc.name == name and exc.value == sig[int(name[1]) - 1])
        else:
            rejected.append(False)
    bad = [verify(constant_source_solution(M).perturbed("tau2", 1.1)) for M in LEVELS]
    fails_6, detail = convergence_verdict(bad)
    ok = all(rejected) and not fails_6
    return ok, f"SigmaInvalid raised for s2=1 and s1=-1: {all(rejected)}; tau2 x 1.1 fails criterion 6: {not fails_6} ({detail})"


CRITERIA = {
    1: ("zero-data uniqueness", criterion_1),
    2: ("heat representation oracle", criterion_2),
    3: ("Abel Volterra pair", criterion_3),
    4: ("BVP manufactured solution", criterion_4),
    5: ("D'Alembert oracle", criterion_5),
    6: ("end-to-end residual convergence", criterion_6),
    7: ("kernel identities", criterion_7),
    8: ("negative controls", criterion_8),
}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    title, body = CRITERIA[n]
    ok, detail = body()
    with capsys.disabled():
        report_line(n, title, ok, detail, out=lambda s: print("\n" + s))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for n, (title, body) in sorted(CRITERIA.items()):
        ok, detail = body()
        report_line(n, title, ok, detail)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
