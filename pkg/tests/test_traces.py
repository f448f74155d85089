import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import erf

from mixtype import Sigma, SigmaInvalid, SourceTerm, StepSingular, TraceFn
from mixtype.parabolic import heat_ux_boundary, kernel_N
from mixtype.traces import (
    build_E,
    build_E_nodes,
    integrate_deriv,
    recover_nu,
    relation_lhs,
    solve_tau1,
    solve_volterra,
    tau1_from_fstar,
)

HEAT_FLUX = 1.1708962084772890564  # pi exp(-pi^2 / 10)
ABEL = (lambda s: np.full_like(s, 1 / np.sqrt(np.pi)), np.zeros_like, np.zeros_like, np.zeros_like)
ZERO_SIGMA = Sigma(0.0, 0.0, 0.0)


def no_A(t):
    return np.zeros_like(np.asarray(t, dtype=float))


@pytest.mark.parametrize("lam", [1.0, -3.0, 0.2, 25.0, -40.0])
def test_bvp_manufactured(lam):
    # tau = x(1 - x): tau'' - lam tau' = -2 - lam (1 - 2x)
    tau = tau1_from_fstar(lam, lambda x: -2 - lam * (1 - 2 * x), 256)
    x = tau.grid
    assert np.max(np.abs(tau.values - x * (1 - x))) <= 1e-8
    assert np.max(np.abs(tau.deriv_values - (1 - 2 * x))) <= 1e-8
    assert tau.values[0] == 0.0 and tau.values[-1] == 0.0


def test_solve_tau1_zero_and_spec_example():
    tau = solve_tau1(ZERO_SIGMA, SourceTerm.zero(), no_A, 64)
    assert np.all(tau.values == 0.0)
    tau = solve_tau1(ZERO_SIGMA, SourceTerm.from_expr("2*x - 3"), no_A, 256)
    assert np.max(np.abs(tau.values - tau.grid * (1 - tau.grid))) <= 1e-8


def test_sigma_validation():
    for bad in ((0, 1, 0), (0, 0, -1), (1, 0, 0), (-1, 0, 0), (0, 1.5, 0), (np.nan, 0, 0)):
        with pytest.raises(SigmaInvalid):
            Sigma(*bad)
    s = Sigma(0.5, 0.5, -0.5)
    assert s.lam == pytest.approx(1 / 3) and s.c2 == pytest.approx(3.0) and s.c3 == pytest.approx(1 / 3)


def test_zero_rhs_gives_zero():
    vg = solve_volterra(ZERO_SIGMA, np.zeros(65), np.zeros(65), M=64)
    assert np.all(vg.tau2p_deriv == 0.0) and np.all(vg.tau3m_deriv == 0.0)


def abel_error(M, phi, E):
    vg = solve_volterra(ZERO_SIGMA, E, lambda y: np.zeros_like(y), M=M, kernels=ABEL)
    return np.max(np.abs(vg.tau2p_deriv - phi(vg.nodes)))


def test_abel_constant_pair_is_exact():
    for M in (64, 128, 256):
        err = abel_error(M, np.ones_like, lambda y: 1 + 2 * np.sqrt(y / np.pi))
        assert err <= 1e-12


def test_abel_smooth_pair_order():
    errs = [abel_error(M, np.exp, lambda y: np.exp(y) * (1 + erf(np.sqrt(y)))) for M in (64, 128, 256)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert errs[-1] <= 1e-4
    assert np.all((orders >= 1.3) & (orders <= 2.2))


def test_step_singular():
    M = 64
    from mixtype.quadrature import abel_moments

    _, b = abel_moments(M)
    bad = -1.0 / (np.sqrt(1.0 / M) * b[1])
    kernels = (lambda s: np.full_like(s, bad), np.zeros_like, np.zeros_like, np.ones_like)
    with pytest.raises(StepSingular):
        solve_volterra(ZERO_SIGMA, np.ones(M + 1), np.ones(M + 1), M=M, kernels=kernels)


def convolve(f, kern, y):
    """int_0^y f(s) kern(y - s) ds for kern ~ (y-s)^(-1/2), in r = sqrt(y - s)."""
    if y == 0.0:
        return 0.0
    R = np.sqrt(y)
    return quad(lambda r: 2 * r * f(y - r * r) * kern(r * r), 0.0, R, epsabs=1e-13, epsrel=1e-13, limit=200)[0]


def manufactured_rhs(y, sig):
    phi = lambda s: s
    psi = lambda s: 1 - s
    n00 = lambda s: float(kernel_N(0.0, s, 0.0, 0.0))
    n01 = lambda s: float(kernel_N(0.0, s, 1.0, 0.0))
    E1 = sig.c2 * phi(y) + convolve(phi, n00, y) - convolve(psi, n01, y)
    E2 = sig.c3 * psi(y) + convolve(psi, n00, y) - convolve(phi, n01, y)
    return E1, E2


def test_coupled_system_manufactured():
    sig = Sigma(0.0, 0.3, -0.2)
    errs = []
    for M in (32, 64):
        y = np.linspace(0, 1, M + 1)
        E = np.array([manufactured_rhs(v, sig) for v in y])
        vg = solve_volterra(sig, E[:, 0], E[:, 1], M=M)
        errs.append(max(np.max(np.abs(vg.tau2p_deriv - y)), np.max(np.abs(vg.tau3m_deriv - (1 - y)))))
        assert np.max(vg.residual()) <= 1e-12
    assert errs[1] <= 1e-3
    assert errs[1] < errs[0] / 2.5


def long_sum_N(x, y, x1, n=50):
    k = np.arange(-n, n + 1)[:, None]
    K = lambda z: np.exp(-(z**2) / (4 * y)) / (2 * np.sqrt(np.pi * y))
    return np.sum(K(x - x1 + 2 * k) + K(x + x1 + 2 * k), axis=0)


def test_E1_trapezoid_oracle():
    x1 = np.linspace(0, 1, 10001)
    oracle = np.trapezoid(np.pi * np.cos(np.pi * x1) * long_sum_N(0.0, 0.1, x1), x1)
    assert oracle == pytest.approx(HEAT_FLUX, abs=1e-6)
    tau1 = TraceFn.sample(lambda x: np.sin(np.pi * x), 256, lambda x: np.pi * np.cos(np.pi * x))
    E1 = build_E(0.1, 1, ZERO_SIGMA, tau1, SourceTerm.zero(), no_A, no_A)
    assert E1 == pytest.approx(oracle, abs=1e-6)
    E2 = build_E(0.1, 2, ZERO_SIGMA, tau1, SourceTerm.zero(), no_A, no_A)
    assert E2 == pytest.approx(oracle, abs=1e-6)


def test_E_zero_and_source_consistency():
    zero = TraceFn.zeros(64)
    E1, E2 = build_E_nodes(64, ZERO_SIGMA, zero, SourceTerm.zero(), no_A, no_A)
    assert np.all(E1 == 0.0) and np.all(E2 == 0.0)
    f = SourceTerm.constant(1.0)
    A2 = lambda y: 0.1 * np.asarray(y)
    for y in (0.2, 0.7):
        flux = heat_ux_boundary(0, y, zero, zero, zero, f)
        assert build_E(y, 1, ZERO_SIGMA, zero, f, A2, no_A) == pytest.approx(-0.1 * y + flux, abs=1e-13)


def test_recover_nu_examples():
    one = TraceFn(np.ones(65))
    nu = recover_nu(1, one, no_A, ZERO_SIGMA)
    assert np.allclose(nu.values, 1.0)
    zero = TraceFn(np.zeros(65))
    for i in (1, 2, 3):
        assert np.all(recover_nu(i, zero, no_A, Sigma(0.2, 0.3, 0.4)).values == 0.0)
    # on AD: (1 - s2) nu2 - (1 + s2) tau2' = A2
    d = TraceFn.sample(lambda y: y, 64)
    nu = recover_nu(2, d, lambda y: 2 * y, Sigma(0.0, 0.5, 0.0))
    assert np.allclose(nu.values, 7 * d.grid, atol=1e-14)


@given(
    st.integers(1, 3),
    st.floats(-0.9, 0.9),
    st.floats(-0.9, 0.9),
    st.floats(-0.9, 0.9),
    st.floats(-5, 5),
    st.floats(-5, 5),
)
def test_relation_round_trip(i, s1, s2, s3, a, b):
    sig = Sigma(s1, s2, s3)
    d = TraceFn.sample(lambda t: a * t + b * t * t, 16)
    A = lambda t: b - a * t
    nu = recover_nu(i, d, A, sig)
    lhs = relation_lhs(i, d.values, nu.values, sig)
    assert np.allclose(lhs, A(d.grid), atol=1e-9 * (1 + abs(a) + abs(b)))


def test_integrate_deriv():
    M = 256
    assert np.all(integrate_deriv(TraceFn(np.zeros(M + 1)), 0.0).values == 0.0)
    t = np.linspace(0, 1, 1001)
    sq = integrate_deriv(TraceFn.sample(lambda y: 2 * y, M), 0.0)
    assert np.max(np.abs(sq(t) - t * t)) <= 1e-10
    s = integrate_deriv(TraceFn.sample(np.cos, M), 1.0)
    assert np.max(np.abs(s(t) - 1 - np.sin(t))) <= 1e-8
    assert np.allclose(s.derivative(t), TraceFn.sample(np.cos, M)(t), atol=1e-14)


@pytest.mark.parametrize("s1", [0.3, -0.6, 2.0])
def test_bvp_finite_difference_residual(s1):
    sig = Sigma(s1, 0.0, 0.0)
    fstar = lambda x: np.cos(3 * x) + x
    res = []
    for M in (64, 128):
        tau = tau1_from_fstar(sig.lam, fstar, M)
        v, h = tau.values, tau.h
        x = tau.grid[1:-1]
        r = (v[2:] - 2 * v[1:-1] + v[:-2]) / h**2 - sig.lam * (v[2:] - v[:-2]) / (2 * h) - fstar(x)
        res.append(np.max(np.abs(r)))
    assert res[1] < res[0] / 3.5
