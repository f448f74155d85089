"""Unknown traces on the three type-change lines.

* tau1 on AB solves tau'' - lam tau' = f*, tau(0) = tau(1) = 0 in closed form.
* phi = tau2' on AD and psi = tau3' on BC solve the coupled second-kind
  Volterra system

      c2 phi + int phi N00 - int psi N01 = E1,
      c3 psi + int psi N11 - int phi N10 = E2,

  with kernels N_ab(s) = N(a, y; b, y - s) ~ s^(-1/2), marched in y by
  product trapezoid weights that integrate s^(-1/2) exactly.
* nu on each line then follows from its functional relation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import SigmaInvalid, StepSingular
from .parabolic import DEFAULT_KERNEL, KernelConfig, flux_parts, kernel_N_scaled
from .quadrature import abel_moments, gauss_legendre
from .source import SourceTerm
from .tracefn import TraceFn

MIN_M = 16
COND_LIMIT = 1e12


@dataclass(frozen=True)
class Sigma:
    s1: float
    s2: float
    s3: float

    def __post_init__(self):
        for name in ("s1", "s2", "s3"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise SigmaInvalid(name, v, "must be finite")
        if self.s1 in (-1.0, 1.0):
            raise SigmaInvalid("s1", self.s1, "s1 = 1 or -1 makes the closed form for tau1 degenerate")
        for name in ("s2", "s3"):
            v = getattr(self, name)
            if not -1.0 < v < 1.0:
                raise SigmaInvalid(name, v, "must lie strictly inside (-1, 1)")

    @property
    def lam(self) -> float:
        return (1.0 - self.s1) / (1.0 + self.s1)

    @property
    def c2(self) -> float:
        return (1.0 + self.s2) / (1.0 - self.s2)

    @property
    def c3(self) -> float:
        return (1.0 + self.s3) / (1.0 - self.s3)

    def as_tuple(self):
        return (self.s1, self.s2, self.s3)


def _check_M(M):
    if M < MIN_M:
        raise ValueError(f"grid needs M >= {MIN_M}, got {M}")


# ---------------------------------------------------------------------------
# tau1


def tau1_from_fstar(lam: float, fstar, M: int, n: int = 10) -> TraceFn:
    """tau'' - lam tau' = f*, tau(0) = tau(1) = 0, sampled with exact slopes.

    The closed form is evaluated in the direction in which its exponential
    decays (forward for lam < 0, backward for lam > 0), which is the same
    formula rearranged so that nothing overflows for large |lam|.
    """
    if lam == 0.0:
        raise SigmaInvalid("s1", 1.0, "lam = 0 makes the closed form degenerate")
    x = np.linspace(0.0, 1.0, M + 1)
    h = 1.0 / M
    t, w = gauss_legendre(n)
    nodes = x[:-1, None] + h * t[None, :]
    fv = np.asarray(fstar(nodes), dtype=float) * (h * w)
    F = np.concatenate(([0.0], np.cumsum(fv.sum(axis=1))))
    if lam < 0.0:
        # R(x) = int_0^x e^{lam (x - t)} f*
        cell = (np.exp(lam * (x[1:, None] - nodes)) * fv).sum(axis=1)
        R = np.zeros(M + 1)
        decay = np.exp(lam * h)
        for k in range(M):
            R[k + 1] = decay * R[k] + cell[k]
        C = (R[-1] - F[-1]) / (-np.expm1(lam))
        d = R + C * np.exp(lam * x)
    else:
        # P(x) = -int_x^1 e^{lam (x - t)} f*
        cell = (np.exp(lam * (x[:-1, None] - nodes)) * fv).sum(axis=1)
        P = np.zeros(M + 1)
        decay = np.exp(-lam * h)
        for k in range(M - 1, -1, -1):
            P[k] = decay * P[k + 1] - cell[k]
        C = (P[0] + F[-1]) / (-np.expm1(-lam))
        d = P + C * np.exp(lam * (x - 1.0))
    # tau' - tau'(0) = lam tau + F
    tau = (d - d[0] - F) / lam
    tau[0] = 0.0
    tau[-1] = 0.0
    return TraceFn(tau, d)


def solve_tau1(sig: Sigma, source: SourceTerm, A1, M: int, n: int = 10) -> TraceFn:
    """tau1 on AB with f* = f(x, 0) - A1(x) / (1 + s1)."""
    _check_M(M)

    def fstar(t):
        return source(t, np.zeros_like(t)) - np.asarray(A1(t)) / (1.0 + sig.s1)

    return tau1_from_fstar(sig.lam, fstar, M, n)


# ---------------------------------------------------------------------------
# right-hand sides of the Volterra system


def build_E(y: float, which: int, sig: Sigma, tau1: TraceFn, source: SourceTerm, A2, A3, cfg: KernelConfig = DEFAULT_KERNEL) -> float:
    """E1 (which=1, side x=0) or E2 (which=2, side x=1) at height y.

    E1 = -A2/(1-s2) + U1(0) + U4(0) and E2 = A3/(1-s3) - U1(1) - U4(1),
    where U1 and U4 are the tau1 and source parts of u_x on the side.
    At y = 0 the limit (tau1'(0) resp. -tau1'(1)) is returned.
    """
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    side = which - 1
    if y <= 0.0:
        U = float(tau1.derivative(float(side)))
    else:
        U1, U4 = flux_parts(side, y, tau1, source, cfg)
        U = U1 + U4
    if which == 1:
        return -float(A2(y)) / (1.0 - sig.s2) + U
    return float(A3(y)) / (1.0 - sig.s3) - U


def build_E_nodes(M: int, sig: Sigma, tau1: TraceFn, source: SourceTerm, A2, A3, cfg: KernelConfig = DEFAULT_KERNEL):
    y = np.linspace(0.0, 1.0, M + 1)
    a2 = np.asarray(A2(y), dtype=float)
    a3 = np.asarray(A3(y), dtype=float)
    E1 = np.array([build_E(yk, 1, sig, tau1, source, lambda _y, v=v: v, None, cfg) for yk, v in zip(y, a2)])
    E2 = np.array([build_E(yk, 2, sig, tau1, source, None, lambda _y, v=v: v, cfg) for yk, v in zip(y, a3)])
    return E1, E2


# ---------------------------------------------------------------------------
# Volterra system


def kernel_factors(M: int, cfg: KernelConfig = DEFAULT_KERNEL, kernels=None) -> np.ndarray:
    """H[m] = [[h00, -h01], [-h10, h11]](m h) with h_ab(s) = sqrt(s) N_ab(s).

    ``kernels`` may replace the four smooth factors by callables of s (used
    by harness problems with known solutions).
    """
    s = np.linspace(0.0, 1.0, M + 1)
    if kernels is None:
        h00 = kernel_N_scaled(0.0, 0.0, s, cfg)
        h01 = kernel_N_scaled(0.0, 1.0, s, cfg)
        h10, h11 = h01, h00
    else:
        h00, h01, h10, h11 = (np.broadcast_to(np.asarray(k(s), dtype=float), s.shape) for k in kernels)
    H = np.empty((M + 1, 2, 2))
    H[:, 0, 0] = h00
    H[:, 0, 1] = -h01
    H[:, 1, 0] = -h10
    H[:, 1, 1] = h11
    return H


@dataclass(frozen=True, eq=False)
class VolterraGrid:
    nodes: np.ndarray
    tau2p_deriv: np.ndarray
    tau3m_deriv: np.ndarray
    rhs1: np.ndarray
    rhs2: np.ndarray
    coeffs: np.ndarray
    H: np.ndarray

    @property
    def M(self) -> int:
        return self.nodes.size - 1

    def residual(self) -> np.ndarray:
        """Max-abs residual per node of the discrete system, summed directly."""
        M = self.M
        h = 1.0 / M
        a, b = abel_moments(M + 1)
        X = np.column_stack([self.tau2p_deriv, self.tau3m_deriv])
        E = np.column_stack([self.rhs1, self.rhs2])
        out = np.zeros(M + 1)
        out[0] = np.max(np.abs(self.coeffs * X[0] - E[0]))
        for k in range(1, M + 1):
            j = np.arange(k + 1)
            m = k - j
            w = np.zeros(k + 1)
            w[:k] = a[m[:k]]
            w[1:] += b[m[1:] + 1]
            integral = np.sqrt(h) * np.einsum("j,jab,jb->a", w, self.H[m], X[: k + 1])
            out[k] = np.max(np.abs(self.coeffs * X[k] + integral - E[k]))
        return out


def _samples(E, M):
    if callable(E):
        return np.asarray(E(np.linspace(0.0, 1.0, M + 1)), dtype=float)
    E = np.asarray(E, dtype=float)
    if E.shape != (M + 1,):
        raise ValueError(f"right-hand side needs {M + 1} samples, got shape {E.shape}")
    return E


def solve_volterra(sig: Sigma, E1, E2, cfg: KernelConfig = DEFAULT_KERNEL, M: int = 256, kernels=None, backend_name=None) -> VolterraGrid:
    """March the coupled system over the uniform grid y_k = k / M.

    E1, E2 are callables of y or arrays of M + 1 samples.
    """
    _check_M(M)
    c = np.array([sig.c2, sig.c3])
    E = np.column_stack([_samples(E1, M), _samples(E2, M)])
    H = kernel_factors(M, cfg, kernels)
    a, b = abel_moments(M)
    sqrt_h = np.sqrt(1.0 / M)
    step = np.diag(c) + sqrt_h * b[1] * H[0]
    if np.linalg.cond(step) > COND_LIMIT:
        raise StepSingular(f"step matrix condition number exceeds {COND_LIMIT:g}")
    X = backend.volterra_march(c, E, H, a, b, sqrt_h, np.linalg.inv(step), backend=backend_name)
    y = np.linspace(0.0, 1.0, M + 1)
    return VolterraGrid(y, X[:, 0].copy(), X[:, 1].copy(), E[:, 0].copy(), E[:, 1].copy(), c, H)


# ---------------------------------------------------------------------------
# nu recovery


def _nodal(A, grid):
    if callable(A):
        return np.broadcast_to(np.asarray(A(grid), dtype=float), grid.shape)
    return np.asarray(A, dtype=float)


def recover_nu(i: int, tau_deriv: TraceFn, A, sig: Sigma) -> TraceFn:
    """nu on line i from its functional relation, given samples of tau'.

    (1-s1) tau1' - (1+s1) nu1 = A1, (1-s2) nu2 - (1+s2) tau2' = A2,
    (1+s3) tau3' + (1-s3) nu3 = A3.
    """
    d = tau_deriv.values
    a = _nodal(A, tau_deriv.grid)
    if i == 1:
        nu = ((1.0 - sig.s1) * d - a) / (1.0 + sig.s1)
    elif i == 2:
        nu = (a + (1.0 + sig.s2) * d) / (1.0 - sig.s2)
    elif i == 3:
        nu = (a - (1.0 + sig.s3) * d) / (1.0 - sig.s3)
    else:
        raise ValueError("line index must be 1, 2 or 3")
    return TraceFn(nu)


def relation_lhs(i: int, tau_deriv, nu, sig: Sigma):
    """Left side of the functional relation on line i (inverse of recover_nu)."""
    if i == 1:
        return (1.0 - sig.s1) * tau_deriv - (1.0 + sig.s1) * nu
    if i == 2:
        return (1.0 - sig.s2) * nu - (1.0 + sig.s2) * tau_deriv
    if i == 3:
        return (1.0 + sig.s3) * tau_deriv + (1.0 - sig.s3) * nu
    raise ValueError("line index must be 1, 2 or 3")


def integrate_deriv(tau_deriv: TraceFn, anchor: float) -> TraceFn:
    """tau with tau(0) = anchor and tau' equal to the interpolant of ``tau_deriv``.

    Keeping tau' identical to that interpolant means nu from ``recover_nu``
    and tau' are linear images of one another between the nodes as well.
    """
    return tau_deriv.antiderivative(anchor)
