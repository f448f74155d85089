"""Pure-numpy reference versions of the hot kernels.

Every function here has a twin of the same name and signature in
``_kernels_numba``; ``mixtype.backend`` picks one of the two at import time.
Inputs are 1-D float64 arrays of equal length.
"""

import numpy as np
from scipy.special import erfc

_SQRT_PI = np.sqrt(np.pi)

# kernel kinds understood by image_sum
G, N, GX, GX1 = 0, 1, 2, 3


def _k(z, s):
    return np.exp(-z * z / (4.0 * s)) / (2.0 * _SQRT_PI * np.sqrt(s))


def _kz(z, s):
    return -z / (2.0 * s) * _k(z, s)


def _pair(kind, a, b, s):
    if kind == G:
        return _k(a, s) - _k(b, s)
    if kind == N:
        return _k(a, s) + _k(b, s)
    if kind == GX:
        return _kz(a, s) - _kz(b, s)
    return -_kz(a, s) - _kz(b, s)


def image_sum(kind, x, x1, s, n_cap, tol):
    """Method-of-images sum for the strip kernels G, N, G_x, G_x1.

    Shells n = +-k are added until a whole shell contributes less than
    ``tol`` everywhere (never before k = 2), or ``n_cap`` is reached.
    """
    a = x - x1
    b = x + x1
    out = _pair(kind, a, b, s)
    for k in range(1, n_cap + 1):
        shift = 2.0 * k
        shell = _pair(kind, a + shift, b + shift, s) + _pair(kind, a - shift, b - shift, s)
        out += shell
        if k >= 2 and np.max(np.abs(shell), initial=0.0) < tol:
            break
    return out


def _layer(z, s):
    return np.sign(z) * erfc(np.abs(z) / (2.0 * np.sqrt(s)))


def erfc_layer(z, s, n_cap, tol):
    """Sum over n of sign(z+2n) erfc(|z+2n| / (2 sqrt(s))).

    d/ds of this sum equals G_x1(x, y; 0, y - s) for z = x and
    G_x1(x, y; 1, y - s) for z = x - 1.
    """
    out = _layer(z, s)
    for k in range(1, n_cap + 1):
        shift = 2.0 * k
        shell = _layer(z + shift, s) + _layer(z - shift, s)
        out += shell
        if k >= 2 and np.max(np.abs(shell), initial=0.0) < tol:
            break
    return out


def volterra_march(c, E, H, omega_a, omega_b, sqrt_h, step_inv):
    """Causal product-trapezoid march for a 2x2 second-kind Volterra system.

    Solves ``c X_k + sqrt_h * sum_j w_kj H[k-j] X_j = E[k]`` for k = 1..M given
    X_0 = E[0] / c. ``H`` has shape (M+1, 2, 2); ``step_inv`` is the inverse of
    the (constant) diagonal step matrix.
    """
    M = E.shape[0] - 1
    X = np.zeros((M + 1, 2))
    X[0] = E[0] / c
    for k in range(1, M + 1):
        # weights for nodes j = 0..k-1; node k enters through step_inv
        m = k - np.arange(k)
        w = omega_a[m].copy()
        w[1:] += omega_b[m[1:] + 1]
        hist = np.einsum("j,jab,jb->a", w, H[m], X[:k])
        X[k] = step_inv @ (E[k] - sqrt_h * hist)
    return X
