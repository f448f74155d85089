import os
import subprocess
import sys

import numpy as np
import pytest

from mixtype import ProblemSpec, SourceTerm, backend, solve
from mixtype._kernels_numpy import G, GX, GX1, N
from mixtype.quadrature import abel_moments

numba_only = pytest.mark.skipif(backend.BACKEND != "numba", reason="numba backend not available")


@pytest.fixture(scope="module")
def samples():
    rng = np.random.default_rng(3)
    x, x1 = rng.uniform(0, 1, (2, 2000))
    s = np.geomspace(1e-8, 2.0, 2000)
    return x, x1, s


@numba_only
@pytest.mark.parametrize("kind", [G, N, GX, GX1])
def test_image_sum_agrees(samples, kind):
    x, x1, s = samples
    a = backend.image_sum(kind, x, x1, s, backend="numpy")
    b = backend.image_sum(kind, x, x1, s, backend="numba")
    scale = np.maximum(1.0, np.abs(a))
    assert np.max(np.abs(a - b) / scale) <= 1e-12


@numba_only
def test_erfc_layer_agrees(samples):
    x, _, s = samples
    for z in (x, x - 1.0):
        a = backend.erfc_layer(z, s, backend="numpy")
        b = backend.erfc_layer(z, s, backend="numba")
        assert np.max(np.abs(a - b)) <= 1e-14


@numba_only
def test_volterra_march_agrees():
    M = 128
    rng = np.random.default_rng(5)
    E = rng.normal(size=(M + 1, 2))
    H = rng.normal(size=(M + 1, 2, 2)) * 0.3
    a, b = abel_moments(M)
    c = np.array([1.5, 0.7])
    sh = np.sqrt(1.0 / M)
    inv = np.linalg.inv(np.diag(c) + sh * b[1] * H[0])
    X1 = backend.volterra_march(c, E, H, a, b, sh, inv, backend="numpy")
    X2 = backend.volterra_march(c, E, H, a, b, sh, inv, backend="numba")
    assert np.max(np.abs(X1 - X2)) <= 1e-12 * max(1.0, np.max(np.abs(X1)))


@numba_only
def test_full_solve_agrees_across_backends(monkeypatch):
    spec = ProblemSpec.bumps((0.2, -0.1, 0.3), SourceTerm.from_expr("1 + x*y"), M=32)
    fast = solve(spec)
    monkeypatch.setattr(backend, "BACKEND", "numpy")
    slow = solve(spec)
    assert slow.metadata["backend"] == "numpy"
    for i in (1, 2, 3):
        assert np.allclose(fast.tau[i].values, slow.tau[i].values, atol=1e-12)
        assert np.allclose(fast.nu[i].values, slow.nu[i].values, atol=1e-12)


def test_env_flag_selects_numpy():
    env = dict(os.environ, MIXTYPE_BACKEND="numpy")
    code = "from mixtype import backend; print(backend.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_numpy_path_keeps_shapes():
    out = backend.image_sum(G, np.zeros((3, 4)), 0.5, 0.1, backend="numpy")
    assert out.shape == (3, 4)
