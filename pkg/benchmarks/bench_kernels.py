"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--n 200000] [--M 512] [--repeat 5]

Each kernel is run once untimed (JIT compile), then ``repeat`` times; the
best wall time is reported with the max difference between the backends.
"""

import argparse
import time

import numpy as np

from mixtype import backend
from mixtype.quadrature import abel_moments
from mixtype.traces import kernel_factors


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(n, M):
    rng = np.random.default_rng(0)
    x = rng.random(n)
    x1 = rng.random(n)
    s = 10.0 ** rng.uniform(-4, 0, n)
    z = rng.uniform(-1, 1, n)
    H = kernel_factors(M)
    a, b = abel_moments(M)
    c = np.array([1.0, 1.0])
    E = np.column_stack([np.cos(np.linspace(0, 1, M + 1)), np.ones(M + 1)])
    sqrt_h = np.sqrt(1.0 / M)
    inv = np.linalg.inv(np.diag(c) + sqrt_h * b[1] * H[0])
    return {
        "image_sum(N)": lambda be: backend.image_sum(1, x, x1, s, backend=be),
        "image_sum(G_x)": lambda be: backend.image_sum(2, x, x1, s, backend=be),
        "erfc_layer": lambda be: backend.erfc_layer(z, s, backend=be),
        "volterra_march": lambda be: backend.volterra_march(c, E, H, a, b, sqrt_h, inv, backend=be),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="points per kernel call")
    ap.add_argument("--M", type=int, default=512, help="Volterra grid size")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if backend.BACKEND != "numba":
        print("numba backend unavailable; nothing to compare")
        return 1
    backend.set_threads()
    print(f"{'kernel':<16} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8} {'max diff':>10}")
    for name, run in cases(args.n, args.M).items():
        t_np, out_np = best_of(lambda: run("numpy"), args.repeat)
        t_nb, out_nb = best_of(lambda: run("numba"), args.repeat)
        diff = float(np.max(np.abs(out_np - out_nb)))
        print(f"{name:<16} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f} {diff:10.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
