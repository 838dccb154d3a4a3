"""Benchmark the compiled kernel backend against the NumPy fallback.

Usage:  python benchmarks/bench_kernels.py [--repeat 50]

Times the stencil kernels and the whole-path action/gradient kernels on
representative 1D and 2D workloads and prints one table row per kernel
with the per-call time of both backends and the speedup.
"""

import argparse
import time

import numpy as np

from acaction import _kernels_np as knp

try:
    from acaction import _kernels_cy as kcy
except ImportError:
    kcy = None


def _time(fn, repeat):
    fn()  # warm up
    best = float("inf")
    for _ in range(3):
        start = time.perf_counter()
        for _ in range(repeat):
            fn()
        best = min(best, (time.perf_counter() - start) / repeat)
    return best


def cases():
    rng = np.random.default_rng(0)
    u1 = rng.standard_normal(4096)
    v1 = rng.standard_normal(4096)
    u2 = np.ascontiguousarray(rng.standard_normal((512, 512)))
    w1 = np.full(4096, 1e-3)
    w1[0] = w1[-1] = 5e-4
    w2 = np.full((512, 512), 1e-5)
    path1 = np.ascontiguousarray(rng.standard_normal((257, 256)))
    dts1 = np.full(256, 1e-2)
    wq1 = np.full(256, 1.0 / 255)
    wq1[0] = wq1[-1] = 0.5 / 255
    path2 = np.ascontiguousarray(rng.standard_normal((17, 128, 128)))
    dts2 = np.full(16, 1e-2)
    wq2 = np.full((128, 128), 6e-5)
    h = 1e-2
    eps = 0.1
    return [
        ("laplacian_1d (n=4096)", lambda k: k.laplacian_1d(u1, h, False)),
        ("laplacian_2d (512^2)", lambda k: k.laplacian_2d(u2, h, h, False)),
        ("grad_sq_2d (512^2)", lambda k: k.grad_sq_2d(u2, h, h, False)),
        ("chemical_potential_2d (512^2)", lambda k: k.chemical_potential_2d(u2, h, h, eps, False)),
        ("explicit_step_2d (512^2)", lambda k: k.explicit_step_2d(u2, 1e-6, eps, h, h, False)),
        (
            "interval_terms_1d (n=4096)",
            lambda k: k.interval_terms_1d(u1, v1, 1e-3, eps, h, w1, False),
        ),
        (
            "path_terms_1d (256x256)",
            lambda k: k.path_terms_1d(path1, dts1, eps, h, wq1, False),
        ),
        (
            "path_gradient_1d (256x256)",
            lambda k: k.path_gradient_1d(path1, dts1, eps, h, wq1, False),
        ),
        (
            "path_terms_2d (16x128^2)",
            lambda k: k.path_terms_2d(path2, dts2, eps, h, h, wq2, False),
        ),
        (
            "path_gradient_2d (16x128^2)",
            lambda k: k.path_gradient_2d(path2, dts2, eps, h, h, wq2, False),
        ),
    ]


def run(repeat):
    rows = []
    for name, call in cases():
        t_np = _time(lambda: call(knp), repeat)
        if kcy is not None:
            t_cy = _time(lambda: call(kcy), repeat)
            rows.append((name, t_np, t_cy, t_np / t_cy))
        else:
            rows.append((name, t_np, None, None))
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'compiled':>10}  {'speedup':>8}")
    for name, t_np, t_cy, ratio in rows:
        if t_cy is None:
            print(f"{name:<{width}}  {t_np * 1e6:>8.1f}us  {'n/a':>10}  {'n/a':>8}")
        else:
            print(
                f"{name:<{width}}  {t_np * 1e6:>8.1f}us  {t_cy * 1e6:>8.1f}us  {ratio:>7.1f}x"
            )
    if kcy is None:
        print("\ncompiled backend not available; showing the fallback only")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=50)
    args = parser.parse_args()
    run(args.repeat)
