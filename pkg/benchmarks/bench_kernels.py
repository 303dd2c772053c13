"""Compare the numba kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the raw kernels on synthetic data and the orbit computation on a
quiver locus, checks that both paths agree, and prints one line per case.
"""

import argparse
import time

import numpy as np

from bbzalg import _kernels
from bbzalg.finite_field import field
from bbzalg.quiver import loop_quiver, orbits


def best_of(fn, repeat):
    fn()  # warm up (includes numba compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels.numba is None:
        print("numba is not installed; only the numpy path is available")
        return

    rng = np.random.default_rng(0)
    F = field(4)
    X = rng.integers(0, 4, size=(200_000, 3, 3))
    Y = rng.integers(0, 4, size=(200_000, 3, 3))
    L = rng.integers(0, 4, size=(3, 3))
    images = rng.integers(0, 500_000, size=(4, 500_000))

    cases = {
        "batch_matmul 200k 3x3 over F4": lambda nb: _kernels.batch_matmul(X, Y, F.add, F.mul, use_numba=nb),
        "sandwich 200k 3x3 over F4": lambda nb: _kernels.sandwich(L, X, L, F.add, F.mul, use_numba=nb),
        "orbit_labels 4 x 500k": lambda nb: _kernels.orbit_labels(images, use_numba=nb),
        "orbits two-loop dim 2 over F7": lambda nb: len(orbits(loop_quiver(2), {0: 2}, 7, use_numba=nb)),
    }
    print(f"{'case':34s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, fn in cases.items():
        t_np, out_np = best_of(lambda: fn(False), args.repeat)
        t_nb, out_nb = best_of(lambda: fn(True), args.repeat)
        same = np.array_equal(out_np, out_nb)
        flag = "" if same else "  MISMATCH"
        print(f"{name:34s} {t_np * 1e3:9.1f}ms {t_nb * 1e3:9.1f}ms {t_np / t_nb:7.1f}x{flag}")


if __name__ == "__main__":
    main()
