"""Benchmark the compiled kernel backend against the pure-Python fallback.

Run with ``python benchmarks/bench_kernels.py``.  Times the fused step
kernel and the fused inverse-step kernel over a batch of random matrices
per size, and reports per-call times plus speedup.  The two backends
compute bitwise-identical results, so this only measures speed.
"""

import time

import numpy as np

from shiftlab._core import _kernels_py

try:
    from shiftlab._core import _kernels
except ImportError:
    _kernels = None

SIZES = (3, 4, 6, 8)
BATCH = 300
REPEATS = 30


def make_inputs(n, rng):
    out = []
    for _ in range(BATCH):
        d = rng.normal(size=n)
        e = rng.normal(size=n - 1) + np.sign(rng.normal(size=n - 1)) * 0.2
        out.append((d, e, float(rng.normal())))
    return out


def time_backend(backend, fn_name, inputs):
    fn = getattr(backend, fn_name)
    best = float("inf")
    for _ in range(REPEATS):
        t0 = time.perf_counter()
        for d, e, s in inputs:
            fn(d, e, s, 1e-13)
        best = min(best, (time.perf_counter() - t0) / len(inputs))
    return best


def main():
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'n':>3} {'python':>12} {'cython':>12} {'speedup':>9}")
    for fn_name in ("phi_star_apply", "rq_conjugate"):
        for n in SIZES:
            inputs = make_inputs(n, rng)
            t_py = time_backend(_kernels_py, fn_name, inputs)
            if _kernels is None:
                print(f"{fn_name:<16}{n:>3} {t_py * 1e6:>10.2f}us {'-':>12} {'-':>9}")
                continue
            t_cy = time_backend(_kernels, fn_name, inputs)
            print(
                f"{fn_name:<16}{n:>3} {t_py * 1e6:>10.2f}us {t_cy * 1e6:>10.2f}us "
                f"{t_py / t_cy:>8.1f}x"
            )
    if _kernels is None:
        print("compiled backend not available; only the fallback was timed")


if __name__ == "__main__":
    main()
