"""Compare the numba and numpy theta kernels on vectors and scalar calls.

Run with ``python3 benchmarks/bench_theta.py``.  Prints timings and the
maximum difference between the two backends.
"""
import time

import numpy as np

from ellipt_bethe import _kernels
from ellipt_bethe.theta import theta


def _time(fn, repeat=5):
    fn()  # warm up (JIT compilation for numba)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    tau = 0.3 + 0.8j
    u = rng.uniform(-2, 2, 100_000) + 1j * rng.uniform(-1, 1, 100_000)
    scalars = list(u[:2000])
    rows = []
    values = {}
    for backend in ("numpy", "numba"):
        if backend == "numba" and not _kernels.HAVE_NUMBA:
            continue
        _kernels.set_backend(backend)
        vec = _time(lambda: [theta(a, u, tau) for a in (1, 2, 3, 4)])
        sca = _time(lambda: [theta(1, z, tau) for z in scalars])
        values[backend] = np.array([theta(a, u, tau) for a in (1, 2, 3, 4)])
        rows.append((backend, vec, sca))
    for backend, vec, sca in rows:
        print(f"{backend:6s} vector 4x1e5: {vec * 1e3:8.2f} ms   scalar 2000 calls: {sca * 1e3:8.2f} ms")
    if len(values) == 2:
        diff = np.max(np.abs(values["numba"] - values["numpy"]) / (1 + np.abs(values["numpy"])))
        print(f"max relative difference between backends: {diff:.2e}")


if __name__ == "__main__":
    main()
