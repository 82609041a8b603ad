"""Time the BCD inner loop with the compiled kernel and the numpy fallback.

    python benchmarks/bench_kernels.py [--repeats N]

Both backends run the same sweeps on the same patch matrices and must return
identical factors; the script reports median wall time per backend.
"""
import argparse
import statistics
import time

import numpy as np

from qmfcodec import kernels
from qmfcodec.solver import Bounds, init_factors

CASES = [
    ("luma 768x512, rank 6", 6144, 64, 6),
    ("luma 768x512, rank 24", 6144, 64, 24),
    ("chroma 384x256, rank 6", 1536, 64, 6),
    ("patch 32 luma, rank 40", 384, 1024, 40),
]


def run_sweeps(module, x, xt, start, bounds, sweeps):
    u = np.ascontiguousarray(start.u, dtype=np.float64)
    v = np.ascontiguousarray(start.v, dtype=np.float64)
    lo, hi = float(bounds.alpha), float(bounds.beta)
    for _ in range(sweeps):
        module.half_sweep(np.ascontiguousarray(x @ v), np.ascontiguousarray(v.T @ v), u, lo, hi)
        module.half_sweep(np.ascontiguousarray(xt @ u), np.ascontiguousarray(u.T @ u), v, lo, hi)
    return u, v


def median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--sweeps", type=int, default=10)
    args = ap.parse_args()

    if kernels.compiled is None:
        print("compiled extension not built; only the fallback can be timed")
    backends = [("python", kernels.fallback)]
    if kernels.compiled is not None:
        backends.insert(0, ("compiled", kernels.compiled))

    rng = np.random.default_rng(0)
    bounds = Bounds()
    print(f"{'case':<26}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'ratio':>9}")
    for label, m, n, r in CASES:
        # smooth-ish data so the solver behaves as it does on images
        x = np.clip(rng.normal(128, 20, (m, 1)) + rng.normal(0, 25, (m, n)), 0, 255)
        xt = np.ascontiguousarray(x.T)
        start = init_factors(x, r, bounds)
        results, times = [], []
        for _, mod in backends:
            t, out = median_time(lambda: run_sweeps(mod, x, xt, start, bounds, args.sweeps),
                                 args.repeats)
            times.append(t)
            results.append(out)
        for u, v in results[1:]:
            assert np.array_equal(u, results[0][0]) and np.array_equal(v, results[0][1])
        ratio = times[-1] / times[0] if len(times) > 1 else 1.0
        print(f"{label:<26}" + "".join(f"{t * 1e3:10.1f}ms" for t in times) + f"{ratio:8.2f}x")


if __name__ == "__main__":
    main()
