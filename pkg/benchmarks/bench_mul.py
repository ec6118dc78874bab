"""Time carryless multiplication and theta inversion on each kernel backend.

    python benchmarks/bench_mul.py [--max-log 20] [--repeat 3]

Dense products use random operands of 2^k bits; the inversion row times
1/[1] for l = 3 at the listed precision.  The reference backend is quadratic
and only runs on the small sizes.
"""

import argparse
import time

import numpy as np

from theta2 import _kernels as K
from theta2.theta import theta_series

REFERENCE_MAX_LOG = 14


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--min-log", type=int, default=10)
    ap.add_argument("--max-log", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    backends = [b for b in K.BACKENDS if b != "numba" or K.HAVE_NUMBA]
    if K.HAVE_NUMBA:
        K.warmup()

    print(f"{'op':<10}{'bits':>10}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for k in range(args.min_log, args.max_log + 1):
        n = 1 << k
        a = K.mask_tail(rng.integers(0, 2**63, K.nwords(n), dtype=np.uint64), n)
        b = K.mask_tail(rng.integers(0, 2**63, K.nwords(n), dtype=np.uint64), n)
        row, results = {}, {}
        for name in backends:
            if name == "reference" and k > REFERENCE_MAX_LOG:
                continue
            row[name], results[name] = best_of(lambda: K.mul(a, b, 2 * n, backend=name), args.repeat)
        ref = next(iter(results.values()))
        assert all(np.array_equal(ref, r) for r in results.values()), f"backends disagree at 2^{k}"
        print(_line("mul", n, backends, row))

    for k in range(args.min_log + 4, args.max_log + 3, 2):
        n = 1 << k
        row, results = {}, {}
        for name in backends:
            if name == "reference" and k > REFERENCE_MAX_LOG:
                continue
            prev = K.set_backend(name)
            try:
                f = theta_series(3, 1, n)
                row[name], results[name] = best_of(lambda: f.inverse(), args.repeat)
            finally:
                K.set_backend(prev)
        ref = next(iter(results.values()))
        assert all(ref == r for r in results.values()), f"inverses disagree at 2^{k}"
        print(_line("inverse", n, backends, row))


def _line(op, n, backends, row):
    cells = "".join(f"{row[b] * 1e3:>10.2f}ms" if b in row else f"{'-':>12}" for b in backends)
    speed = row["numpy"] / row["numba"] if "numba" in row and "numpy" in row else float("nan")
    return f"{op:<10}{n:>10}{cells}{speed:>9.1f}x"


if __name__ == "__main__":
    main()
