"""Time the numba kernels against their numpy fallbacks and check they agree.

    python benchmarks/bench_kernels.py [--limit 20000000] [--repeat 3]
"""
import argparse
import math
import time

import numpy as np

from zhlab import kernels
from zhlab._backend import HAVE_NUMBA, using_backend
from zhlab.primes import sieve_segmented
from zhlab.zeta import _coefficients


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--limit", type=int, default=20_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])

    store = sieve_segmented(args.limit)
    lam = np.linspace(-15.0, -11.0, 64)
    a = math.pi * np.exp(2.0 * lam)
    counts = np.array([store.count_upto(math.sqrt(60.0 / ai)) for ai in a], dtype=np.int64)
    coef, logk = _coefficients(200)

    cases = {
        "sieve": lambda: sieve_segmented(args.limit).count,
        "phi_sums": lambda: kernels.phi_sums(store.squares, store.logs, a, counts),
        "eta": lambda: [kernels.eta(complex(0.5, y), coef, logk) for y in np.linspace(1, 100, 2000)],
    }
    print(f"{'kernel':<10}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases.items():
        row, outs = [], []
        for b in backends:
            with using_backend(b):
                fn()  # warm-up / compile
                t, out = best_of(fn, args.repeat)
            row.append(t)
            outs.append(out)
        if len(outs) == 2:
            x, y = np.asarray(outs[0], dtype=np.complex128), np.asarray(outs[1], dtype=np.complex128)
            diff = float(np.max(np.abs(x - y) / np.maximum(np.abs(x), 1e-300)))
        else:
            diff = 0.0
        speed = row[0] / row[-1] if len(row) == 2 else 1.0
        print(f"{name:<10}" + "".join(f"{t:>13.4f}s" for t in row) + f"{speed:>9.1f}x   max rel diff {diff:.2e}")


if __name__ == "__main__":
    main()
