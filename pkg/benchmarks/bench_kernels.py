"""Compiled vs numpy kernels on random jets and on a full default sweep.

    python benchmarks/bench_kernels.py [--sizes 1000 100000] [--repeat 7]

Reports the best-of-N wall time per call and the speedup of the compiled
extension.  Kernel inputs are precomputed so only the pointwise arithmetic is
timed.
"""

import argparse
import time

import numpy as np

from bitension import classify, kernels


def random_jets(rng, n):
    p = [rng.normal(size=n) for _ in range(5)]
    s = [rng.uniform(0.2, 2.0, n)] + [rng.normal(size=n) for _ in range(3)]
    lam = [rng.uniform(0.2, 2.0, n)] + [rng.normal(size=n) for _ in range(3)]
    return p, s, lam


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases(p, s, lam, r):
    return {
        "tension": lambda be: kernels.tension(p, s, lam, 0.7, 1.3, backend=be),
        "residual_simplified": lambda be: kernels.residual_simplified(p, s, lam, 0.7, 1.3, backend=be),
        "residual_termsum": lambda be: kernels.residual_termsum(p, s, lam, 0.7, 1.3, backend=be),
        "obstruction": lambda be: kernels.obstruction(1.7, 2.0, 0.3, r, backend=be),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1_000, 100_000, 1_000_000])
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()

    if "compiled" not in kernels.BACKENDS:
        print("compiled extension not built; only the python backend is available")
    backends = kernels.BACKENDS
    rng = np.random.default_rng(1)

    print(f"{'kernel':<22}{'n':>10}" + "".join(f"{b + ' [ms]':>16}" for b in backends)
          + ("   speedup" if len(backends) > 1 else ""))
    for n in args.sizes:
        p, s, lam = random_jets(rng, n)
        r = rng.uniform(0.0, 3.2, n)
        for name, call in kernel_cases(p, s, lam, r).items():
            times = [best_time(lambda: call(be), args.repeat) for be in backends]
            row = f"{name:<22}{n:>10}" + "".join(f"{1e3 * t:>16.3f}" for t in times)
            if len(times) > 1:
                row += f"{times[0] / times[1]:>9.2f}x"
            print(row)

    print()
    for be in backends:
        kernels.BACKEND = be
        t = best_time(classify.classify_sweep, max(1, args.repeat // 3))
        print(f"default sweep (288 tuples x 2001 points), {be:<9} {t:.3f} s")


if __name__ == "__main__":
    main()
