"""Time the numba kernels against their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from simland import _kernels as K
from simland.ordinal import _bracket, fixed_thresholds


def timed(fn, repeat: int) -> float:
    fn()  # warmup, includes JIT compilation
    best = np.inf
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    g = np.random.default_rng(args.seed)
    A, Bx = g.normal(size=(2000, 12)), g.normal(size=(500, 12))
    Z = g.normal(size=(3000, 50)) / np.sqrt(50)
    y = g.uniform(size=3000)
    lo, hi = _bracket(g.integers(1, 6, size=3000).astype(float), fixed_thresholds(5), 5)

    cases = []
    for kind in ("sigmoid", "manhattan", "gaussian"):
        code = K.KIND_CODES[kind]
        cases.append((f"pairwise {kind} 2000x500x12",
                      lambda c=code, u=True: K.pairwise_similarity(c, A, Bx, 1 / 12, -1.0, 3.0, use_numba=u),
                      lambda c=code: K.pairwise_similarity(c, A, Bx, 1 / 12, -1.0, 3.0, use_numba=False)))
    cases.append(("psgd eps 3000x50, 500 iters",
                  lambda: K.psgd_eps(Z, y, 10.0, 0.01, 500, use_numba=True),
                  lambda: K.psgd_eps(Z, y, 10.0, 0.01, 500, use_numba=False)))
    cases.append(("psgd margin 3000x50, 500 iters",
                  lambda: K.psgd_margin(Z, lo, hi, 10.0, 0.25, 500, use_numba=True),
                  lambda: K.psgd_margin(Z, lo, hi, 10.0, 0.25, 500, use_numba=False)))

    print(f"{'kernel':36s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, nb, npf in cases:
        t_nb, t_np = timed(nb, args.repeat), timed(npf, args.repeat)
        print(f"{name:36s} {t_nb * 1e3:10.2f} {t_np * 1e3:10.2f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
