"""Compare the numba-compiled kernels against the pure-numpy/python fallback.

Run: python3 benchmarks/bench_kernels.py [--size 4096] [--repeats 200]
"""

import argparse
import time

import numpy as np

from bregmangeo import _kernels


def _time(fn, repeats):
    fn()  # warm-up (triggers JIT compilation for the numba variants)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=4096)
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    p = rng.uniform(0.1, 5.0, args.size)
    q = rng.uniform(0.1, 5.0, args.size)
    w_in = rng.uniform(-0.3, 50.0, args.size)
    out = np.empty_like(w_in)

    cases = [
        ("extended_kl_sum", lambda: _kernels.extended_kl_sum(p, q),
         lambda: _kernels._extended_kl_sum_py(p, q)),
        ("itakura_saito_sum", lambda: _kernels.itakura_saito_sum(p, q),
         lambda: _kernels._itakura_saito_sum_py(p, q)),
        ("alpha_div_sum", lambda: _kernels.alpha_div_sum(0.5, p, q),
         lambda: _kernels._alpha_div_sum_py(0.5, p, q)),
        ("lambert_w0_array", lambda: _kernels._lambert_w0_array(w_in, out),
         lambda: _kernels._lambert_w0_array_py(w_in, out)),
    ]

    print(f"size={args.size}  numba_active={_kernels.USE_NUMBA}")
    print(f"{'kernel':<20}{'active (s)':>14}{'python (s)':>14}{'speedup':>10}")
    for name, fast, slow in cases:
        tf = _time(fast, args.repeats)
        ts = _time(slow, max(3, args.repeats // 20))
        print(f"{name:<20}{tf:>14.3e}{ts:>14.3e}{ts / tf:>10.1f}x")


if __name__ == "__main__":
    main()
