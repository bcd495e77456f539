#!/usr/bin/env python3
"""Benchmark the cubic-root hot kernel: numba @njit loop vs numpy fallback.

The kernel inverts the steady-state relation for batches of drive values
(sweeps, window metrics, oracle grids).  Both backends share the same
arithmetic; this script times them on realistic coefficient batches and
checks they agree.

Run:  python benchmarks/bench_kernels.py [--sizes 100000,1000000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from onrcav import _accel
from onrcav.params import Direction, get_preset
from onrcav.semiclassical import _eq1_terms


def coefficient_batch(n):
    """Monic cubic coefficients as produced by a realistic drive sweep."""
    params = get_preset("paper-fig2")
    kappa, dc, G, H, S2, a3 = _eq1_terms(params)
    pct = Direction.FORWARD.critical_flux(params)
    pins = np.logspace(4, 10, n)
    K = 4.0 * params.kappa1 * params.kappa2 * pins / pct
    b = (2.0 * (kappa * G - dc * H) - a3 - K) / a3
    c = np.full(n, (S2 - 2.0 * (kappa * G - dc * H)) / a3)
    d = np.full(n, -S2 / a3)
    return b, c, d


def timeit(func, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = func(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="100000,1000000",
                    help="comma list of batch sizes")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    have_numba = "numba" in _accel._IMPL
    print(f"selected backend: {_accel.BACKEND} (ONRCAV_NUMBA={_accel.os.environ.get('ONRCAV_NUMBA', 'unset')})")
    if not have_numba:
        print("numba backend unavailable; timing the numpy path only")

    for n in sizes:
        b, c, d = coefficient_batch(n)
        t_np, (r_np, n_np) = timeit(_accel.cubic_real_roots_numpy, (b, c, d), args.repeats)
        line = f"n={n:>9,d}  numpy {t_np*1e3:9.2f} ms"
        if have_numba:
            numba_fn = _accel._IMPL["numba"]
            numba_fn(b[:16], c[:16], d[:16])  # warm the JIT outside timing
            t_nb, (r_nb, n_nb) = timeit(numba_fn, (b, c, d), args.repeats)
            mask = ~np.isnan(r_np)
            agree = (np.array_equal(n_np, n_nb)
                     and np.array_equal(mask, ~np.isnan(r_nb))
                     and np.allclose(r_np[mask], r_nb[mask], rtol=1e-12, atol=1e-12))
            line += (f"  numba {t_nb*1e3:9.2f} ms  speedup x{t_np/t_nb:5.2f}"
                     f"  agree={agree}")
            if not agree:
                raise SystemExit("backend disagreement, investigate before trusting timings")
        print(line)


if __name__ == "__main__":
    main()
