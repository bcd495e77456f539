"""Batched real-root kernels for the steady-state cubic.

Inverting the transmission relation means extracting real roots of a monic
cubic per drive value; sweeps, window metrics and oracle scans evaluate it
over large drive grids, which makes this loop the package hot spot.

Two interchangeable backends live here:

* a numba ``@njit`` scalar loop (default when numba imports),
* a vectorized pure-numpy fallback with identical arithmetic.

Selection: set ``ONRCAV_NUMBA=0`` (also ``off``/``false``/``numpy``) to
force the numpy path.  ``benchmarks/bench_kernels.py`` times both and
checks they agree.

Root conventions (shared by both paths): a root pair whose imaginary part
is below 1e-9 of its magnitude counts as a real (saddle-node) double root;
every root gets one Newton polish step; outputs are ascending with NaN
padding in a (n, 3) array plus a count vector.
"""

import math
import os

import numpy as np

IMAG_TOL = 1e-9
# Newton polish steps beyond this fraction of the root scale signal a
# noise-level derivative (near-double root) and are skipped
STEP_LIMIT = 1e-3
_SQRT3_HALF = 0.8660254037844386
_TWO_PI = 2.0 * math.pi


def _backend_choice() -> str:
    env = os.environ.get("ONRCAV_NUMBA", "auto").strip().lower()
    if env in ("0", "false", "off", "numpy"):
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


def cubic_real_roots_numpy(b, c, d):
    """Real roots of u^3 + b u^2 + c u + d for coefficient arrays.

    Returns (roots, counts): roots is (n, 3) ascending with NaN padding.
    """
    b = np.atleast_1d(np.asarray(b, dtype=float))
    c = np.broadcast_to(np.asarray(c, dtype=float), b.shape).copy()
    d = np.broadcast_to(np.asarray(d, dtype=float), b.shape).copy()
    n = b.shape[0]
    roots = np.full((n, 3), np.nan)

    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = 0.25 * q * q + p**3 / 27.0
    shift = b / 3.0

    one = disc > 0
    if np.any(one):
        s = np.sqrt(disc[one])
        alpha = -0.5 * q[one]
        A = np.where(alpha >= 0, np.cbrt(alpha + s), np.cbrt(alpha - s))
        B = np.where(A != 0.0, -p[one] / (3.0 * np.where(A != 0.0, A, 1.0)), 0.0)
        t0 = A + B
        roots[one, 0] = t0 - shift[one]
        # complex pair; accept as a tangent double root when nearly real
        re = -0.5 * t0 - shift[one]
        im = _SQRT3_HALF * np.abs(A - B)
        near = im <= IMAG_TOL * np.maximum(1.0, np.abs(re))
        idx = np.nonzero(one)[0][near]
        roots[idx, 1] = re[near]

    three = ~one
    if np.any(three):
        pj = p[three]
        qj = q[three]
        j = np.sqrt(np.maximum(-pj / 3.0, 0.0))
        safe = j > 0
        arg = np.where(safe, np.clip(-0.5 * qj / np.where(safe, j, 1.0) ** 3, -1.0, 1.0), 1.0)
        theta = np.arccos(arg)
        base = np.nonzero(three)[0]
        for k in range(3):
            tk = 2.0 * j * np.cos((theta - _TWO_PI * k) / 3.0)
            roots[base, k] = np.where(safe, tk, 0.0) - shift[three]
        # triple root (p == q == 0) collapses to a single entry
        roots[base[~safe], 1] = np.nan
        roots[base[~safe], 2] = np.nan

    # two Newton polish steps per root on the original cubic; near a double
    # root f' is noise-level, so oversized steps are rejected rather than
    # applied (the closed form is already within the flat region there)
    valid = ~np.isnan(roots)
    u = np.where(valid, roots, 0.0)
    bb = b[:, None]
    for _ in range(2):
        f = ((u + bb) * u + c[:, None]) * u + d[:, None]
        fp = (3.0 * u + 2.0 * bb) * u + c[:, None]
        step = np.where(valid & (np.abs(fp) > 0.0), f / np.where(fp != 0.0, fp, 1.0), 0.0)
        step = np.where(np.abs(step) <= STEP_LIMIT * (1.0 + np.abs(u)), step, 0.0)
        u = u - step
    roots = np.where(valid, u, np.nan)

    roots = np.sort(roots, axis=1)  # NaNs sort last
    counts = valid.sum(axis=1).astype(np.int64)
    return roots, counts


_IMPL = {"numpy": cubic_real_roots_numpy}

BACKEND = _backend_choice()

if BACKEND == "numba":
    from numba import njit

    @njit(cache=True)
    def _cubic_kernel(b, c, d, roots, counts):  # pragma: no cover - jitted
        for i in range(b.shape[0]):
            bi = b[i]
            ci = c[i]
            di = d[i]
            p = ci - bi * bi / 3.0
            q = 2.0 * bi**3 / 27.0 - bi * ci / 3.0 + di
            disc = 0.25 * q * q + p**3 / 27.0
            shift = bi / 3.0
            m = 0
            if disc > 0.0:
                s = math.sqrt(disc)
                alpha = -0.5 * q
                if alpha >= 0.0:
                    A = (alpha + s) ** (1.0 / 3.0)
                else:
                    A = -((-(alpha - s)) ** (1.0 / 3.0))
                if A != 0.0:
                    B = -p / (3.0 * A)
                else:
                    B = 0.0
                t0 = A + B
                roots[i, 0] = t0 - shift
                m = 1
                re = -0.5 * t0 - shift
                im = _SQRT3_HALF * abs(A - B)
                lim = abs(re)
                if lim < 1.0:
                    lim = 1.0
                if im <= IMAG_TOL * lim:
                    roots[i, 1] = re
                    m = 2
            else:
                jr = -p / 3.0
                if jr < 0.0:
                    jr = 0.0
                j = math.sqrt(jr)
                if j == 0.0:
                    roots[i, 0] = -shift
                    m = 1
                else:
                    arg = -0.5 * q / (j * j * j)
                    if arg > 1.0:
                        arg = 1.0
                    elif arg < -1.0:
                        arg = -1.0
                    theta = math.acos(arg)
                    for k in range(3):
                        roots[i, k] = 2.0 * j * math.cos((theta - _TWO_PI * k) / 3.0) - shift
                    m = 3
            # two Newton polish steps per root, oversized steps rejected
            for k in range(m):
                u = roots[i, k]
                for _ in range(2):
                    f = ((u + bi) * u + ci) * u + di
                    fp = (3.0 * u + 2.0 * bi) * u + ci
                    if fp != 0.0:
                        step = f / fp
                        if abs(step) <= STEP_LIMIT * (1.0 + abs(u)):
                            u = u - step
                roots[i, k] = u
            # ascending order (m <= 3)
            for k in range(1, m):
                v = roots[i, k]
                kk = k
                while kk > 0 and roots[i, kk - 1] > v:
                    roots[i, kk] = roots[i, kk - 1]
                    kk -= 1
                roots[i, kk] = v
            counts[i] = m

    def cubic_real_roots_numba(b, c, d):
        b = np.atleast_1d(np.asarray(b, dtype=float))
        c = np.ascontiguousarray(np.broadcast_to(np.asarray(c, dtype=float), b.shape))
        d = np.ascontiguousarray(np.broadcast_to(np.asarray(d, dtype=float), b.shape))
        roots = np.full((b.shape[0], 3), np.nan)
        counts = np.zeros(b.shape[0], dtype=np.int64)
        _cubic_kernel(np.ascontiguousarray(b), c, d, roots, counts)
        return roots, counts

    _IMPL["numba"] = cubic_real_roots_numba


def cubic_real_roots(b, c, d):
    """Backend-selected batched cubic root solve (see module docstring)."""
    return _IMPL[BACKEND](b, c, d)
