"""Independent numerical oracles used by the test suite.

Nothing here touches the closed-form cubic machinery: roots come from
dense scanning plus bisection of the *direct* drive relation P_in(y), and
extrema from golden-section search on the same curve.  These are the
reference answers the fast paths are checked against.
"""

import numpy as np

from onrcav.semiclassical import input_for_output


def bracketed_roots(input_flux, direction, params, y_lo=1e-10, y_hi=None,
                    points_per_decade=2500, rel_tol=1e-12):
    """All y > 0 with P_in(y) = input_flux, by sign-change bisection."""
    if input_flux == 0.0:
        return [0.0]
    pct = direction.critical_flux(params)
    if y_hi is None:
        # generous cap: even an empty cavity reaches the target by here
        k4 = 4.0 * params.kappa1 * params.kappa2
        y_hi = 100.0 * (1.0 + input_flux * k4 / (pct * params.kappa**2))
    ys = np.logspace(np.log10(y_lo), np.log10(y_hi),
                     int(points_per_decade * np.log10(y_hi / y_lo)))
    vals = input_for_output(ys * pct, direction, params) - input_flux
    sign = np.sign(vals)
    idx = np.nonzero(sign[1:] * sign[:-1] < 0)[0]
    roots = []
    for i in idx:
        lo, hi = ys[i], ys[i + 1]
        flo = vals[i]
        for _ in range(200):
            mid = np.sqrt(lo * hi)
            fm = float(input_for_output(mid * pct, direction, params)) - input_flux
            if flo * fm <= 0:
                hi = mid
            else:
                lo, flo = mid, fm
            if hi - lo <= rel_tol * lo:
                break
        roots.append(0.5 * (lo + hi))
    return roots


def extrema_by_golden_section(direction, params, y_lo=1e-4, y_hi=1e7,
                              points_per_decade=3000):
    """(y, P_in) of each local extremum of the drive curve, scan + golden.

    Returns a list of (y_star, input_flux, is_maximum) in ascending y;
    empty when the curve is monotone.
    """
    pct = direction.critical_flux(params)
    ys = np.logspace(np.log10(y_lo), np.log10(y_hi),
                     int(points_per_decade * np.log10(y_hi / y_lo)))
    p = input_for_output(ys * pct, direction, params)
    dp = np.diff(p)
    sign = np.sign(dp)
    flips = np.nonzero(sign[1:] * sign[:-1] < 0)[0] + 1
    out = []
    gr = (np.sqrt(5.0) - 1.0) / 2.0
    for i in flips:
        is_max = sign[i - 1] > 0

        def f(y):
            v = float(input_for_output(y * pct, direction, params))
            return -v if is_max else v

        a, b = ys[i - 1], ys[i + 1]
        c = b - gr * (b - a)
        d = a + gr * (b - a)
        fc, fd = f(c), f(d)
        for _ in range(300):
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - gr * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + gr * (b - a)
                fd = f(d)
            if b - a <= 1e-14 * a:
                break
        y_star = 0.5 * (a + b)
        out.append((y_star, float(input_for_output(y_star * pct, direction, params)), is_max))
    return out


def brute_force_mirror_scan(total_kappa, kappa_loss, n_points=10_000):
    """Best transmission over asymmetric splits with kappa1 >= kappa2 + loss."""
    coupling = total_kappa - kappa_loss
    k2 = np.linspace(coupling * 1e-6, coupling / 2.0, n_points)
    k1 = coupling - k2
    feasible = k1 >= k2 + kappa_loss
    t = 4.0 * k1 * k2 / total_kappa**2
    t = t[feasible]
    k2 = k2[feasible]
    best = int(np.argmax(t))
    return float(t[best]), float(k2[best])
