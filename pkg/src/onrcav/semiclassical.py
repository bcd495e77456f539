"""Exact steady-state input-output relation and its inversion.

The driven atom-cavity system obeys, per direction,

    P_in = P_t / (4 k1 k2) * { [kappa + W*gamma/((D^2+gamma^2)(1+y))]^2
                             + [-delta + W*Delta/((D^2+gamma^2)(1+y))]^2 }

with W = N g^2, D = Delta (atom-probe detuning), delta the cavity-probe
detuning, y = P_t / P_ct the saturation parameter and
P_ct = kappa_out (Delta^2+gamma^2) / g^2 the direction-dependent critical
flux.  Both powers are photon fluxes (1/s).

Writing u = 1 + y and clearing denominators turns the relation into a
cubic in u,

    a3 u^3 + [2(kappa G - delta H) - a3 - K] u^2
           + [S^2 - 2(kappa G - delta H)] u - S^2 = 0,

with a3 = kappa^2 + delta^2, G = W gamma/(Delta^2+gamma^2),
H = W Delta/(Delta^2+gamma^2), S^2 = G^2 + H^2 and
K = 4 k1 k2 P_in / P_ct.  Physical branches are the real roots with u > 1.
Branch stability follows the sign of dP_in/dP_t, which up to a positive
factor is the depressed cubic

    slope(u) = a3 u^3 - [S^2 - 2(G kappa - delta H)] u + 2 S^2.
"""

from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import DomainError
from .params import Direction, SystemParams

# relative spacing below which two u-roots are one saddle-node double root
MERGE_TOL = 1e-9


@dataclass(frozen=True)
class SteadyStateSolution:
    """One steady-state branch point: output y*P_ct at drive input_flux."""

    y: float
    output_flux: float
    input_flux: float
    stable: bool


def _eq1_terms(params: SystemParams):
    """(kappa, delta_cav, G, H, S2, a3) for the current detunings."""
    d2 = params.delta_atom**2 + params.gamma**2
    w = params.n_eff * params.g**2
    G = w * params.gamma / d2
    H = w * params.delta_atom / d2
    a3 = params.kappa**2 + params.delta_cav**2
    return params.kappa, params.delta_cav, G, H, G * G + H * H, a3


def input_for_output(output_flux, direction: Direction, params: SystemParams):
    """Drive flux producing a given transmitted flux (direct evaluation).

    Accepts scalars or numpy arrays for ``output_flux``.
    """
    out = np.asarray(output_flux, dtype=float)
    if np.any(out < 0):
        raise DomainError("output flux must be >= 0")
    kappa, dc, G, H, _, _ = _eq1_terms(params)
    pct = direction.critical_flux(params)
    u = 1.0 + out / pct
    val = out / (4.0 * params.kappa1 * params.kappa2) * (
        (kappa + G / u) ** 2 + (-dc + H / u) ** 2
    )
    return float(val) if np.ndim(output_flux) == 0 else val


def slope_indicator(u, params: SystemParams):
    """Sign carrier of dP_in/dP_t at u = 1 + y (positive slope: stable)."""
    _, dc, G, H, S2, a3 = _eq1_terms(params)
    u = np.asarray(u, dtype=float)
    return a3 * u**3 - (S2 - 2.0 * (G * params.kappa - dc * H)) * u + 2.0 * S2


def _polish_in_y(y, K_target, kappa, dc, G, H):
    """Newton steps on K(y) = y*B(1+y) with y as the native variable.

    The cubic works in u = 1 + y, which caps the relative precision of
    small roots at eps/y; refining in y restores full precision there.
    """
    valid = ~np.isnan(y) & (y > 0.0)
    yv = np.where(valid, y, 1.0)
    for _ in range(2):
        inv_u = 1.0 / (1.0 + yv)
        t1 = kappa + G * inv_u
        t2 = -dc + H * inv_u
        B = t1 * t1 + t2 * t2
        dB = -2.0 * inv_u * inv_u * (t1 * G + t2 * H)
        f = yv * B - K_target
        fp = B + yv * dB
        step = np.where(valid & (np.abs(fp) > 0.0), f / np.where(fp != 0.0, fp, 1.0), 0.0)
        # oversized steps mean a noise-level derivative (saddle); skip them
        step = np.where(np.abs(step) <= _accel.STEP_LIMIT * (1.0 + np.abs(yv)), step, 0.0)
        yv = np.maximum(yv - step, 0.0)
    return np.where(valid, yv, y)


def saturation_roots(input_fluxes, direction: Direction, params: SystemParams):
    """Batched inversion: y-roots (n, 3), NaN-padded ascending, plus counts.

    Zero drive maps to the trivial root y = 0.  The linear N = 0 case
    bypasses the cubic entirely to avoid ill-conditioned coefficients.
    The cubic is solved in u = 1 + y and then re-polished in y, where
    small saturations keep full relative precision.
    """
    pin = np.atleast_1d(np.asarray(input_fluxes, dtype=float))
    if np.any(pin < 0):
        raise DomainError("input flux must be >= 0")
    kappa, dc, G, H, S2, a3 = _eq1_terms(params)
    pct = direction.critical_flux(params)
    K = 4.0 * params.kappa1 * params.kappa2 * pin / pct

    if params.n_eff == 0.0:
        roots = np.full((pin.shape[0], 3), np.nan)
        roots[:, 0] = K / a3
        return roots, np.ones(pin.shape[0], dtype=np.int64)

    b = (2.0 * (kappa * G - dc * H) - a3 - K) / a3
    c = (S2 - 2.0 * (kappa * G - dc * H)) / a3
    d = -S2 / a3
    u_roots, _ = _accel.cubic_real_roots(b, c, d)

    # keep the physical branch u > 1; zero drive keeps its exact root y = 0
    u_roots[u_roots <= 1.0] = np.nan
    u_roots[pin == 0.0, :] = np.nan
    u_roots[pin == 0.0, 0] = 1.0
    y = _polish_in_y(u_roots - 1.0, K[:, None], kappa, dc, G, H)
    # merge saddle-node duplicates (tolerance on the u scale)
    for k in (0, 1):
        close = np.abs(y[:, k + 1] - y[:, k]) <= MERGE_TOL * np.maximum(
            1.0, np.abs(1.0 + y[:, k + 1])
        )
        y[np.where(close)[0], k + 1] = np.nan
    y = np.sort(y, axis=1)
    counts = (~np.isnan(y)).sum(axis=1).astype(np.int64)
    return y, counts


def output_for_input(input_flux: float, direction: Direction, params: SystemParams):
    """All steady-state solutions for one drive flux, ascending in y."""
    if input_flux < 0:
        raise DomainError("input flux must be >= 0")
    pct = direction.critical_flux(params)
    ys, counts = saturation_roots([input_flux], direction, params)
    ys = ys[0, : counts[0]]
    stable = slope_indicator(1.0 + ys, params) > 0.0
    return [
        SteadyStateSolution(
            y=float(y),
            output_flux=float(y) * pct,
            input_flux=float(input_flux),
            stable=bool(st),
        )
        for y, st in zip(ys, stable)
    ]


def linear_transmission(params: SystemParams) -> float:
    """Weak-drive (y -> 0) power transmission; direction-independent."""
    kappa, dc, G, H, _, _ = _eq1_terms(params)
    return 4.0 * params.kappa1 * params.kappa2 / ((kappa + G) ** 2 + (-dc + H) ** 2)


def approx_forward_output(input_flux, params: SystemParams):
    """First order in C/y: saturated forward output, floored at zero."""
    pin = np.asarray(input_flux, dtype=float)
    if np.any(pin < 0):
        raise DomainError("input flux must be >= 0")
    t0 = 4.0 * params.kappa1 * params.kappa2 / params.kappa**2
    val = np.maximum(
        t0 * pin - 2.0 * params.n_eff * params.kappa2 * params.gamma / params.kappa, 0.0
    )
    return float(val) if np.ndim(input_flux) == 0 else val


def approx_backward_output(input_flux, params: SystemParams):
    """First order in C/y: blocked backward output."""
    pin = np.asarray(input_flux, dtype=float)
    if np.any(pin < 0):
        raise DomainError("input flux must be >= 0")
    t0 = 4.0 * params.kappa1 * params.kappa2 / params.kappa**2
    val = t0 * pin / (1.0 + 2.0 * params.cooperativity) ** 2
    return float(val) if np.ndim(input_flux) == 0 else val


def blocking_ratio_simplified(params: SystemParams):
    """Cooperativity blocking ratio (1+2C)^2 as (linear ratio, dB)."""
    ratio = (1.0 + 2.0 * params.cooperativity) ** 2
    return ratio, 10.0 * np.log10(ratio)
