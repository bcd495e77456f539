"""S-curves, switching thresholds, nonreciprocity windows and sweeps.

The drive curve P_in(y) of a bistable direction has a local maximum (end
of the lower branch, "up-switch") and a local minimum (start of the upper
branch, "down-switch").  At resonance the extrema sit at the roots of
A u^2 - B u + 2B with A = kappa and B = W/gamma, so bistability requires
B > 8A, i.e. cooperativity C > 4.

Two window conventions are exposed because an operational definition of
the published window bounds is not available:

* GUARANTEED  [forward up-switch, backward down-switch]: the forward field
  is provably on its upper branch and the backward field provably
  single-valued low, independent of drive history;
* HYSTERETIC  [forward down-switch, backward up-switch]: reachable with an
  upward power-sweep history.

The guaranteed window is always contained in the hysteretic one.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .params import Direction, SystemParams
from .semiclassical import (
    SteadyStateSolution,
    _eq1_terms,
    input_for_output,
    saturation_roots,
    slope_indicator,
)
from .units import intracavity_photons


@dataclass(frozen=True)
class SCurve:
    direction: Direction
    samples: tuple  # SteadyStateSolution, ascending in y

    def as_arrays(self):
        y = np.array([s.y for s in self.samples])
        out = np.array([s.output_flux for s in self.samples])
        pin = np.array([s.input_flux for s in self.samples])
        stable = np.array([s.stable for s in self.samples], dtype=bool)
        return y, pin, out, stable


@dataclass(frozen=True)
class SwitchThresholds:
    direction: Direction
    bistable: bool
    up_switch_flux: float | None = None    # local max of P_in(y), end of lower branch
    down_switch_flux: float | None = None  # local min, start of upper branch
    up_switch_y: float | None = None
    down_switch_y: float | None = None


class WindowConvention(Enum):
    GUARANTEED = "guaranteed"
    HYSTERETIC = "hysteretic"

    @classmethod
    def parse(cls, text: str) -> "WindowConvention":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise DomainError(
                f"unknown window convention {text!r}, expected guaranteed|hysteretic"
            ) from None


@dataclass(frozen=True)
class OnrWindow:
    convention: WindowConvention
    nonempty: bool
    p_lower: float | None = None   # flux, 1/s
    p_upper: float | None = None
    photon_lower: float | None = None  # forward upper-branch photons at the edges
    photon_upper: float | None = None


@dataclass(frozen=True)
class WindowMetrics:
    mean_forward_transmission: float
    mean_blocking_ratio_db: float
    forward_slope: float  # least-squares dP_t/dP_in across the window
    input_fluxes: tuple
    forward_transmissions: tuple
    blocking_ratios_db: tuple


@dataclass(frozen=True)
class SweepRow:
    n_eff: float
    forward: SwitchThresholds
    backward: SwitchThresholds
    guaranteed: OnrWindow
    hysteretic: OnrWindow
    metrics: WindowMetrics | None


@dataclass(frozen=True)
class AtomNumberSweep:
    rows: tuple
    p_lower_nondecreasing: bool
    p_upper_nondecreasing: bool


def scurve(direction: Direction, params: SystemParams, y_min=1e-3, y_max=1e4,
           n_samples=800) -> SCurve:
    """Steady-state branch sampled on a log grid of the saturation y."""
    if not (0 < y_min < y_max):
        raise DomainError(f"need 0 < y_min < y_max, got ({y_min}, {y_max})")
    if n_samples < 2:
        raise DomainError(f"need n_samples >= 2, got {n_samples}")
    y = np.logspace(math.log10(y_min), math.log10(y_max), int(n_samples))
    pct = direction.critical_flux(params)
    out = y * pct
    pin = input_for_output(out, direction, params)
    stable = slope_indicator(1.0 + y, params) > 0.0
    samples = tuple(
        SteadyStateSolution(y=float(yi), output_flux=float(oi), input_flux=float(pi),
                            stable=bool(si))
        for yi, oi, pi, si in zip(y, out, pin, stable)
    )
    return SCurve(direction=direction, samples=samples)


def resonant_extrema_closed_form(params: SystemParams):
    """(u_minus, u_plus) from A u^2 - B u + 2B = 0, or None when not bistable.

    Valid at Delta = delta = 0 only; used as an independent cross-check of
    the numerical extremum search.
    """
    A = params.kappa
    B = params.n_eff * params.g**2 / params.gamma
    discr = B * B - 8.0 * A * B
    if discr <= 0:
        return None
    root = math.sqrt(discr)
    return (B - root) / (2.0 * A), (B + root) / (2.0 * A)


def bistability_onset_n_eff(params: SystemParams) -> float:
    """Resonant onset atom number: C > 4, i.e. N > 8 kappa gamma / g^2."""
    return 8.0 * params.kappa * params.gamma / params.g**2


def switch_thresholds(direction: Direction, params: SystemParams,
                      points_per_decade=400, y_min=1e-3) -> SwitchThresholds:
    """Locate the saddle-node extrema of P_in(y) by bracketed root finding.

    The sign carrier of dP_in/dy is scanned on a log grid (default 400
    points per decade) and each sign change is refined with Brent's method
    to 1e-12 relative in y.
    """
    if params.n_eff == 0.0:
        return SwitchThresholds(direction=direction, bistable=False)
    _, dc, G, H, S2, a3 = _eq1_terms(params)
    # Cauchy bound of the slope cubic caps the extremum location
    e1 = (S2 - 2.0 * (G * params.kappa - dc * H)) / a3
    e0 = 2.0 * S2 / a3
    y_max = 10.0 * (1.0 + max(abs(e1), abs(e0)))
    n = max(2, int(points_per_decade * math.log10(y_max / y_min)))
    y = np.logspace(math.log10(y_min), math.log10(y_max), n)
    sl = slope_indicator(1.0 + y, params)
    sign = np.sign(sl)
    flips = np.nonzero(sign[1:] * sign[:-1] < 0)[0]
    if flips.size == 0:
        return SwitchThresholds(direction=direction, bistable=False)
    if flips.size != 2:
        raise RuntimeError(
            f"expected 0 or 2 slope sign changes, found {flips.size}; "
            "the slope cubic admits at most two roots above u = 1"
        )

    def f(yv):
        return float(slope_indicator(1.0 + yv, params))

    ys = [brentq(f, y[i], y[i + 1], rtol=1e-12, xtol=1e-300) for i in flips]
    y_up, y_down = ys[0], ys[1]  # local max first (slope + -> -), then min
    pct = direction.critical_flux(params)
    return SwitchThresholds(
        direction=direction,
        bistable=True,
        up_switch_flux=float(input_for_output(y_up * pct, direction, params)),
        down_switch_flux=float(input_for_output(y_down * pct, direction, params)),
        up_switch_y=float(y_up),
        down_switch_y=float(y_down),
    )


def _forward_upper_photons(input_flux, params, nudge=0.0):
    """Intracavity photons of the largest-y forward branch at that drive.

    ``nudge`` shifts the probe drive by a relative amount: window edges sit
    on saddle thresholds known only to ~1e-12 relative, where the upper
    branch exists on one side only, so edge photon numbers are evaluated a
    hair inside the window.
    """
    ys, counts = saturation_roots([input_flux * (1.0 + nudge)], Direction.FORWARD, params)
    out = ys[0, counts[0] - 1] * Direction.FORWARD.critical_flux(params)
    return intracavity_photons(out, Direction.FORWARD.output_kappa(params))


def onr_window(params: SystemParams,
               convention: WindowConvention = WindowConvention.GUARANTEED) -> OnrWindow:
    """Nonreciprocity working window for the requested convention."""
    fwd = switch_thresholds(Direction.FORWARD, params)
    bwd = switch_thresholds(Direction.BACKWARD, params)
    if not (fwd.bistable and bwd.bistable):
        return OnrWindow(convention=convention, nonempty=False)
    if convention is WindowConvention.GUARANTEED:
        lo, hi = fwd.up_switch_flux, bwd.down_switch_flux
    else:
        lo, hi = fwd.down_switch_flux, bwd.up_switch_flux
    if not lo < hi:
        return OnrWindow(convention=convention, nonempty=False)
    return OnrWindow(
        convention=convention,
        nonempty=True,
        p_lower=lo,
        p_upper=hi,
        photon_lower=float(_forward_upper_photons(lo, params, nudge=1e-9)),
        photon_upper=float(_forward_upper_photons(hi, params, nudge=-1e-9)),
    )


def branch_response(params: SystemParams, input_fluxes):
    """(forward transmission, blocking dB, forward output) per drive flux.

    Branch convention: the forward field takes its highest-output stable
    branch, the backward field its lowest; the blocking ratio compares the
    two outputs at equal input.
    """
    pins = np.asarray(input_fluxes, dtype=float)
    if np.any(pins <= 0):
        raise DomainError("drive fluxes must be > 0 for transmission ratios")
    f_roots, f_counts = saturation_roots(pins, Direction.FORWARD, params)
    b_roots, b_counts = saturation_roots(pins, Direction.BACKWARD, params)
    pct_f = Direction.FORWARD.critical_flux(params)
    pct_b = Direction.BACKWARD.critical_flux(params)

    t_fwd = np.empty(pins.shape)
    ratio_db = np.empty(pins.shape)
    out_fwd = np.empty(pins.shape)
    for i, pin in enumerate(pins):
        yf = f_roots[i, : f_counts[i]]
        yb = b_roots[i, : b_counts[i]]
        sf = slope_indicator(1.0 + yf, params) > 0
        sb = slope_indicator(1.0 + yb, params) > 0
        of = (yf[sf].max() if sf.any() else yf.max()) * pct_f
        ob = (yb[sb].min() if sb.any() else yb.min()) * pct_b
        out_fwd[i] = of
        t_fwd[i] = of / pin
        ratio_db[i] = 10.0 * np.log10(of / ob)
    return t_fwd, ratio_db, out_fwd


def window_metrics(params: SystemParams, window: OnrWindow,
                   n_power_samples=33) -> WindowMetrics:
    """Forward transmission and blocking ratio across a nonempty window.

    Samples are log-spaced across the window and follow the
    :func:`branch_response` convention.  ``forward_slope`` is the
    least-squares dP_t/dP_in over the samples (the saturated differential
    transmission, which impedance matching alone fixes at
    4 k1 k2 / kappa^2).
    """
    if not window.nonempty:
        raise DomainError("window metrics require a nonempty window")
    if n_power_samples < 2:
        raise DomainError(f"need n_power_samples >= 2, got {n_power_samples}")
    pins = np.logspace(math.log10(window.p_lower), math.log10(window.p_upper),
                       int(n_power_samples))
    t_fwd, ratio_db, out_fwd = branch_response(params, pins)
    slope = float(np.polyfit(pins, out_fwd, 1)[0])
    return WindowMetrics(
        mean_forward_transmission=float(t_fwd.mean()),
        mean_blocking_ratio_db=float(ratio_db.mean()),
        forward_slope=slope,
        input_fluxes=tuple(float(p) for p in pins),
        forward_transmissions=tuple(float(t) for t in t_fwd),
        blocking_ratios_db=tuple(float(r) for r in ratio_db),
    )


def sweep_atom_number(params_template: SystemParams, n_eff_list,
                      convention: WindowConvention = WindowConvention.GUARANTEED,
                      n_power_samples=21) -> AtomNumberSweep:
    """Thresholds, windows and metrics versus effective atom number."""
    values = list(n_eff_list)
    if not values:
        raise DomainError("n_eff_list must be nonempty")
    if any(v < 0 for v in values):
        raise DomainError("n_eff values must be >= 0")
    rows = []
    for n in values:
        p = params_template.replace(n_eff=float(n))
        fwd = switch_thresholds(Direction.FORWARD, p)
        bwd = switch_thresholds(Direction.BACKWARD, p)
        guar = onr_window(p, WindowConvention.GUARANTEED)
        hyst = onr_window(p, WindowConvention.HYSTERETIC)
        sel = guar if convention is WindowConvention.GUARANTEED else hyst
        metrics = window_metrics(p, sel, n_power_samples) if sel.nonempty else None
        rows.append(SweepRow(n_eff=float(n), forward=fwd, backward=bwd,
                             guaranteed=guar, hysteretic=hyst, metrics=metrics))

    sel_windows = [
        (r.guaranteed if convention is WindowConvention.GUARANTEED else r.hysteretic)
        for r in rows
    ]
    lowers = [w.p_lower for w in sel_windows if w.nonempty]
    uppers = [w.p_upper for w in sel_windows if w.nonempty]
    mono_l = all(a <= b * (1 + 1e-12) for a, b in zip(lowers, lowers[1:]))
    mono_u = all(a <= b * (1 + 1e-12) for a, b in zip(uppers, uppers[1:]))
    return AtomNumberSweep(rows=tuple(rows), p_lower_nondecreasing=mono_l,
                           p_upper_nondecreasing=mono_u)
