"""Cavity design: impedance-matched mirror splits and atom-number sizing.

With the total decay rate kappa and the parasitic loss kappa_loss held
fixed, reflectionless (impedance-matched) operation requires
kappa1 = kappa2 + kappa_loss.  Among all asymmetric designs satisfying
kappa1 >= kappa2 + kappa_loss -- the asymmetry the nonreciprocal scheme
needs -- the matched point maximizes the resonant transmission
4 k1 k2 / kappa^2 and has the closed form

    kappa1 = kappa / 2,   kappa2 = kappa / 2 - kappa_loss,
    T = (kappa - 2 kappa_loss) / kappa.
"""

import math
from dataclasses import dataclass

from .bistability import WindowConvention, onr_window
from .errors import DomainError, InfeasibleDesignError
from .params import SystemParams
from .semiclassical import blocking_ratio_simplified, linear_transmission
from .units import (
    flux_to_power,
    mirror_ppm_to_rate,
    rate_to_mhz,
    rate_to_mirror_ppm,
)


@dataclass(frozen=True)
class MirrorSplit:
    kappa1: float
    kappa2: float
    transmission: float
    asymmetric: bool  # False flags the lossless kappa1 == kappa2 limit


def optimal_mirror_split(total_kappa: float, kappa_loss: float) -> MirrorSplit:
    """Impedance-matched split of a fixed total kappa at fixed loss."""
    if total_kappa <= 0:
        raise DomainError(f"total kappa must be > 0, got {total_kappa}")
    if kappa_loss < 0:
        raise DomainError(f"kappa_loss must be >= 0, got {kappa_loss}")
    if total_kappa <= 2.0 * kappa_loss:
        raise InfeasibleDesignError(
            "no matched asymmetric design: need total_kappa > 2*kappa_loss "
            f"(got total 2pi x {rate_to_mhz(total_kappa):.4g} MHz vs loss "
            f"2pi x {rate_to_mhz(kappa_loss):.4g} MHz); kappa2 would be <= 0",
            total_kappa=total_kappa,
            kappa_loss=kappa_loss,
        )
    k1 = total_kappa / 2.0
    k2 = total_kappa / 2.0 - kappa_loss
    return MirrorSplit(
        kappa1=k1,
        kappa2=k2,
        transmission=(total_kappa - 2.0 * kappa_loss) / total_kappa,
        asymmetric=kappa_loss > 0.0,
    )


def required_neff_for_blocking(target_db: float, params_template: SystemParams):
    """(continuous, ceil) atom number reaching a blocking-ratio target.

    Inverts (1 + 2C)^2 with C = N g^2 / (2 kappa gamma); the continuous
    value is the exact solution, the ceiling the smallest workable integer.
    """
    if target_db < 0:
        raise DomainError(f"target blocking ratio must be >= 0 dB, got {target_db}")
    c_needed = (10.0 ** (target_db / 20.0) - 1.0) / 2.0
    p = params_template
    n = c_needed * 2.0 * p.kappa * p.gamma / p.g**2
    return n, math.ceil(n - 1e-12)


def design_report(t1_ppm: float, t2_ppm: float, loss_ppm: float,
                  cavity_length: float, g: float, gamma: float, n_eff: float,
                  wavelength: float = 852.3e-9, delta_atom: float = 0.0,
                  delta_cav: float = 0.0, target_blocking_db: float | None = None) -> dict:
    """One-stop design document (JSON-ready dict).

    Converts the mirror specification to rates, predicts transmission,
    blocking ratio and the nonreciprocity windows, and attaches the
    impedance-matched redesign for the same total kappa and loss.
    """
    k1 = mirror_ppm_to_rate(t1_ppm, cavity_length)
    k2 = mirror_ppm_to_rate(t2_ppm, cavity_length)
    kl = mirror_ppm_to_rate(loss_ppm, cavity_length)
    params = SystemParams(
        kappa1=k1, kappa2=k2, kappa_loss=kl, g=g, gamma=gamma, n_eff=n_eff,
        delta_atom=delta_atom, delta_cav=delta_cav,
        wavelength=wavelength, cavity_length=cavity_length,
    )
    ratio, ratio_db = blocking_ratio_simplified(params)

    report = {
        "inputs": {
            "t1_ppm": t1_ppm,
            "t2_ppm": t2_ppm,
            "loss_ppm": loss_ppm,
            "cavity_length_um": cavity_length * 1e6,
            "g_mhz": rate_to_mhz(g),
            "gamma_mhz": rate_to_mhz(gamma),
            "n_eff": n_eff,
            "wavelength_nm": wavelength * 1e9,
        },
        "rates_mhz": {
            "kappa1": rate_to_mhz(k1),
            "kappa2": rate_to_mhz(k2),
            "kappa_loss": rate_to_mhz(kl),
            "kappa_total": rate_to_mhz(params.kappa),
        },
        "cooperativity": params.cooperativity,
        "forward_saturated_transmission": 4.0 * k1 * k2 / params.kappa**2,
        "linear_transmission": linear_transmission(params),
        "blocking_ratio": ratio,
        "blocking_ratio_db": ratio_db,
    }

    windows = {}
    for conv in WindowConvention:
        w = onr_window(params, conv)
        if w.nonempty:
            windows[conv.value] = {
                "p_lower_pw": flux_to_power(w.p_lower, wavelength) * 1e12,
                "p_upper_pw": flux_to_power(w.p_upper, wavelength) * 1e12,
                "photon_lower": w.photon_lower,
                "photon_upper": w.photon_upper,
            }
        else:
            windows[conv.value] = None
    report["windows"] = windows
    report["status"] = (
        "ok" if windows["guaranteed"] is not None else "no nonreciprocal window"
    )

    try:
        matched = optimal_mirror_split(params.kappa, kl)
        report["matched_design"] = {
            "kappa1_mhz": rate_to_mhz(matched.kappa1),
            "kappa2_mhz": rate_to_mhz(matched.kappa2),
            "t1_ppm": rate_to_mirror_ppm(matched.kappa1, cavity_length),
            "t2_ppm": rate_to_mirror_ppm(matched.kappa2, cavity_length),
            "transmission": matched.transmission,
            "asymmetric": matched.asymmetric,
        }
    except InfeasibleDesignError as exc:
        report["matched_design"] = {"infeasible": str(exc)}

    if target_blocking_db is not None:
        n_cont, n_ceil = required_neff_for_blocking(target_blocking_db, params)
        report["required_n_eff"] = {
            "target_db": target_blocking_db,
            "continuous": n_cont,
            "ceiling": n_ceil,
        }
    return report


def design_report_text(report: dict) -> str:
    """Human-readable rendering of :func:`design_report`."""
    r = report["rates_mhz"]
    lines = [
        "cavity design report",
        f"  mirrors: T1={report['inputs']['t1_ppm']} ppm, "
        f"T2={report['inputs']['t2_ppm']} ppm, loss={report['inputs']['loss_ppm']} ppm, "
        f"L={report['inputs']['cavity_length_um']:.6g} um",
        f"  rates (MHz): kappa1={r['kappa1']:.4g}, kappa2={r['kappa2']:.4g}, "
        f"loss={r['kappa_loss']:.4g}, total={r['kappa_total']:.4g}",
        f"  cooperativity C = {report['cooperativity']:.4g}",
        f"  forward saturated transmission = {report['forward_saturated_transmission']:.4g}",
        f"  weak-drive transmission = {report['linear_transmission']:.4g}",
        f"  blocking ratio = {report['blocking_ratio_db']:.4g} dB",
        f"  status: {report['status']}",
    ]
    for name, w in report["windows"].items():
        if w is None:
            lines.append(f"  {name} window: none")
        else:
            lines.append(
                f"  {name} window: [{w['p_lower_pw']:.4g}, {w['p_upper_pw']:.4g}] pW "
                f"(forward photons {w['photon_lower']:.3g}..{w['photon_upper']:.3g})"
            )
    m = report["matched_design"]
    if "infeasible" in m:
        lines.append(f"  matched redesign: infeasible ({m['infeasible']})")
    else:
        lines.append(
            f"  matched redesign: kappa1={m['kappa1_mhz']:.4g} MHz "
            f"(T1={m['t1_ppm']:.4g} ppm), kappa2={m['kappa2_mhz']:.4g} MHz "
            f"(T2={m['t2_ppm']:.4g} ppm) -> transmission {m['transmission']:.4g}"
        )
    if "required_n_eff" in report:
        q = report["required_n_eff"]
        lines.append(
            f"  atoms for {q['target_db']:.4g} dB blocking: N >= {q['continuous']:.4g} "
            f"(use {q['ceiling']})"
        )
    return "\n".join(lines)
