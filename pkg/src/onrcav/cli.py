"""Command-line front end: plot-ready CSV tables and JSON reports.

Every subcommand is deterministic (synthetic Poisson data takes an
explicit --seed), writes CSV for curves/tables and JSON for reports, and
exits 0 on success or 2 with a structured JSON error on stderr.  Column
schemas are documented in docs/formats.md and in each subcommand's --help.

Power ranges are written START:STOP:STEP<unit> for linear steps or
START:STOP:COUNTx<unit> for log spacing, with unit one of pW, nW, uW, W
(default pW), e.g. ``--powers 30:110:10pW`` or ``--drive-scan 1:200:15xpW``.
"""

import argparse
import csv
import json
import re
import sys

import numpy as np

from . import bistability, design, measurement, quantum, spectrum
from .errors import DomainError
from .params import Direction, PRESETS, SystemParams, get_preset, load_config
from .units import (
    TWO_PI,
    flux_to_power,
    intracavity_photons,
    mhz_to_rate,
    power_to_flux,
    rate_to_mhz,
)

_UNIT_SCALE = {"pW": 1e-12, "nW": 1e-9, "uW": 1e-6, "W": 1.0}
_RANGE_RE = re.compile(
    r"^\s*([-+0-9.eE]+):([-+0-9.eE]+):([0-9.eE+]+)(x)?(pW|nW|uW|W)?\s*$"
)


def parse_power_range(text: str) -> np.ndarray:
    """Powers in watts from START:STOP:STEPunit or START:STOP:COUNTxunit."""
    m = _RANGE_RE.match(text)
    if not m:
        raise DomainError(
            f"bad power range {text!r}; expected e.g. 30:110:10pW or 1:200:15xpW"
        )
    start, stop, third = float(m.group(1)), float(m.group(2)), float(m.group(3))
    logmode = m.group(4) == "x"
    scale = _UNIT_SCALE[m.group(5) or "pW"]
    if logmode:
        count = int(third)
        if count < 2 or start <= 0 or stop <= start:
            raise DomainError(f"bad log power range {text!r}")
        vals = np.logspace(np.log10(start), np.log10(stop), count)
    else:
        if third <= 0 or stop < start:
            raise DomainError(f"bad linear power range {text!r}")
        vals = np.arange(start, stop + third * 1e-9, third)
    return vals * scale


def parse_mhz_grid(text: str) -> np.ndarray:
    """Strictly increasing grid in rad/s from START:STOP:STEP (MHz)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"bad grid {text!r}; expected START:STOP:STEP in MHz")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise DomainError(f"bad grid {text!r}") from None
    if step <= 0 or stop <= start:
        raise DomainError(f"bad grid {text!r}")
    return np.arange(start, stop + step * 1e-9, step) * TWO_PI * 1e6


def parse_detector(text: str) -> measurement.DetectorModel:
    """Detector spec 'dark=RATE,eff=FRACTION,t=SECONDS'."""
    fields = {}
    for item in text.split(","):
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in ("dark", "eff", "t"):
            raise DomainError(f"bad detector field {key!r}; expected dark=,eff=,t=")
        try:
            fields[key] = float(val)
        except ValueError:
            raise DomainError(f"bad detector value {item!r}") from None
    missing = {"dark", "eff", "t"} - set(fields)
    if missing:
        raise DomainError(f"detector spec missing {sorted(missing)}")
    return measurement.DetectorModel(
        quantum_efficiency=fields["eff"],
        dark_rate=fields["dark"],
        integration_time=fields["t"],
    )


def _params_from_args(args) -> SystemParams:
    p = get_preset(args.preset)
    if getattr(args, "config", None):
        p = load_config(args.config, base=p)
    if getattr(args, "neff", None) is not None:
        p = p.replace(n_eff=args.neff)
    if getattr(args, "resonant", False):
        p = p.replace(delta_atom=0.0, delta_cav=0.0)
    return p


def _add_params_flags(sub):
    sub.add_argument("--preset", default="paper-fig2",
                     help=f"named parameter preset ({', '.join(sorted(PRESETS))})")
    sub.add_argument("--config", default=None,
                     help="key=value parameter file overriding the preset "
                          "(rates in MHz, wavelength nm, cavity_length um)")
    sub.add_argument("--neff", type=float, default=None,
                     help="override the effective atom number")
    sub.add_argument("--resonant", action="store_true",
                     help="zero both detunings (probe on atom and cavity resonance)")


def _write_csv(out, header, rows):
    """CSV to a path or stdout ('-'); floats at 10 significant digits."""

    def fmt(v):
        if isinstance(v, bool):
            return "1" if v else "0"
        if isinstance(v, float):
            return f"{v:.10g}"
        return str(v)

    fh = sys.stdout if out == "-" else open(out, "w", encoding="utf-8", newline="")
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    finally:
        if fh is not sys.stdout:
            fh.close()


def _print_json(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def _pw(flux, params):
    return flux_to_power(flux, params.wavelength) * 1e12


def _thresholds_json(th, params):
    if not th.bistable:
        return {"bistable": False}
    return {
        "bistable": True,
        "up_switch_pw": _pw(th.up_switch_flux, params),
        "down_switch_pw": _pw(th.down_switch_flux, params),
    }


def _cmd_scurve(args) -> int:
    params = _params_from_args(args)
    direction = Direction.parse(args.direction)
    curve = bistability.scurve(direction, params, y_min=args.y_min,
                               y_max=args.y_max, n_samples=args.samples)
    y, pin, out, stable = curve.as_arrays()
    okap = direction.output_kappa(params)
    rows = [
        (float(yi), _pw(pi, params), _pw(oi, params), float(pi), float(oi),
         intracavity_photons(oi, okap), bool(si))
        for yi, pi, oi, si in zip(y, pin, out, stable)
    ]
    _write_csv(args.out, ["y", "input_pW", "output_pW", "input_flux_per_s",
                          "output_flux_per_s", "intracavity_photons", "stable"], rows)
    return 0


def _cmd_window(args) -> int:
    params = _params_from_args(args)
    conv = bistability.WindowConvention.parse(args.convention)
    window = bistability.onr_window(params, conv)
    fwd = bistability.switch_thresholds(Direction.FORWARD, params)
    bwd = bistability.switch_thresholds(Direction.BACKWARD, params)
    doc = {
        "convention": conv.value,
        "n_eff": params.n_eff,
        "status": "ok" if window.nonempty else "empty window",
        "thresholds": {
            "forward": _thresholds_json(fwd, params),
            "backward": _thresholds_json(bwd, params),
        },
    }
    if window.nonempty:
        doc.update({
            "p_lower_pw": _pw(window.p_lower, params),
            "p_upper_pw": _pw(window.p_upper, params),
            "photon_lower": window.photon_lower,
            "photon_upper": window.photon_upper,
        })
    _print_json(doc)
    return 0


def _cmd_sweep_neff(args) -> int:
    params = _params_from_args(args)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"bad --values list {args.values!r}") from None
    conv = bistability.WindowConvention.parse(args.convention)
    sweep = bistability.sweep_atom_number(params, values, convention=conv,
                                          n_power_samples=args.samples)
    rows = []
    for r in sweep.rows:
        def pwn(v):
            return _pw(v, params) if v is not None else ""
        rows.append((
            r.n_eff,
            bool(r.forward.bistable and r.backward.bistable),
            pwn(r.forward.up_switch_flux), pwn(r.forward.down_switch_flux),
            pwn(r.backward.up_switch_flux), pwn(r.backward.down_switch_flux),
            pwn(r.guaranteed.p_lower), pwn(r.guaranteed.p_upper),
            pwn(r.hysteretic.p_lower), pwn(r.hysteretic.p_upper),
            r.metrics.mean_forward_transmission if r.metrics else "",
            r.metrics.mean_blocking_ratio_db if r.metrics else "",
            r.metrics.forward_slope if r.metrics else "",
        ))
    _write_csv(args.out, [
        "n_eff", "bistable", "fwd_up_pW", "fwd_down_pW", "bwd_up_pW", "bwd_down_pW",
        "guaranteed_lower_pW", "guaranteed_upper_pW",
        "hysteretic_lower_pW", "hysteretic_upper_pW",
        "mean_forward_transmission", "mean_blocking_ratio_db", "forward_slope",
    ], rows)
    if args.out != "-":
        _print_json({
            "convention": conv.value,
            "p_lower_nondecreasing": sweep.p_lower_nondecreasing,
            "p_upper_nondecreasing": sweep.p_upper_nondecreasing,
            "rows": len(sweep.rows),
        })
    return 0


def _cmd_metrics(args) -> int:
    params = _params_from_args(args)
    powers = parse_power_range(args.powers)
    fluxes = np.array([power_to_flux(p, params.wavelength) for p in powers])
    t_fwd, ratio_db, out_fwd = bistability.branch_response(params, fluxes)
    rows = [
        (p * 1e12, float(t), float(r), float(o))
        for p, t, r, o in zip(powers, t_fwd, ratio_db, out_fwd)
    ]
    _write_csv(args.out, ["input_pW", "forward_transmission", "blocking_ratio_db",
                          "forward_output_flux_per_s"], rows)
    if args.out != "-":
        slope = float(np.polyfit(fluxes, out_fwd, 1)[0]) if len(fluxes) > 1 else float("nan")
        _print_json({
            "mean_forward_transmission": float(np.mean(t_fwd)),
            "mean_blocking_ratio_db": float(np.mean(ratio_db)),
            "forward_slope": slope,
            "n_powers": len(rows),
        })
    return 0


def _cmd_spectrum(args) -> int:
    params = _params_from_args(args)
    grid = parse_mhz_grid(args.grid)
    offset = (mhz_to_rate(args.offset_mhz) if args.offset_mhz is not None
              else params.atom_cavity_offset)
    spec = spectrum.transmission_spectrum(params, offset, grid)
    off, val = spec.arrays()
    rows = [(o / (TWO_PI * 1e6), float(v)) for o, v in zip(off, val)]
    _write_csv(args.out, ["offset_MHz", "transmission"], rows)
    return 0


def _cmd_fit_neff(args) -> int:
    params = _params_from_args(args)
    data = spectrum.read_spectrum_csv(args.infile)
    result = spectrum.fit_neff(data, params, fit_amplitude=args.fit_amplitude,
                               fit_background=args.fit_background)
    _print_json({
        "n_eff_hat": result.n_eff_hat,
        "residual_rms": result.residual_rms,
        "confidence_halfwidth": result.confidence_halfwidth,
        "amplitude": result.amplitude,
        "background": result.background,
        "n_points": len(data.offsets),
    })
    return 0


def _cmd_design(args) -> int:
    if args.optimize and args.t1_ppm is None:
        if args.kappa_mhz is None or args.loss_mhz is None:
            raise DomainError("--optimize without mirror ppms needs --kappa-mhz and --loss-mhz")
        split = design.optimal_mirror_split(mhz_to_rate(args.kappa_mhz),
                                            mhz_to_rate(args.loss_mhz))
        _print_json({
            "kappa1_mhz": rate_to_mhz(split.kappa1),
            "kappa2_mhz": rate_to_mhz(split.kappa2),
            "transmission": split.transmission,
            "asymmetric": split.asymmetric,
        })
        return 0
    if args.t1_ppm is None or args.t2_ppm is None or args.loss_ppm is None:
        raise DomainError("design needs --t1-ppm, --t2-ppm and --loss-ppm (or --optimize with --kappa-mhz/--loss-mhz)")
    report = design.design_report(
        t1_ppm=args.t1_ppm, t2_ppm=args.t2_ppm, loss_ppm=args.loss_ppm,
        cavity_length=args.length_um * 1e-6,
        g=mhz_to_rate(args.g_mhz), gamma=mhz_to_rate(args.gamma_mhz),
        n_eff=args.neff if args.neff is not None else 0.0,
        wavelength=args.wavelength_nm * 1e-9,
        target_blocking_db=args.target_db,
    )
    if args.text:
        print(design.design_report_text(report))
    else:
        _print_json(report)
    return 0


def _cmd_quantum_validate(args) -> int:
    params = _params_from_args(args)
    if args.g_mhz is not None:
        params = params.replace(g=mhz_to_rate(args.g_mhz))
    direction = Direction.parse(args.direction)
    powers = parse_power_range(args.drive_scan)
    fluxes = [power_to_flux(p, params.wavelength) for p in powers]
    template = quantum.QuantumModel(
        params=params, n_atoms=args.n_atoms, fock_dim=args.fock,
        drive_amplitude=0.0, direction=direction, dim_cap=args.dim_cap,
    )
    curve = quantum.quantum_io_curve(template, fluxes)
    rows = [
        (_pw(pin, params), float(pin), float(out), float(out / pin) if pin > 0 else 0.0,
         float(nbar), bool(ok))
        for (pin, out, nbar, ok) in curve
    ]
    _write_csv(args.out, ["input_pW", "input_flux_per_s", "output_flux_per_s",
                          "transmission", "mean_photon_number", "adequate"], rows)
    return 0


def _cmd_ingest(args) -> int:
    det = parse_detector(args.detector)
    result = measurement.ingest_sweep(args.infile)
    window = measurement.measured_window(result.records, threshold_rule=args.threshold)
    doc = {
        "n_records": len(result.records),
        "row_errors": list(result.errors),
        "window": {
            "detected": window.detected,
            "p_lower_pw": window.p_lower * 1e12 if window.p_lower is not None else None,
            "p_upper_pw": window.p_upper * 1e12 if window.p_upper is not None else None,
        },
    }
    if window.detected:
        doc["metrics"] = measurement.measured_metrics(
            result.records, det, window=window, wavelength=args.wavelength_nm * 1e-9
        )
    else:
        doc["status"] = "no window detected"
    _print_json(doc)
    return 0


def _cmd_synth(args) -> int:
    params = _params_from_args(args)
    det = parse_detector(args.detector)
    if args.poisson and args.seed is None:
        raise DomainError("--poisson requires an explicit --seed")
    powers = parse_power_range(args.powers)
    records = measurement.synthesize_sweep(
        params, powers, det, repeats=args.repeats,
        poisson=args.poisson, seed=args.seed,
    )
    if args.out == "-":
        _write_csv("-", measurement.SWEEP_HEADER,
                   [(r.input_power * 1e12, r.forward_counts, r.backward_counts,
                     r.repeats) for r in records])
    else:
        measurement.write_sweep_csv(args.out, records)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onrcav",
        description="Steady-state nonreciprocal transmission toolkit for an "
                    "asymmetric atom-cavity system (CSV/JSON outputs; see "
                    "docs/formats.md for column schemas).",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser(
        "scurve",
        help="bistability S-curve sampled over the saturation parameter",
        description="CSV columns: y, input_pW, output_pW, input_flux_per_s, "
                    "output_flux_per_s, intracavity_photons, stable.")
    _add_params_flags(s)
    s.add_argument("--direction", default="forward", help="forward|backward")
    s.add_argument("--y-min", type=float, default=1e-3)
    s.add_argument("--y-max", type=float, default=1e4)
    s.add_argument("--samples", type=int, default=800)
    s.add_argument("--out", default="-", help="CSV path or - for stdout")
    s.set_defaults(func=_cmd_scurve)

    s = subs.add_parser("window", help="nonreciprocity working window (JSON)")
    _add_params_flags(s)
    s.add_argument("--convention", default="guaranteed", help="guaranteed|hysteretic")
    s.set_defaults(func=_cmd_window)

    s = subs.add_parser(
        "sweep-neff",
        help="thresholds/windows/metrics vs atom number (CSV)",
        description="CSV columns: n_eff, bistable, fwd_up_pW, fwd_down_pW, "
                    "bwd_up_pW, bwd_down_pW, guaranteed_lower_pW, guaranteed_upper_pW, "
                    "hysteretic_lower_pW, hysteretic_upper_pW, mean_forward_transmission, "
                    "mean_blocking_ratio_db, forward_slope. Monotonicity summary JSON "
                    "goes to stdout when --out is a file.")
    _add_params_flags(s)
    s.add_argument("--values", required=True, help="comma list, e.g. 3.0,5.2,8.1,12.8,14.7")
    s.add_argument("--convention", default="guaranteed")
    s.add_argument("--samples", type=int, default=21, help="powers per window for metrics")
    s.add_argument("--out", default="-")
    s.set_defaults(func=_cmd_sweep_neff)

    s = subs.add_parser(
        "metrics",
        help="transmission and blocking ratio at given powers (CSV)",
        description="CSV columns: input_pW, forward_transmission, "
                    "blocking_ratio_db, forward_output_flux_per_s. Summary JSON with "
                    "mean_forward_transmission, mean_blocking_ratio_db and forward_slope "
                    "goes to stdout when --out is a file.")
    _add_params_flags(s)
    s.add_argument("--powers", required=True, help="e.g. 30:110:10pW or 10:1000:25xpW")
    s.add_argument("--out", default="-")
    s.set_defaults(func=_cmd_metrics)

    s = subs.add_parser(
        "spectrum",
        help="weak-drive transmission spectrum (CSV)",
        description="CSV columns: offset_MHz, transmission (readable back "
                    "by fit-neff).")
    _add_params_flags(s)
    s.add_argument("--grid", default="-40:40:0.1",
                   help="cavity-probe offsets, MHz START:STOP:STEP "
                        "(use --grid=-40:40:0.1 for negative starts)")
    s.add_argument("--offset-mhz", type=float, default=None,
                   help="atom-cavity offset in MHz (default: preset Delta - delta)")
    s.add_argument("--out", default="-")
    s.set_defaults(func=_cmd_spectrum)

    s = subs.add_parser("fit-neff", help="fit the atom number from a spectrum CSV (JSON)")
    _add_params_flags(s)
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--fit-amplitude", action="store_true",
                   help="fit a global amplitude (for uncalibrated count data)")
    s.add_argument("--fit-background", action="store_true",
                   help="fit a constant background level")
    s.set_defaults(func=_cmd_fit_neff)

    s = subs.add_parser("design", help="cavity design report / impedance-matched split (JSON)")
    s.add_argument("--t1-ppm", type=float, default=None)
    s.add_argument("--t2-ppm", type=float, default=None)
    s.add_argument("--loss-ppm", type=float, default=None)
    s.add_argument("--length-um", type=float, default=335.0)
    s.add_argument("--g-mhz", type=float, default=5.5)
    s.add_argument("--gamma-mhz", type=float, default=2.6)
    s.add_argument("--neff", type=float, default=None)
    s.add_argument("--wavelength-nm", type=float, default=852.3)
    s.add_argument("--target-db", type=float, default=None,
                   help="also report the atom number needed for this blocking ratio")
    s.add_argument("--optimize", action="store_true",
                   help="impedance-matched split only (with --kappa-mhz/--loss-mhz)")
    s.add_argument("--kappa-mhz", type=float, default=None, help="total kappa for --optimize")
    s.add_argument("--loss-mhz", type=float, default=None, help="kappa_loss for --optimize")
    s.add_argument("--text", action="store_true", help="human-readable report instead of JSON")
    s.set_defaults(func=_cmd_design)

    s = subs.add_parser(
        "quantum-validate",
        help="quantum steady-state drive scan (CSV)",
        description="CSV columns: input_pW, input_flux_per_s, output_flux_per_s, "
                    "transmission, mean_photon_number, adequate.")
    _add_params_flags(s)
    s.add_argument("--n-atoms", type=int, default=1)
    s.add_argument("--fock", type=int, default=20)
    s.add_argument("--g-mhz", type=float, default=None, help="override the coupling rate")
    s.add_argument("--direction", default="forward")
    s.add_argument("--drive-scan", required=True, help="e.g. 0.5:50:13xpW")
    s.add_argument("--dim-cap", type=int, default=quantum.DEFAULT_DIM_CAP)
    s.add_argument("--out", default="-")
    s.set_defaults(func=_cmd_quantum_validate)

    s = subs.add_parser("ingest", help="analyze a measured sweep CSV (JSON)")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--detector", required=True, help="dark=RATE,eff=FRACTION,t=SECONDS")
    s.add_argument("--threshold", type=float, default=5.0,
                   help="window edge rule: counts exceed THRESHOLD x low-power baseline")
    s.add_argument("--wavelength-nm", type=float, default=852.3)
    s.set_defaults(func=_cmd_ingest)

    s = subs.add_parser(
        "synth",
        help="synthesize a detector sweep CSV from the model",
        description="CSV columns: input_power_pW, forward_counts, "
                    "backward_counts, repeats (the ingest schema).")
    _add_params_flags(s)
    s.add_argument("--powers", required=True, help="e.g. 10:5000:60xpW")
    s.add_argument("--detector", required=True, help="dark=RATE,eff=FRACTION,t=SECONDS")
    s.add_argument("--repeats", type=int, default=1)
    s.add_argument("--poisson", action="store_true", help="draw Poisson counts (needs --seed)")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", default="-")
    s.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # structured nonzero exit for module errors
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
