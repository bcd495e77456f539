"""Photon-counting detector model and sweep-data ingestion.

A counting detector with quantum efficiency eta_d, dark rate d and
integration time t reports on average (eta_d * flux + d) * t counts, so
the weaker of two signals saturates at the dark floor first: the apparent
forward/backward blocking ratio (eta_d F_f + d) / (eta_d F_b + d) is
always below the true ratio F_f / F_b and collapses to 0 dB as dark counts
dominate.  That mechanism, not any specific dark rate, is what the module
asserts.

Sweep files are CSV with the fixed header
``input_power_pW,forward_counts,backward_counts,repeats`` (powers in pW to
mirror the usual axes).  Ingestion is total: every row is either parsed or
reported with its line number.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .bistability import switch_thresholds
from .errors import DomainError, IngestError
from .params import Direction, SystemParams
from .semiclassical import saturation_roots, slope_indicator
from .units import power_to_flux

SWEEP_HEADER = ["input_power_pW", "forward_counts", "backward_counts", "repeats"]


@dataclass(frozen=True)
class DetectorModel:
    quantum_efficiency: float   # (0, 1]
    dark_rate: float            # counts/s, >= 0
    integration_time: float     # s, > 0

    def __post_init__(self):
        if not 0.0 < self.quantum_efficiency <= 1.0:
            raise DomainError(
                f"quantum efficiency must be in (0, 1], got {self.quantum_efficiency}"
            )
        if self.dark_rate < 0:
            raise DomainError(f"dark rate must be >= 0, got {self.dark_rate}")
        if self.integration_time <= 0:
            raise DomainError(f"integration time must be > 0, got {self.integration_time}")


@dataclass(frozen=True)
class DetectorReading:
    expected_counts: float
    inferred_flux: float


@dataclass(frozen=True)
class SweepRecord:
    input_power: float   # W
    forward_counts: float
    backward_counts: float
    repeats: int = 1

    def __post_init__(self):
        if not np.isfinite(self.forward_counts) or self.forward_counts < 0:
            raise DomainError(f"forward counts must be finite and >= 0, got {self.forward_counts}")
        if not np.isfinite(self.backward_counts) or self.backward_counts < 0:
            raise DomainError(f"backward counts must be finite and >= 0, got {self.backward_counts}")
        if self.repeats < 1 or int(self.repeats) != self.repeats:
            raise DomainError(f"repeats must be an integer >= 1, got {self.repeats}")
        if self.input_power < 0:
            raise DomainError(f"input power must be >= 0 W, got {self.input_power}")


@dataclass(frozen=True)
class IngestResult:
    records: tuple
    errors: tuple  # "line N: message" strings, one per rejected row


@dataclass(frozen=True)
class MeasuredWindow:
    detected: bool
    p_lower: float | None = None   # W; forward signal first exceeds its baseline rule
    p_upper: float | None = None   # W; backward signal first exceeds its baseline rule


def apply_detector(true_flux: float, det: DetectorModel) -> DetectorReading:
    """Expected counts for a flux, and the flux inferred back from them."""
    if true_flux < 0:
        raise DomainError(f"flux must be >= 0, got {true_flux}")
    counts = (det.quantum_efficiency * true_flux + det.dark_rate) * det.integration_time
    inferred = max(counts / det.integration_time - det.dark_rate, 0.0) / det.quantum_efficiency
    return DetectorReading(expected_counts=counts, inferred_flux=inferred)


def apparent_blocking_ratio_db(forward_flux: float, backward_flux: float,
                               det: DetectorModel) -> float:
    """Raw-count forward/backward ratio, dark floor included (no subtraction)."""
    f = apply_detector(forward_flux, det).expected_counts
    b = apply_detector(backward_flux, det).expected_counts
    if b <= 0:
        raise DomainError("backward expected counts are zero; need dark_rate > 0 or signal")
    return 10.0 * float(np.log10(f / b))


def ingest_sweep(path) -> IngestResult:
    """Parse a sweep CSV; returns records plus per-row error report.

    Raises IngestError for an unusable file (bad header or fewer than 3
    valid rows).  Individual malformed rows are reported, not fatal.
    """
    records, errors = [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [cell.strip() for cell in next(reader)]
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        if header != SWEEP_HEADER:
            raise IngestError(
                f"{path}: bad header {header!r}, expected {','.join(SWEEP_HEADER)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 4:
                errors.append(f"line {lineno}: expected 4 columns, got {len(row)}")
                continue
            try:
                rec = SweepRecord(
                    input_power=float(row[0]) * 1e-12,
                    forward_counts=float(row[1]),
                    backward_counts=float(row[2]),
                    repeats=int(row[3]),
                )
            except (ValueError, DomainError) as exc:
                errors.append(f"line {lineno}: {exc}")
                continue
            records.append(rec)
    if len(records) < 3:
        raise IngestError(
            f"{path}: need at least 3 valid sweep points, got {len(records)} "
            f"({len(errors)} rejected rows)"
        )
    return IngestResult(records=tuple(records), errors=tuple(errors))


def measured_window(records, threshold_rule: float = 5.0,
                    baseline_points: int = 3) -> MeasuredWindow:
    """Window edges from data: first powers where each signal leaves its floor.

    The baseline of each trace is the mean of its ``baseline_points``
    lowest-power samples; an edge is the first power whose counts exceed
    ``threshold_rule`` times that baseline.  The window opens when the
    forward trace jumps and closes when the backward trace jumps.
    """
    if threshold_rule <= 1.0:
        raise DomainError(f"threshold rule must be > 1, got {threshold_rule}")
    recs = sorted(records, key=lambda r: r.input_power)
    if len(recs) < 3:
        raise DomainError(f"need at least 3 sweep points, got {len(recs)}")
    nb = min(max(baseline_points, 1), len(recs))
    base_f = float(np.mean([r.forward_counts for r in recs[:nb]]))
    base_b = float(np.mean([r.backward_counts for r in recs[:nb]]))

    def first_jump(counts_of, baseline):
        if baseline <= 0:
            baseline = 1.0
        for r in recs:
            if counts_of(r) > threshold_rule * baseline:
                return r.input_power
        return None

    p_low = first_jump(lambda r: r.forward_counts, base_f)
    p_up = first_jump(lambda r: r.backward_counts, base_b)
    if p_low is None:
        return MeasuredWindow(detected=False)
    if p_up is not None and p_up <= p_low:
        return MeasuredWindow(detected=False, p_lower=p_low, p_upper=p_up)
    return MeasuredWindow(detected=True, p_lower=p_low, p_upper=p_up)


def measured_metrics(records, det: DetectorModel, window: MeasuredWindow | None = None,
                     wavelength: float = 852.3e-9) -> dict:
    """Mean transmission and apparent blocking ratio over (windowed) records.

    Transmission uses the background-subtracted inferred forward flux;
    the blocking ratio deliberately uses raw count ratios, which is what a
    counting measurement without background subtraction reports.
    """
    recs = sorted(records, key=lambda r: r.input_power)
    if window is not None and window.detected:
        hi = window.p_upper if window.p_upper is not None else float("inf")
        recs = [r for r in recs if window.p_lower <= r.input_power <= hi]
    if not recs:
        raise DomainError("no sweep records inside the requested window")
    trans, ratios = [], []
    for r in recs:
        pin_flux = power_to_flux(r.input_power, wavelength)
        if pin_flux <= 0:
            continue
        fwd_flux = max(
            r.forward_counts / det.integration_time - det.dark_rate, 0.0
        ) / det.quantum_efficiency
        trans.append(fwd_flux / pin_flux)
        if r.backward_counts > 0:
            ratios.append(10.0 * np.log10(r.forward_counts / r.backward_counts))
    if not trans:
        raise DomainError("no usable rows (all zero input power)")
    return {
        "n_rows": len(recs),
        "mean_transmission": float(np.mean(trans)),
        "mean_blocking_ratio_db": float(np.mean(ratios)) if ratios else float("nan"),
    }


def _upward_sweep_output(pins, direction: Direction, params: SystemParams):
    """Transmitted flux along an upward power sweep (hysteretic branch)."""
    th = switch_thresholds(direction, params)
    pct = direction.critical_flux(params)
    roots, counts = saturation_roots(pins, direction, params)
    out = np.empty(pins.shape)
    for i, pin in enumerate(pins):
        ys = roots[i, : counts[i]]
        st = slope_indicator(1.0 + ys, params) > 0
        stable = ys[st] if st.any() else ys
        if th.bistable and pin > th.up_switch_flux:
            y = stable.max()   # lower branch has vanished or been left behind
        else:
            y = stable.min()
        out[i] = y * pct
    return out


def synthesize_sweep(params: SystemParams, powers_w, det: DetectorModel,
                     repeats: int = 1, poisson: bool = False, seed: int | None = None):
    """Detector records for an upward power sweep of both directions.

    Deterministic expected-value counts by default; ``poisson=True`` draws
    seeded Poisson counts (averaged over ``repeats``) for realistic
    synthetic datasets.
    """
    powers = np.asarray(sorted(powers_w), dtype=float)
    if powers.size == 0:
        raise DomainError("powers_w must be nonempty")
    if np.any(powers < 0):
        raise DomainError("powers must be >= 0 W")
    pins = np.array([power_to_flux(p, params.wavelength) for p in powers])
    out_f = _upward_sweep_output(pins, Direction.FORWARD, params)
    out_b = _upward_sweep_output(pins, Direction.BACKWARD, params)
    rng = np.random.default_rng(seed) if poisson else None
    records = []
    for p, ff, fb in zip(powers, out_f, out_b):
        cf = apply_detector(ff, det).expected_counts
        cb = apply_detector(fb, det).expected_counts
        if poisson:
            cf = float(rng.poisson(cf, size=repeats).mean())
            cb = float(rng.poisson(cb, size=repeats).mean())
        records.append(SweepRecord(input_power=float(p), forward_counts=cf,
                                   backward_counts=cb, repeats=repeats))
    return records


def write_sweep_csv(path, records):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_HEADER)
        for r in records:
            writer.writerow([
                f"{r.input_power * 1e12:.10g}",
                f"{r.forward_counts:.10g}",
                f"{r.backward_counts:.10g}",
                str(r.repeats),
            ])
