"""Linear transmission spectra and atom-number fits.

In the weak-drive limit the transmission spectrum of the coupled system
shows the normal-mode doublet at roughly +/- sqrt(N)*g around the midpoint
of cavity and atomic resonance; its splitting is what the atom-number fit
keys on.  Spectra are parameterized by the cavity-probe offset
delta = w_cavity - w_probe, so a scan corresponds to sweeping the probe at
fixed atom-cavity offset w_atom - w_cavity.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FitError
from .params import SystemParams
from .units import TWO_PI


@dataclass(frozen=True)
class SpectrumData:
    """Sampled transmission spectrum.

    ``offsets`` are cavity-probe detunings delta (rad/s), strictly
    increasing; ``values`` are transmissions in [0, 1] or raw counts
    (a global amplitude/background can be fitted for count data).
    """

    offsets: tuple
    values: tuple

    def __post_init__(self):
        off = np.asarray(self.offsets, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if off.ndim != 1 or off.shape != val.shape:
            raise DomainError("offsets and values must be 1-d and equally long")
        if off.size >= 2 and not np.all(np.diff(off) > 0):
            raise DomainError("probe offsets must be strictly increasing")
        if np.any(val < 0):
            raise DomainError("transmissions/counts must be >= 0")

    def arrays(self):
        return np.asarray(self.offsets, dtype=float), np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class FitResult:
    n_eff_hat: float
    residual_rms: float
    confidence_halfwidth: float
    amplitude: float = 1.0
    background: float = 0.0


def _linear_transmission_grid(params: SystemParams, atom_cavity_offset, deltas, n_eff):
    """Vectorized weak-drive transmission at cavity-probe offsets ``deltas``."""
    delta_atom = atom_cavity_offset + deltas
    d2 = delta_atom**2 + params.gamma**2
    w = n_eff * params.g**2
    G = w * params.gamma / d2
    H = w * delta_atom / d2
    return 4.0 * params.kappa1 * params.kappa2 / ((params.kappa + G) ** 2 + (-deltas + H) ** 2)


def transmission_spectrum(params: SystemParams, atom_cavity_offset: float,
                          probe_grid) -> SpectrumData:
    """Weak-drive spectrum over a strictly increasing cavity-offset grid."""
    grid = np.asarray(probe_grid, dtype=float)
    if grid.size >= 2 and not np.all(np.diff(grid) > 0):
        raise DomainError("probe grid must be strictly increasing")
    t = _linear_transmission_grid(params, atom_cavity_offset, grid, params.n_eff)
    return SpectrumData(offsets=tuple(float(x) for x in grid),
                        values=tuple(float(x) for x in t))


def peak_splitting(spec: SpectrumData) -> float:
    """Distance (rad/s) between the two tallest local maxima of a spectrum."""
    off, val = spec.arrays()
    if off.size < 3:
        raise DomainError("need at least 3 points to locate peaks")
    interior = np.nonzero((val[1:-1] >= val[:-2]) & (val[1:-1] >= val[2:]))[0] + 1
    if interior.size < 2:
        return 0.0
    top = interior[np.argsort(val[interior])][-2:]
    return float(abs(off[top[0]] - off[top[1]]))


def _residual(values, model, fit_amplitude, fit_background):
    """SSR after the optimal linear (amplitude, background) solve."""
    if fit_amplitude and fit_background:
        A = np.column_stack([model, np.ones_like(model)])
        coef, *_ = np.linalg.lstsq(A, values, rcond=None)
        amp, bg = float(coef[0]), float(coef[1])
        r = values - (amp * model + bg)
    elif fit_amplitude:
        denom = float(model @ model)
        amp = float(model @ values) / denom if denom > 0 else 0.0
        bg = 0.0
        r = values - amp * model
    elif fit_background:
        bg = float(np.mean(values - model))
        amp = 1.0
        r = values - model - bg
    else:
        amp, bg = 1.0, 0.0
        r = values - model
    return float(r @ r), amp, bg


def fit_neff(spectrum: SpectrumData, params_known: SystemParams,
             fit_amplitude: bool = False, fit_background: bool = False,
             n_max: float = 1000.0, n_grid: int = 240) -> FitResult:
    """Least-squares atom number from a measured or synthetic spectrum.

    ``params_known`` supplies every rate plus the atom-cavity offset
    (``delta_atom - delta_cav``); its own ``n_eff`` is ignored.  The search
    is a deterministic coarse log-grid scan over N followed by golden-
    section refinement, optionally with a global amplitude scale and/or a
    constant background solved linearly at each candidate N.  The
    confidence halfwidth comes from the curvature of the residual valley
    (delta-chi-squared = 1 analog).
    """
    off, val = spectrum.arrays()
    if off.size < 5:
        raise DomainError(f"need >= 5 spectrum points, got {off.size}")
    if np.ptp(val) == 0.0:
        raise FitError("degenerate spectrum: all transmissions identical")

    offset_ac = params_known.atom_cavity_offset

    def ssr(n):
        model = _linear_transmission_grid(params_known, offset_ac, off, n)
        return _residual(val, model, fit_amplitude, fit_background)

    candidates = np.concatenate([[0.0], np.logspace(-2, math.log10(n_max), int(n_grid))])
    ssr_grid = np.array([ssr(n)[0] for n in candidates])
    k = int(np.argmin(ssr_grid))
    lo = candidates[max(k - 1, 0)]
    hi = candidates[min(k + 1, candidates.size - 1)]
    if lo == hi:
        lo, hi = max(0.0, lo - 1e-2), hi + 1e-2

    # golden-section refinement (deterministic, unimodal bracket)
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    fc, fd = ssr(c)[0], ssr(d)[0]
    for _ in range(200):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = ssr(c)[0]
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = ssr(d)[0]
        if b - a <= 1e-12 * max(1.0, b):
            break
    n_hat = 0.5 * (a + b)
    best, amp, bg = ssr(n_hat)
    if best > ssr_grid[k]:  # never regress below the scanned grid
        n_hat = float(candidates[k])
        best, amp, bg = ssr(n_hat)

    m = off.size
    n_free = 1 + int(fit_amplitude) + int(fit_background)
    dof = max(m - n_free, 1)
    s2 = best / dof
    h = max(1e-4, 1e-4 * n_hat)
    curv = (ssr(n_hat + h)[0] - 2.0 * best + ssr(max(n_hat - h, 0.0))[0]) / h**2
    halfwidth = math.sqrt(2.0 * s2 / curv) if curv > 0 else float("inf")

    return FitResult(
        n_eff_hat=float(n_hat),
        residual_rms=math.sqrt(best / m),
        confidence_halfwidth=float(halfwidth),
        amplitude=amp,
        background=bg,
    )


def read_spectrum_csv(path) -> SpectrumData:
    """Read a 2-column spectrum file: header ``offset_MHz,<values>``."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DomainError(f"{path}: empty spectrum file") from None
        if len(header) < 2 or header[0].strip() != "offset_MHz":
            raise DomainError(
                f"{path}: expected header 'offset_MHz,transmission_or_counts', got {header!r}"
            )
        offsets, values = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                offsets.append(float(row[0]) * TWO_PI * 1e6)
                values.append(float(row[1]))
            except (ValueError, IndexError):
                raise DomainError(f"{path}:{lineno}: bad spectrum row {row!r}") from None
    return SpectrumData(offsets=tuple(offsets), values=tuple(values))


def write_spectrum_csv(path, spec: SpectrumData, value_label="transmission"):
    off, val = spec.arrays()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["offset_MHz", value_label])
        for o, v in zip(off, val):
            writer.writerow([f"{o / (TWO_PI * 1e6):.10g}", f"{v:.10g}"])
