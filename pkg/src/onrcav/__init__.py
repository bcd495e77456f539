"""Steady-state optical nonreciprocity in an asymmetric atom-cavity system.

The package computes direction-dependent transmission of a coherently
driven cavity containing N two-level atoms: exact steady-state branches
and their stability, switching thresholds and the nonreciprocal working
window, design optimization of the mirror split, atom-number fits from
normal-mode-splitting spectra, a small Lindblad solver for quantum
cross-validation, and a photon-counting detector model for comparing with
measured sweeps.  See the README for the CLI and docs/formats.md for file
schemas.
"""

from .bistability import (
    AtomNumberSweep,
    OnrWindow,
    SCurve,
    SweepRow,
    SwitchThresholds,
    WindowConvention,
    WindowMetrics,
    bistability_onset_n_eff,
    branch_response,
    onr_window,
    resonant_extrema_closed_form,
    scurve,
    sweep_atom_number,
    switch_thresholds,
    window_metrics,
)
from .design import (
    MirrorSplit,
    design_report,
    design_report_text,
    optimal_mirror_split,
    required_neff_for_blocking,
)
from .errors import (
    DimensionCapError,
    DomainError,
    FitError,
    InfeasibleDesignError,
    IngestError,
)
from .measurement import (
    DetectorModel,
    DetectorReading,
    IngestResult,
    MeasuredWindow,
    SweepRecord,
    apparent_blocking_ratio_db,
    apply_detector,
    ingest_sweep,
    measured_metrics,
    measured_window,
    synthesize_sweep,
    write_sweep_csv,
)
from .params import PRESETS, Direction, SystemParams, get_preset, load_config
from .quantum import (
    QuantumModel,
    QuantumSteadyState,
    drive_for_input_flux,
    quantum_io_curve,
    steady_state,
)
from .semiclassical import (
    SteadyStateSolution,
    approx_backward_output,
    approx_forward_output,
    blocking_ratio_simplified,
    input_for_output,
    linear_transmission,
    output_for_input,
    saturation_roots,
)
from .spectrum import (
    FitResult,
    SpectrumData,
    fit_neff,
    peak_splitting,
    read_spectrum_csv,
    transmission_spectrum,
    write_spectrum_csv,
)
from .units import (
    flux_to_power,
    intracavity_photons,
    mhz_to_rate,
    mirror_ppm_to_rate,
    power_to_flux,
    rate_to_mhz,
    rate_to_mirror_ppm,
)

__version__ = "0.1.0"
