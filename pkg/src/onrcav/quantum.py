"""Driven Tavis-Cummings steady states for cross-validating the mean-field model.

The atoms enter as a collective spin N/2 (Dicke ladder, dimension N+1)
coupled to a truncated Fock mode, driven coherently and damped through

* the cavity channel sqrt(2 kappa) a,
* an atomic channel sqrt(2 gamma / N) J-.

The 1/N normalization makes a single shared excitation damp at the
independent-atom rate 2*gamma, which is what the mean-field equations
assume; a plain sqrt(2 gamma) J- channel would be superradiant and its
enhanced damping exactly cancels the collective-coupling enhancement in
the weak-drive response.  Deeper ladder states damp slightly slower than
independent atoms would (factor (N-m+1)/N at m excitations); for N = 1,
the regime used for the nonlinear comparisons, the model is exact.

Steady states come from a direct sparse solve of the stationarity system
with a trace constraint -- deterministic, no time-stepping tolerances.
The drive amplitude eta maps to an input photon flux via
P_in = eta^2 / (2 kappa_in), and the transmitted flux is
2 kappa_out <a^dagger a>, consistent with the mean-field convention.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DimensionCapError, DomainError
from .params import Direction, SystemParams

TOP_FOCK_LIMIT = 1e-6   # adequacy: population allowed in the last Fock layer
DEFAULT_DIM_CAP = 2048


@dataclass(frozen=True)
class QuantumModel:
    params: SystemParams
    n_atoms: int
    fock_dim: int
    drive_amplitude: float          # eta, rad/s
    direction: Direction = Direction.FORWARD
    dim_cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        if self.n_atoms < 0 or int(self.n_atoms) != self.n_atoms:
            raise DomainError(f"n_atoms must be a nonnegative integer, got {self.n_atoms}")
        if self.fock_dim < 2 or int(self.fock_dim) != self.fock_dim:
            raise DomainError(f"fock_dim must be an integer >= 2, got {self.fock_dim}")
        if self.drive_amplitude < 0:
            raise DomainError(f"drive amplitude must be >= 0, got {self.drive_amplitude}")

    @property
    def hilbert_dim(self) -> int:
        return (self.n_atoms + 1) * self.fock_dim

    @property
    def input_flux(self) -> float:
        """Drive photon flux: P_in = eta^2 / (2 kappa_in)."""
        return self.drive_amplitude**2 / (2.0 * self.direction.input_kappa(self.params))


@dataclass(frozen=True)
class QuantumSteadyState:
    rho: np.ndarray
    mean_photon_number: float
    output_flux: float
    input_flux: float
    adequate: bool
    top_fock_population: float
    trace_deviation: float
    hermiticity_deviation: float
    min_eigenvalue: float


def drive_for_input_flux(input_flux: float, direction: Direction,
                         params: SystemParams) -> float:
    """Drive amplitude eta producing the requested input photon flux."""
    if input_flux < 0:
        raise DomainError(f"input flux must be >= 0, got {input_flux}")
    return float(np.sqrt(2.0 * direction.input_kappa(params) * input_flux))


def _operators(n_atoms: int, fock_dim: int):
    """(a, J-, excitation-number) on spin (+1) x Fock, CSR sparse."""
    na = n_atoms + 1
    a_f = sp.diags(np.sqrt(np.arange(1, fock_dim)), 1, format="csr")
    i_f = sp.identity(fock_dim, format="csr")
    a = sp.kron(sp.identity(na, format="csr"), a_f, format="csr")
    if n_atoms == 0:
        zero = sp.csr_matrix((na * fock_dim, na * fock_dim))
        return a, zero, zero
    # Dicke ladder indexed by excitation count m = 0..N:
    # J-|m> = sqrt(m (N - m + 1)) |m-1>
    m = np.arange(1, na)
    jm_s = sp.diags(np.sqrt(m * (n_atoms - m + 1.0)), 1, format="csr")
    ne_s = sp.diags(np.arange(na, dtype=float), 0, format="csr")
    jm = sp.kron(jm_s, i_f, format="csr")
    ne = sp.kron(ne_s, i_f, format="csr")
    return a, jm, ne


def _liouvillian(model: QuantumModel):
    p = model.params
    a, jm, ne = _operators(model.n_atoms, model.fock_dim)
    ad = a.conj().T
    h = (
        p.delta_cav * (ad @ a)
        + p.delta_atom * ne
        + p.g * (ad @ jm + a @ jm.conj().T)
        + 1j * model.drive_amplitude * (ad - a)
    )
    c_ops = [np.sqrt(2.0 * p.kappa) * a]
    if model.n_atoms > 0:
        c_ops.append(np.sqrt(2.0 * p.gamma / model.n_atoms) * jm)

    dim = model.hilbert_dim
    ident = sp.identity(dim, format="csr")
    liou = -1j * (sp.kron(ident, h, format="csr") - sp.kron(h.T, ident, format="csr"))
    for c in c_ops:
        cdc = (c.conj().T @ c).tocsr()
        liou = (
            liou
            + sp.kron(c.conj(), c, format="csr")
            - 0.5 * sp.kron(ident, cdc, format="csr")
            - 0.5 * sp.kron(cdc.T, ident, format="csr")
        )
    return liou.tocsr(), a


def steady_state(model: QuantumModel) -> QuantumSteadyState:
    """Unique steady state of the driven dissipative model.

    Solves L(rho) = 0 with the trace-1 constraint replacing one scalar
    equation.  The returned state is Hermitized after verifying the raw
    solution is Hermitian, positive and normalized within tolerance; an
    inadequate Fock truncation is flagged, never silently accepted.
    """
    dim = model.hilbert_dim
    if dim > model.dim_cap:
        raise DimensionCapError(
            f"Hilbert dimension {dim} exceeds cap {model.dim_cap}"
        )
    liou, a = _liouvillian(model)

    n2 = dim * dim
    diag_idx = np.arange(dim) * (dim + 1)
    weight = max(float(abs(liou).sum() / n2), 1.0)
    lil = liou.tolil()
    lil[0, :] = 0.0
    for j in diag_idx:
        lil[0, j] = weight
    rhs = np.zeros(n2, dtype=complex)
    rhs[0] = weight
    vec = spla.spsolve(lil.tocsc(), rhs)
    rho = vec.reshape((dim, dim), order="F")

    herm_dev = float(np.abs(rho - rho.conj().T).max())
    trace_dev = float(abs(np.trace(rho) - 1.0))
    rho = 0.5 * (rho + rho.conj().T)
    min_eig = float(np.linalg.eigvalsh(rho)[0])

    nbar = float(np.real(np.einsum("ij,ji->", (a.conj().T @ a).toarray(), rho)))
    # total population of the top Fock layer across the spin ladder
    fock = model.fock_dim
    top = np.arange(model.n_atoms + 1) * fock + (fock - 1)
    top_pop = float(np.real(rho[top, top].sum()))

    out_kappa = model.direction.output_kappa(model.params)
    return QuantumSteadyState(
        rho=rho,
        mean_photon_number=nbar,
        output_flux=2.0 * out_kappa * nbar,
        input_flux=model.input_flux,
        adequate=top_pop <= TOP_FOCK_LIMIT,
        top_fock_population=top_pop,
        trace_deviation=trace_dev,
        hermiticity_deviation=herm_dev,
        min_eigenvalue=min_eig,
    )


def quantum_io_curve(model_template: QuantumModel, input_flux_list):
    """Steady transmitted flux over a list of drive fluxes.

    Returns (input_flux, output_flux, mean_photon_number, adequate) rows in
    input order.  The quantum response is single-valued by construction;
    where the mean-field model is bistable this curve crosses the
    hysteresis region smoothly.
    """
    fluxes = list(input_flux_list)
    if not fluxes:
        raise DomainError("input flux list must be nonempty")
    if any(f < 0 for f in fluxes):
        raise DomainError("input fluxes must be >= 0")
    rows = []
    for pin in fluxes:
        eta = drive_for_input_flux(pin, model_template.direction, model_template.params)
        model = QuantumModel(
            params=model_template.params,
            n_atoms=model_template.n_atoms,
            fock_dim=model_template.fock_dim,
            drive_amplitude=eta,
            direction=model_template.direction,
            dim_cap=model_template.dim_cap,
        )
        st = steady_state(model)
        rows.append((float(pin), st.output_flux, st.mean_photon_number, st.adequate))
    return rows
