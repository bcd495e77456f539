"""System parameters, propagation directions and named presets.

``SystemParams`` is the single validated parameter bundle every other
module consumes.  Rates are angular (rad/s), see :mod:`onrcav.units` for
the conventions.  The symbols follow the usual cavity-QED notation:
kappa1/kappa2 are the mirror coupling rates (input mirror M1 has the
larger one for the nonreciprocal configuration), kappa_loss collects
scattering/absorption, g is the single-atom coupling, gamma the atomic
amplitude decay, and the detunings are Delta = w_atom - w_probe and
delta = w_cavity - w_probe.
"""

import dataclasses
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError
from .units import mhz_to_rate, rate_to_mhz


@dataclass(frozen=True)
class SystemParams:
    kappa1: float                      # rad/s, input-side mirror M1
    kappa2: float                      # rad/s, mirror M2
    kappa_loss: float                  # rad/s, extra scattering/absorption
    g: float                           # rad/s, single-atom coupling
    gamma: float                       # rad/s, atomic amplitude decay
    n_eff: float                       # effective atom number, >= 0
    delta_atom: float = 0.0            # rad/s, w_atom - w_probe
    delta_cav: float = 0.0             # rad/s, w_cavity - w_probe
    wavelength: float = 852.3e-9       # m
    cavity_length: float = 335e-6      # m

    def __post_init__(self):
        for name in ("kappa1", "kappa2", "g", "gamma", "wavelength", "cavity_length"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.kappa_loss < 0:
            raise DomainError(f"kappa_loss must be >= 0, got {self.kappa_loss}")
        if self.n_eff < 0:
            raise DomainError(f"n_eff must be >= 0, got {self.n_eff}")

    @property
    def kappa(self) -> float:
        """Total cavity field decay rate kappa1 + kappa2 + kappa_loss."""
        return self.kappa1 + self.kappa2 + self.kappa_loss

    @property
    def omega_collective(self) -> float:
        """Collective coupling sqrt(N)*g."""
        return self.n_eff**0.5 * self.g

    @property
    def cooperativity(self) -> float:
        """C = N g^2 / (2 kappa gamma)."""
        return self.n_eff * self.g**2 / (2.0 * self.kappa * self.gamma)

    @property
    def atom_cavity_offset(self) -> float:
        """w_atom - w_cavity = Delta - delta (rad/s), probe-independent."""
        return self.delta_atom - self.delta_cav

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_mhz(cls, kappa1, kappa2, kappa_loss, g, gamma, n_eff,
                 delta_atom=0.0, delta_cav=0.0,
                 wavelength=852.3e-9, cavity_length=335e-6) -> "SystemParams":
        """Build from rates quoted in MHz (meaning rate/2pi)."""
        return cls(
            kappa1=mhz_to_rate(kappa1),
            kappa2=mhz_to_rate(kappa2),
            kappa_loss=mhz_to_rate(kappa_loss),
            g=mhz_to_rate(g),
            gamma=mhz_to_rate(gamma),
            n_eff=n_eff,
            delta_atom=mhz_to_rate(delta_atom),
            delta_cav=mhz_to_rate(delta_cav),
            wavelength=wavelength,
            cavity_length=cavity_length,
        )

    def to_mhz_dict(self) -> dict:
        """User-facing view: rates in MHz, lengths in nm/um."""
        return {
            "kappa1_mhz": rate_to_mhz(self.kappa1),
            "kappa2_mhz": rate_to_mhz(self.kappa2),
            "kappa_loss_mhz": rate_to_mhz(self.kappa_loss),
            "kappa_total_mhz": rate_to_mhz(self.kappa),
            "g_mhz": rate_to_mhz(self.g),
            "gamma_mhz": rate_to_mhz(self.gamma),
            "n_eff": self.n_eff,
            "delta_atom_mhz": rate_to_mhz(self.delta_atom),
            "delta_cav_mhz": rate_to_mhz(self.delta_cav),
            "wavelength_nm": self.wavelength * 1e9,
            "cavity_length_um": self.cavity_length * 1e6,
            "cooperativity": self.cooperativity,
        }


class Direction(Enum):
    """Propagation direction through the asymmetric cavity.

    FORWARD drives through M1 (mode a) and exits through M2; BACKWARD is
    the reverse.  The direction fixes which mirror sets the saturation
    reference flux P_ct = kappa_out * (Delta^2 + gamma^2) / g^2.
    """

    FORWARD = "forward"
    BACKWARD = "backward"

    @classmethod
    def parse(cls, text: str) -> "Direction":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise DomainError(f"unknown direction {text!r}, expected forward|backward") from None

    def input_kappa(self, params: SystemParams) -> float:
        return params.kappa1 if self is Direction.FORWARD else params.kappa2

    def output_kappa(self, params: SystemParams) -> float:
        return params.kappa2 if self is Direction.FORWARD else params.kappa1

    def critical_flux(self, params: SystemParams) -> float:
        """Saturation reference flux P_ct for this direction (1/s)."""
        d2 = params.delta_atom**2 + params.gamma**2
        return self.output_kappa(params) * d2 / params.g**2


def _paper_rates(n_eff, delta_atom_mhz=-0.64, delta_cav_mhz=0.0):
    # quoted experimental rates; the cavity-atom offset Delta - delta was
    # -0.64 MHz throughout the measurements, probe on cavity resonance
    return SystemParams.from_mhz(
        kappa1=3.1, kappa2=0.2, kappa_loss=0.4, g=5.5, gamma=2.6,
        n_eff=n_eff, delta_atom=delta_atom_mhz, delta_cav=delta_cav_mhz,
    )


PRESETS = {
    "paper-fig2": _paper_rates(12.8),
    "paper-fig2-resonant": _paper_rates(12.8, delta_atom_mhz=0.0),
    "paper-low-atoms": _paper_rates(3.0),
    "paper-max-atoms": _paper_rates(14.7),
}


def get_preset(name: str) -> SystemParams:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise DomainError(f"unknown preset {name!r}; known presets: {known}") from None


# config files are flat "key = value" lines; units per key:
# rates in MHz, wavelength in nm, cavity_length in um, n_eff dimensionless.
_CONFIG_KEYS = {
    "kappa1": ("kappa1", mhz_to_rate),
    "kappa2": ("kappa2", mhz_to_rate),
    "kappa_loss": ("kappa_loss", mhz_to_rate),
    "g": ("g", mhz_to_rate),
    "gamma": ("gamma", mhz_to_rate),
    "n_eff": ("n_eff", float),
    "delta_atom": ("delta_atom", mhz_to_rate),
    "delta_cav": ("delta_cav", mhz_to_rate),
    "wavelength": ("wavelength", lambda v: v * 1e-9),
    "cavity_length": ("cavity_length", lambda v: v * 1e-6),
}


def load_config(path, base: SystemParams | None = None) -> SystemParams:
    """Read a flat key-value parameter file, overriding ``base`` fields.

    Lines look like ``kappa1 = 3.1`` (units as documented above); ``#``
    starts a comment.  Unknown keys or unparseable values raise
    DomainError with the offending line number.
    """
    if base is None:
        base = get_preset("paper-fig2")
    changes = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                known = ", ".join(sorted(_CONFIG_KEYS))
                raise DomainError(f"{path}:{lineno}: unknown key {key!r}; known keys: {known}")
            field, conv = _CONFIG_KEYS[key]
            try:
                changes[field] = conv(float(val.strip()))
            except ValueError:
                raise DomainError(f"{path}:{lineno}: bad numeric value {val.strip()!r}") from None
    return base.replace(**changes)
