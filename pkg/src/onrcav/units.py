"""Physical constants and unit conversions.

Conventions used by every module in this package:

* all rates (kappa's, gamma, g, detunings) are stored as *angular*
  frequencies in rad/s.  Anything user-facing quotes rates in MHz with the
  meaning rate/(2*pi), i.e. "kappa1 = 3.1 MHz" stands for 2*pi*3.1e6 rad/s;
* optical powers circulate internally as photon fluxes (photons/s); watts
  appear only at CLI and file boundaries;
* all rates here are field (amplitude) decay rates -- the corresponding
  intensity decays twice as fast.

The conversions are deliberately tiny closed forms so that each one has an
exact inverse (round-trip error at the few-ulp level).
"""

import math

from .errors import DomainError

TWO_PI = 2.0 * math.pi

# CODATA exact values
PLANCK_H = 6.62607015e-34      # J s
SPEED_OF_LIGHT = 299792458.0   # m / s


def mhz_to_rate(value_mhz: float) -> float:
    """Angular rate (rad/s) of a frequency quoted as '2*pi x value MHz'."""
    return TWO_PI * 1e6 * value_mhz


def rate_to_mhz(rate: float) -> float:
    """Inverse of :func:`mhz_to_rate`."""
    return rate / (TWO_PI * 1e6)


def mirror_ppm_to_rate(transmission_ppm: float, cavity_length: float) -> float:
    """Field decay rate (rad/s) of one mirror from its power transmission.

    Standard Fabry-Perot relation kappa_i = c*T_i/(4*L) for a two-mirror
    cavity of length ``cavity_length`` (m), valid for small per-mirror
    losses.  ``transmission_ppm`` is the power transmission in parts per
    million.
    """
    if transmission_ppm <= 0:
        raise DomainError(f"mirror transmission must be > 0 ppm, got {transmission_ppm}")
    if cavity_length <= 0:
        raise DomainError(f"cavity length must be > 0 m, got {cavity_length}")
    return SPEED_OF_LIGHT * transmission_ppm * 1e-6 / (4.0 * cavity_length)


def rate_to_mirror_ppm(rate: float, cavity_length: float) -> float:
    """Exact inverse of :func:`mirror_ppm_to_rate`."""
    if rate <= 0:
        raise DomainError(f"rate must be > 0 rad/s, got {rate}")
    if cavity_length <= 0:
        raise DomainError(f"cavity length must be > 0 m, got {cavity_length}")
    return rate * 4.0 * cavity_length / SPEED_OF_LIGHT * 1e6


def power_to_flux(power: float, wavelength: float) -> float:
    """Photon flux (1/s) carried by ``power`` watts at ``wavelength`` metres."""
    if power < 0:
        raise DomainError(f"power must be >= 0 W, got {power}")
    if wavelength <= 0:
        raise DomainError(f"wavelength must be > 0 m, got {wavelength}")
    return power * wavelength / (PLANCK_H * SPEED_OF_LIGHT)


def flux_to_power(flux: float, wavelength: float) -> float:
    """Exact inverse of :func:`power_to_flux`."""
    if flux < 0:
        raise DomainError(f"flux must be >= 0 /s, got {flux}")
    if wavelength <= 0:
        raise DomainError(f"wavelength must be > 0 m, got {wavelength}")
    return flux * PLANCK_H * SPEED_OF_LIGHT / wavelength


def intracavity_photons(output_flux: float, output_kappa: float) -> float:
    """Mean intracavity photon number deduced from the transmitted flux.

    Input-output with field decay rates: a flux of n*2*kappa_out photons/s
    leaks through the output mirror, so n = flux / (2*kappa_out).
    """
    if output_kappa <= 0:
        raise DomainError(f"output kappa must be > 0 rad/s, got {output_kappa}")
    if output_flux < 0:
        raise DomainError(f"output flux must be >= 0 /s, got {output_flux}")
    return output_flux / (2.0 * output_kappa)
