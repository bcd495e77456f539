import numpy as np
import pytest

from onrcav.errors import DomainError
from onrcav.units import (
    TWO_PI,
    flux_to_power,
    intracavity_photons,
    mhz_to_rate,
    mirror_ppm_to_rate,
    power_to_flux,
    rate_to_mhz,
    rate_to_mirror_ppm,
)

L = 335e-6
WL = 852.3e-9


def test_mirror_ppm_quoted_rates():
    # paper mirror set; quoted rates are rounded to 0.1 MHz, so accept
    # either 3% relative or the quoting precision (+-0.05 MHz)
    for ppm, quoted_mhz in ((88.9, 3.1), (5.1, 0.2), (10.8, 0.4)):
        mhz = rate_to_mhz(mirror_ppm_to_rate(ppm, L))
        ok = abs(mhz - quoted_mhz) / quoted_mhz <= 0.03 or abs(mhz - quoted_mhz) <= 0.05
        assert ok, (ppm, mhz)


def test_mirror_ppm_exact_values():
    # frozen from c*T/(4L)
    assert rate_to_mhz(mirror_ppm_to_rate(88.9, L)) == pytest.approx(3.165467, rel=1e-5)
    assert rate_to_mhz(mirror_ppm_to_rate(5.1, L)) == pytest.approx(0.181596, rel=1e-5)
    assert rate_to_mhz(mirror_ppm_to_rate(10.8, L)) == pytest.approx(0.384556, rel=1e-5)


def test_mirror_ppm_roundtrip_and_scaling():
    rng = np.random.default_rng(7)
    for _ in range(200):
        ppm = 10 ** rng.uniform(-1, 3)
        length = 10 ** rng.uniform(-5, -2)
        rate = mirror_ppm_to_rate(ppm, length)
        assert rate_to_mirror_ppm(rate, length) == pytest.approx(ppm, rel=1e-12)
    # linear in ppm, inverse in length
    assert mirror_ppm_to_rate(20, L) == pytest.approx(2 * mirror_ppm_to_rate(10, L), rel=1e-14)
    assert mirror_ppm_to_rate(10, 2 * L) == pytest.approx(mirror_ppm_to_rate(10, L) / 2, rel=1e-14)


def test_mirror_ppm_domain_errors():
    with pytest.raises(DomainError):
        mirror_ppm_to_rate(0.0, L)
    with pytest.raises(DomainError):
        mirror_ppm_to_rate(10.0, -1e-6)
    with pytest.raises(DomainError):
        rate_to_mirror_ppm(-1.0, L)


def test_power_to_flux_values():
    assert power_to_flux(0.0, WL) == 0.0
    # 100 pW at 852.3 nm; frozen from h, c
    assert power_to_flux(100e-12, WL) == pytest.approx(4.290578e8, rel=1e-6)


def test_power_flux_roundtrip():
    rng = np.random.default_rng(11)
    for _ in range(200):
        p = 10 ** rng.uniform(-15, -3)
        wl = 10 ** rng.uniform(-7, -5)
        assert flux_to_power(power_to_flux(p, wl), wl) == pytest.approx(p, rel=1e-12)
    with pytest.raises(DomainError):
        power_to_flux(-1e-12, WL)


def test_intracavity_photons():
    k2 = mhz_to_rate(0.2)
    assert intracavity_photons(0.0, k2) == 0.0
    assert intracavity_photons(2 * k2, k2) == pytest.approx(1.0, rel=1e-12)
    assert intracavity_photons(2.513e6, k2) == pytest.approx(1.0, rel=1e-3)
    with pytest.raises(DomainError):
        intracavity_photons(1.0, 0.0)
    with pytest.raises(DomainError):
        intracavity_photons(-1.0, k2)


def test_mhz_rate_roundtrip():
    assert rate_to_mhz(mhz_to_rate(3.1)) == pytest.approx(3.1, rel=1e-15)
    assert mhz_to_rate(1.0) == pytest.approx(TWO_PI * 1e6, rel=1e-15)
