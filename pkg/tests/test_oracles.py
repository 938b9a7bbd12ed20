"""Cross-checks of the closed forms and the integrator against independent references."""
import itertools
import math

import numpy as np
import pytest

from biphoton import PathLabel, ScaleConstants, SlitGeometry, slit_wavepacket
from biphoton.entanglement import covariance_from_wavepacket
from biphoton.propagation import gouy_fg, path_form, slit_gouy, slit_gouy_single_arctan

from oracles import closed_form_parameters, fresnel_sector, gauss_hermite_moments, gouy_arctan_pair

GRID = list(itertools.product((1e-3, 2e-3, 8e-3), (0.01, 0.07, 0.5), (5e-6, 36e-6, 60e-6)))


@pytest.mark.parametrize("z,z_tau,beta", GRID)
def test_extended_precision_transcription(source, z, z_tau, beta):
    d = 200e-6
    wp = slit_wavepacket(source, SlitGeometry(z, z_tau, d, beta, beta), PathLabel.UU,
                         method="closed")
    ud = slit_wavepacket(source, SlitGeometry(z, z_tau, d, beta, beta), PathLabel.UD,
                         method="closed")
    plus = closed_form_parameters(source.lam, source.sigma, source.omega_cap, z, z_tau, beta, d, "+")
    minus = closed_form_parameters(source.lam, source.sigma, source.omega_cap, z, z_tau, beta, d, "-")
    assert wp.b ** 2 == pytest.approx(float(plus["B2"]), rel=1e-12)
    assert wp.b_tilde ** 2 == pytest.approx(float(minus["B2"]), rel=1e-12)
    assert 1 / wp.inv_r_plus == pytest.approx(float(plus["R"]), rel=1e-12)
    assert 1 / wp.inv_r_minus == pytest.approx(float(minus["R"]), rel=1e-12)
    assert wp.separation == pytest.approx(float(plus["D"]), rel=1e-12)
    assert ud.separation == pytest.approx(float(minus["D"]), rel=1e-12)
    # the phase slope carries the sign that makes the interference pattern symmetric
    assert wp.delta == pytest.approx(-float(plus["delta"]), rel=1e-12)
    assert wp.theta == pytest.approx(float(plus["theta"]), rel=1e-12)
    assert ud.theta == pytest.approx(float(minus["theta"]), rel=1e-12)


@pytest.mark.parametrize("z,z_tau,beta", GRID)
def test_gouy_matches_arctan_pair(source, z, z_tau, beta):
    f, g = gouy_arctan_pair(source.lam, source.sigma, source.omega_cap, z, z_tau, beta)
    assert gouy_fg(source, z, z_tau, beta) == pytest.approx((float(f), float(g)), rel=1e-12)
    zeta = slit_gouy(source, z, z_tau, beta)
    single = slit_gouy_single_arctan(source, z, z_tau, beta)
    wraps = (zeta - single) / (math.pi / 2)
    assert abs(wraps - round(wraps)) < 1e-9
    # continuous form equals the arctan pair when neither denominator changed sign
    if all(float(x) > 0 for x in (f, g)):
        expect = -0.5 * float(mp_atan(f) + mp_atan(g))
        assert zeta == pytest.approx(expect, abs=1e-12)


def mp_atan(x):
    import mpmath
    return mpmath.atan(x)


@pytest.mark.parametrize("z,z_tau,beta", [(2e-3, 0.07, 36e-6), (1e-3, 0.01, 60e-6),
                                          (8e-3, 0.07, 5e-6), (0.0, 0.02, 40e-6)])
def test_brute_force_fresnel(source, z, z_tau, beta):
    """Two numerical Fresnel stages per sector reproduce the exact amplitude, phase included."""
    d = 200e-6
    form = path_form(source, SlitGeometry(z, z_tau, d, beta, beta), PathLabel.UU)
    x = np.linspace(-0.3e-3, 0.3e-3, 7)
    fr = fresnel_sector(source.omega_cap, d / 2, beta, source.k0, z, z_tau, x)
    fq = fresnel_sector(source.sigma, 0.0, beta, source.k0, z, z_tau, x)
    ref = np.outer(fr, fq) / math.sqrt(math.pi * source.sigma * source.omega_cap)
    r, q = np.meshgrid(x, x, indexing="ij")
    got = form(r, q)
    assert np.max(np.abs(got - ref)) < 1e-10 * np.max(np.abs(ref))


def test_brute_force_fresnel_gouy_phase(source):
    """The on-axis phase of a centred beam is the Gouy phase."""
    z, z_tau, beta = 2e-3, 0.07, 40e-6
    fr = fresnel_sector(source.omega_cap, 0.0, beta, source.k0, z, z_tau, [0.0])[0]
    fq = fresnel_sector(source.sigma, 0.0, beta, source.k0, z, z_tau, [0.0])[0]
    wp = slit_wavepacket(source, SlitGeometry(z, z_tau, 0.0, beta, beta), PathLabel.UU)
    assert np.angle(fr * fq) == pytest.approx(wp.zeta_slit, abs=1e-10)


@pytest.mark.parametrize("z,z_tau,beta", GRID)
@pytest.mark.parametrize("d", [0.0, 200e-6])
def test_moments_against_quadrature(source, z, z_tau, beta, d):
    wp = slit_wavepacket(source, SlitGeometry(z, z_tau, d, beta, beta), PathLabel.UU)
    form = wp.as_form()
    m, mean = gauss_hermite_moments(lambda x1, x2: form((x1 + x2) / 2, (x1 - x2) / 2),
                                    (wp.separation / 2, 0.0),
                                    (wp.b / math.sqrt(2), wp.b_tilde / math.sqrt(2)))
    cm = covariance_from_wavepacket(wp, ScaleConstants(length_scale=1.0))
    scale = np.sqrt(np.outer(np.diag(m), np.diag(m)))
    assert np.max(np.abs(m - cm.entries) / scale) < 1e-6
    assert np.max(np.abs(mean - cm.first_moments) / np.sqrt(np.diag(m))) < 1e-6


@pytest.mark.parametrize("path", [PathLabel.UD, PathLabel.DU])
def test_cross_slit_moments_against_quadrature(source, path):
    wp = slit_wavepacket(source, SlitGeometry(2e-3, 0.07, 200e-6, 36e-6, 36e-6), path)
    form = wp.as_form()
    m, _ = gauss_hermite_moments(lambda x1, x2: form((x1 + x2) / 2, (x1 - x2) / 2),
                                 (0.0, wp.separation / 2),
                                 (wp.b / math.sqrt(2), wp.b_tilde / math.sqrt(2)))
    cm = covariance_from_wavepacket(wp, ScaleConstants(length_scale=1.0))
    scale = np.sqrt(np.outer(np.diag(m), np.diag(m)))
    assert np.max(np.abs(m - cm.entries) / scale) < 1e-6
