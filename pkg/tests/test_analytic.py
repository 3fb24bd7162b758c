import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dressedchain import ChainConfig, ValidationError
from dressedchain.analytic import (adiabatic_final_phase, analytic_photon_stats, bloch_phase,
                                   delta_of_time, dressed_band, mixing_ratio,
                                   quasiclassical_center, sector_matrix)


def test_reference_values():
    cfg = ChainConfig(n_sites=128, t_a=0.008, t_b=0.0008, g0=0.00245, n_max=1)
    band = dressed_band(0.0, 0, cfg)
    assert band.nu1 == pytest.approx(0.016406, abs=1e-6)
    assert band.nu2 == pytest.approx(0.001194, abs=1e-6)
    assert band.delta == pytest.approx(0.1655, abs=1e-4)


def test_randomized_root_and_eigenvector_identities():
    rng = np.random.default_rng(7)
    worst_root = worst_vec = 0.0
    for _ in range(10_000):
        t_a, t_b = rng.uniform(-0.05, 0.05, 2)
        g0 = rng.uniform(1e-4, 0.05)
        n = int(rng.integers(0, 30))
        phi = rng.uniform(-math.pi, math.pi)
        cfg = ChainConfig(n_sites=2, t_a=t_a, t_b=t_b, g0=g0, n_max=n + 1)
        b = dressed_band(phi, n, cfg)
        H = sector_matrix(phi, n, cfg)
        scale = max(np.abs(H).max(), 1e-300)
        tr, det = np.trace(H), np.linalg.det(H)
        for nu in (b.nu1, b.nu2):
            worst_root = max(worst_root, abs(nu * nu - tr * nu + det) / scale**2)
        for branch, nu in ((1, b.nu1), (2, b.nu2)):
            v = np.array(b.amplitudes(branch))
            worst_vec = max(worst_vec, np.linalg.norm((H - nu * np.eye(2)) @ v) / scale)
    assert worst_root < 1e-12
    assert worst_vec < 1e-12


@settings(max_examples=200)
@given(st.floats(-math.pi, math.pi), st.floats(1e-6, 0.1), st.floats(-0.1, 0.1), st.integers(0, 40))
def test_equal_tunneling_gives_unit_ratio(phi, g0, t, n):
    cfg = ChainConfig(n_sites=2, t_a=t, t_b=t, g0=g0, n_max=n + 1)
    assert dressed_band(phi, n, cfg).delta == 1.0


@settings(max_examples=200)
@given(st.floats(-math.pi, math.pi), st.floats(1e-8, 0.1), st.floats(-0.1, 0.1), st.floats(-0.1, 0.1))
def test_mixing_ratio_against_high_precision(phi, g, t_a, t_b):
    mpmath.mp.dps = 40
    d = (mpmath.mpf(t_a) - mpmath.mpf(t_b)) * mpmath.cos(mpmath.mpf(phi))
    exact = mpmath.mpf(g) / (d + mpmath.sqrt(d * d + mpmath.mpf(g) ** 2))
    assert mixing_ratio(phi, g, t_a, t_b) == pytest.approx(float(exact), rel=1e-12)


def test_degenerate_and_uncoupled_limits():
    flat = ChainConfig(n_sites=2, t_a=0.01, t_b=0.01, g0=0.0, n_max=1)
    b = dressed_band(0.3, 0, flat)
    assert b.degenerate and b.delta == 0.0
    split = ChainConfig(n_sites=2, t_a=0.02, t_b=0.01, g0=0.0, n_max=1)
    assert dressed_band(0.0, 0, split).delta == 0.0
    assert dressed_band(math.pi, 0, split).delta == math.inf
    assert dressed_band(math.pi, 0, split).amplitudes(1) == (0.0, -1.0)


def test_photon_stats_bounds_and_sum():
    cfg = ChainConfig(n_sites=2, t_a=0.008, t_b=0.0008, g0=0.0125, omega_b=0.0008, n_max=4)
    for t in np.linspace(0, 2 * cfg.bloch_period, 50):
        for branch in (1, 2):
            s = analytic_photon_stats(branch, 2, t, 0.0, cfg)
            assert sum(s.distribution.values()) == pytest.approx(1.0)
            assert 2 <= s.mean <= 3
            assert 0 <= s.variance <= 0.25
            assert 0 <= s.entropy <= math.log(2) + 1e-15
    with pytest.raises(ValidationError):
        analytic_photon_stats(3, 0, 0.0, 0.0, cfg)


def test_branches_share_sector_statistics():
    cfg = ChainConfig(n_sites=2, t_a=0.008, t_b=0.0008, g0=0.0125, omega_b=0.0008, n_max=1)
    s1 = analytic_photon_stats(1, 0, 1000.0, 0.0, cfg)
    s2 = analytic_photon_stats(2, 0, 1000.0, 0.0, cfg)
    assert s1.mean + s2.mean == pytest.approx(1.0)
    assert s1.variance == pytest.approx(s2.variance)
    assert s1.entropy == pytest.approx(s2.entropy)


def test_delta_is_bloch_periodic():
    cfg = ChainConfig(n_sites=2, t_a=0.008, t_b=0.0008, g0=0.0125, omega_b=0.0008, n_max=1)
    t = np.linspace(0, cfg.bloch_period, 17)
    np.testing.assert_allclose(delta_of_time(t, 0, 0.4, cfg),
                               delta_of_time(t + cfg.bloch_period, 0, 0.4, cfg), rtol=1e-11)
    assert bloch_phase(2.0, 0.5, 0.25) == 1.0


def test_adiabatic_final_phase():
    assert adiabatic_final_phase([0.002] * 101, 0.1, dt=5.0) == pytest.approx(0.1 + 0.002 * 500)
    t = np.linspace(0, 10, 11)
    assert adiabatic_final_phase(0.1 * t, 0.0, times=t) == pytest.approx(5.0)
    assert adiabatic_final_phase([0.3], 1.0, dt=1.0) == 1.0
    with pytest.raises(ValidationError):
        adiabatic_final_phase([0.1, np.nan], 0.0, dt=1.0)
    with pytest.raises(ValidationError):
        adiabatic_final_phase([0.1, 0.2], 0.0)


def test_quasiclassical_center():
    cfg = ChainConfig(n_sites=128, t_a=0.008, t_b=0.0008, g0=0.0125, omega_b=0.0008, n_max=1)
    T = cfg.bloch_period
    assert quasiclassical_center(0.0, "a", 0.0, cfg) == 0.0
    assert quasiclassical_center(T / 2, "a", 0.0, cfg) == pytest.approx(-4 * 0.008 / 0.0008)
    assert quasiclassical_center(T, "b", 0.0, cfg) == pytest.approx(0.0, abs=1e-12)
    # the group velocity is the phase derivative of the dressed band
    t, h = 1234.0, 1e-3
    v = (quasiclassical_center(t + h, "mixed", 0.2, cfg) - quasiclassical_center(t - h, "mixed", 0.2, cfg)) / (2 * h)
    phi = bloch_phase(t, 0.2, cfg.omega_b)
    dnu = (dressed_band(phi + 1e-6, 0, cfg).nu1 - dressed_band(phi - 1e-6, 0, cfg).nu1) / 2e-6
    assert v == pytest.approx(dnu, rel=1e-5)
    with pytest.raises(ValidationError):
        quasiclassical_center(1.0, "c", 0.0, cfg)
    with pytest.raises(ValidationError):
        quasiclassical_center(1.0, "a", 0.0, cfg.with_(omega_b=0.0))
