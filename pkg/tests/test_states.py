import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dressedchain import (ChainConfig, GaussianSpec, TruncationError, ValidationError,
                          coherent_product_state, dressed_eigenstate, entangled_fock_state,
                          fock_product_state, gaussian_amplitudes, norm, photon_distribution,
                          vacuum_product_state)
from dressedchain.analytic import dressed_band
from dressedchain.observables import inversion_density, mean_photon_number, photon_variance
from dressedchain.states import poisson_amplitudes

A = GaussianSpec(80, 10, 0, 1)
NONE = GaussianSpec(0, 1, 0, 0)


def test_gaussian_bell():
    g = gaussian_amplitudes(A, 128)
    assert g[80] == 1.0
    assert np.all(np.isreal(g)) and np.all(g.real > 0)
    assert g[90] == pytest.approx(math.exp(-1))
    assert g[70] == g[90]


def test_gaussian_phase_and_bounds():
    g = gaussian_amplitudes(GaussianSpec(5, 2, 0.3), 12)
    np.testing.assert_allclose(np.angle(g[1:] / g[:-1]), 0.3)
    with pytest.raises(ValidationError):
        gaussian_amplitudes(GaussianSpec(12, 2), 12)
    with pytest.raises(ValidationError):
        GaussianSpec(3, 0)


def test_poisson_amplitudes_match_direct_formula():
    w = poisson_amplitudes(4.0, 12)
    direct = [math.sqrt(math.exp(-4) * 4**n / math.factorial(n)) for n in range(13)]
    np.testing.assert_allclose(w, direct, rtol=1e-13)
    np.testing.assert_array_equal(poisson_amplitudes(0.0, 3), [1, 0, 0, 0])


def test_coherent_state_statistics():
    cfg = ChainConfig(n_sites=128, n_max=60)
    s = coherent_product_state(A, NONE, 25, cfg)
    assert norm(s) == pytest.approx(1.0, abs=1e-14)
    n = np.arange(61)
    p = np.array([math.exp(k * math.log(25) - 25 - math.lgamma(k + 1)) for k in n])
    p /= p.sum()
    np.testing.assert_allclose(photon_distribution(s), p, rtol=1e-12, atol=1e-300)
    assert mean_photon_number(s) == pytest.approx(np.dot(n, p), rel=1e-13)
    # the cutoff shifts the moments only slightly
    assert mean_photon_number(s) == pytest.approx(25, abs=1e-6)
    assert photon_variance(s) == pytest.approx(25, abs=1e-5)
    assert np.all(s.b == 0)


def test_coherent_truncation_warns():
    cfg = ChainConfig(n_sites=8, n_max=20)
    with pytest.warns(RuntimeWarning, match="tail"):
        coherent_product_state(GaussianSpec(4, 2), NONE, 25, cfg)


def test_coherent_default_cutoff_is_quiet():
    cfg = ChainConfig(n_sites=8, n_max=55)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        coherent_product_state(GaussianSpec(4, 2), NONE, 25, cfg)


def test_vacuum_and_fock_states():
    cfg = ChainConfig(n_sites=16, n_max=4)
    v = vacuum_product_state(GaussianSpec(8, 3), NONE, cfg)
    np.testing.assert_allclose(photon_distribution(v), [1, 0, 0, 0, 0], atol=1e-15)
    f = fock_product_state(GaussianSpec(8, 3), GaussianSpec(8, 3, 0, 1j), 3, cfg)
    assert mean_photon_number(f) == pytest.approx(3)
    assert inversion_density(f).sum() == pytest.approx(0, abs=1e-15)
    with pytest.raises(TruncationError):
        fock_product_state(GaussianSpec(8, 3), NONE, 5, cfg)
    with pytest.raises(ValidationError):
        vacuum_product_state(NONE, NONE, cfg)


@pytest.mark.parametrize("phase", [1, -1])
def test_entangled_state(phase):
    cfg = ChainConfig(n_sites=128, n_max=1)
    s = entangled_fock_state(0, 80, 10, phase, cfg)
    assert inversion_density(s).sum() == 0.0
    assert mean_photon_number(s) == pytest.approx(0.5)
    assert photon_variance(s) == pytest.approx(0.25)
    np.testing.assert_allclose(s.b[:, 1], phase * s.a[:, 0])
    with pytest.raises(TruncationError):
        entangled_fock_state(1, 80, 10, phase, cfg)
    with pytest.raises(ValidationError):
        entangled_fock_state(0, 80, 10, 2, cfg)


@settings(max_examples=60, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(0.0, 0.05), st.integers(1, 2),
       st.integers(0, 3))
def test_dressed_state_weights(phi, g0, branch, n):
    cfg = ChainConfig(n_sites=10, t_a=0.02, t_b=0.004, g0=g0, n_max=n + 1)
    s = dressed_eigenstate(n, branch, phi, cfg)
    assert norm(s) == pytest.approx(1.0, abs=1e-13)
    band = dressed_band(phi, n, cfg)
    wa = np.sum(np.abs(s.a[:, n]) ** 2)
    expect = band.excited_weight if branch == 1 else 1 - band.excited_weight
    assert wa == pytest.approx(expect, abs=1e-12)


def test_dressed_state_plane_wave_phase():
    cfg = ChainConfig(n_sites=8, t_a=0.02, t_b=0.004, g0=0.01, n_max=1)
    phi = 2 * math.pi / 8
    s = dressed_eigenstate(0, 1, phi, cfg)
    np.testing.assert_allclose(s.a[1:, 0] / s.a[:-1, 0], np.exp(1j * phi))
    ratio = s.b[:, 1] / s.a[:, 0]
    np.testing.assert_allclose(ratio, -dressed_band(phi, 0, cfg).delta)


def test_dressed_state_packet_window():
    cfg = ChainConfig(n_sites=64, t_a=0.02, t_b=0.004, g0=0.01, n_max=1)
    s = dressed_eigenstate(0, 2, 0.0, cfg, GaussianSpec(32, 6))
    w = np.abs(s.a[:, 0]) ** 2 + np.abs(s.b[:, 1]) ** 2
    assert np.argmax(w) == 32
    with pytest.raises(ValidationError):
        dressed_eigenstate(0, 3, 0.0, cfg)
