import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dressedchain import ValidationError
from dressedchain.device import (RESISTANCE_QUANTUM, JosephsonParams, bloch_period_seconds,
                                 coherence_flags, heterostructure_to_chain,
                                 heterostructure_to_physical, josephson_bandwidth,
                                 josephson_to_chain)


def bandwidth_mp(E_J, E_C):
    mpmath.mp.dps = 50
    E_J, E_C = mpmath.mpf(E_J), mpmath.mpf(E_C)
    return 16 * mpmath.sqrt(E_C * E_J / mpmath.pi) * (E_J / (2 * E_C)) ** mpmath.mpf(0.25) \
        * mpmath.exp(-mpmath.sqrt(8 * E_J / E_C))


@settings(max_examples=200)
@given(st.floats(1e8, 1e12), st.floats(1.0, 60.0))
def test_bandwidth_matches_high_precision(E_C, ratio):
    E_J = E_C * ratio
    assert josephson_bandwidth(E_J, E_C) == pytest.approx(float(bandwidth_mp(E_J, E_C)), rel=1e-12)


@pytest.mark.parametrize("lam", [0.5, 2, 10])
def test_bandwidth_homogeneity(lam):
    base = josephson_bandwidth(30e9, 3e9)
    assert josephson_bandwidth(lam * 30e9, lam * 3e9) == pytest.approx(lam * base, rel=1e-13)


def test_bandwidth_reference_value():
    assert josephson_bandwidth(30e9, 3e9) == pytest.approx(16.7e6, rel=1e-2)
    with pytest.raises(ValidationError):
        josephson_bandwidth(0, 1)


def test_josephson_mapping_report():
    p = JosephsonParams(E_J=30e9, E_C=3e9, L_1=1e-9, L_2=300e-9, L_r=10e-9, Z_r=50.0,
                        quoted={"plasma_frequency_hz": 150e9, "bandwidth_hz": 1.5e9})
    m = josephson_to_chain(p)
    f_p = math.sqrt(8 * 30e9 * 3e9)
    assert m.report["plasma_frequency_hz"] == pytest.approx(f_p)
    assert f_p == pytest.approx(26.83e9, rel=1e-3)
    assert m.fragment["t_a"] == m.fragment["t_b"] == pytest.approx(m.report["bandwidth_hz"] / 2 / f_p)
    assert "quoted 1.5e+11" in m.report["quoted_vs_formula"]["plasma_frequency_hz"]
    assert p.R_0 == RESISTANCE_QUANTUM
    assert "chain fragment" in m.text()


def test_josephson_flags():
    p = JosephsonParams(E_J=20e9, E_C=3e9, L_1=10e-9, L_2=300e-9, L_r=10e-9, Z_r=50.0)
    flags = p.flags()
    assert any("E_J/E_C" in f for f in flags) and any("L_2/L_1" in f for f in flags)
    assert JosephsonParams(E_J=60e9, E_C=3e9, L_1=1e-9, L_2=300e-9, L_r=1e-9, Z_r=50.0).flags() == []
    with pytest.raises(ValidationError):
        josephson_to_chain(JosephsonParams(E_J=30e9, E_C=3e9, L_1=1e-9, L_2=0.0, L_r=1e-9, Z_r=50.0))


def test_heterostructure_values():
    m = heterostructure_to_chain(30, 2, (5, 50), 10, 10, coherence_time=320, tunneling=1)
    hbar, e = 1.054571817e-34, 1.602176634e-19
    omega0 = 2 * math.pi * 30e12
    assert m.fragment["omega_b"] == pytest.approx(e * 1e6 * 10e-9 / hbar / omega0, rel=1e-9)
    assert m.fragment["g0"] == pytest.approx(e * 2e-9 * 50e5 / hbar / omega0, rel=1e-9)
    assert m.fragment["g0_min"] == pytest.approx(m.fragment["g0"] / 10)
    assert len(m.report["validity"]) == 2
    assert bloch_period_seconds(m.fragment["omega_b"], 30) == pytest.approx(m.report["bloch_period_s"])


@settings(max_examples=100)
@given(st.floats(1, 100), st.floats(0.1, 10), st.floats(0.1, 100), st.floats(0.1, 100),
       st.floats(1, 50), st.one_of(st.just(0.0), st.floats(1e-6, 20)))
def test_heterostructure_round_trip(freq, dipole, amp, dc, period, tun):
    m = heterostructure_to_chain(freq, dipole, amp, dc, period, tunneling=tun)
    back = heterostructure_to_physical(m.fragment, freq, dipole, period)
    assert back["field_amplitude"] == pytest.approx(amp, rel=1e-12)
    assert back["dc_field"] == pytest.approx(dc, rel=1e-12)
    assert back["tunneling"] == pytest.approx(tun, rel=1e-12)


def test_coherence_flags():
    omega0 = 2 * math.pi * 30e12
    flags = coherence_flags(320e-15, omega0, rabi=1e-2, omega_b=1e-4)
    assert "marginal" in flags[1]
    assert coherence_flags(1e-9, omega0, rabi=1e-2, omega_b=0.0)[0].endswith("ok")
    with pytest.raises(ValidationError):
        heterostructure_to_chain(-1, 2, 5, 10, 10)
