import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dressedchain import (EXCITED, GROUND, ORPHAN, ChainConfig, Layout, NumericError,
                          StateVector, ValidationError, default_n_max, norm, sector_norms)
from dressedchain.model import sector_labels, sector_slice

from conftest import random_state


def test_config_rejects_bad_values():
    with pytest.raises(ValidationError, match="n_sites"):
        ChainConfig(n_sites=0)
    with pytest.raises(ValidationError, match="g0"):
        ChainConfig(n_sites=4, g0=-0.1)
    with pytest.raises(ValidationError, match="omega_b"):
        ChainConfig(n_sites=4, omega_b=-1e-3)
    with pytest.raises(ValidationError, match="n_max"):
        ChainConfig(n_sites=4, n_max=-1)


def test_config_reports_every_problem():
    with pytest.raises(ValidationError) as err:
        ChainConfig(n_sites=0, g0=-1.0, omega_b=math.nan)
    msg = str(err.value)
    assert "n_sites" in msg and "g0" in msg and "omega_b" in msg


def test_config_derived_quantities():
    c = ChainConfig(n_sites=128, n_max=60, omega_b=0.0008)
    assert c.dim == 2 * 128 * 61
    assert c.bloch_period == pytest.approx(2 * math.pi / 0.0008)
    assert ChainConfig(n_sites=3).bloch_period == math.inf
    assert c.with_(n_max=1).dim == 512


def test_default_n_max():
    assert default_n_max(25) == 55
    assert default_n_max(0) == 1
    assert default_n_max(1) == 7


def test_layout_examples():
    lay = Layout(n_sites=4, n_max=2)
    assert lay.flat_index(0, 0, EXCITED) == 0
    assert lay.flat_index(0, 1, GROUND) == 1
    assert lay.flat_index(3, 0, GROUND) == lay.size - 1
    assert lay.unflatten(lay.size - 1) == (3, 0, GROUND)
    with pytest.raises(IndexError):
        lay.flat_index(4, 0, EXCITED)
    with pytest.raises(IndexError):
        lay.unflatten(lay.size)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.integers(0, 5))
def test_layout_is_a_bijection(n_sites, n_max):
    lay = Layout(n_sites, n_max)
    seen = set()
    for p in range(n_sites):
        for n in range(n_max + 1):
            for band in (EXCITED, GROUND):
                i = lay.flat_index(p, n, band)
                assert lay.unflatten(i) == (p, n, band)
                seen.add(i)
    assert seen == set(range(lay.size))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 7), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_flat_round_trip(n_sites, n_max, seed):
    cfg = ChainConfig(n_sites=n_sites, n_max=n_max)
    state = random_state(cfg, np.random.default_rng(seed), time=1.5)
    lay = Layout.of(cfg)
    back = lay.from_flat(lay.to_flat(state), state.time)
    np.testing.assert_array_equal(back.a, state.a)
    np.testing.assert_array_equal(back.b, state.b)
    assert back.time == 1.5


def test_blocks_hold_sectors(small_config, rng):
    state = random_state(small_config, rng)
    lay = Layout.of(small_config)
    psi = lay.to_flat(state)
    B = lay.block
    for n in range(small_config.n_max):
        np.testing.assert_array_equal(psi[n * B:(n + 1) * B], sector_slice(state, n))
    last = psi[small_config.n_max * B:]
    np.testing.assert_array_equal(last[0::2], sector_slice(state, small_config.n_max))
    np.testing.assert_array_equal(last[1::2], sector_slice(state, ORPHAN))


def test_sector_norms_partition_total(small_config, rng):
    state = random_state(small_config, rng)
    parts = sector_norms(state)
    assert sorted(parts) == sorted(sector_labels(small_config.n_max))
    assert sum(parts.values()) == pytest.approx(norm(state), rel=1e-14)


def test_norm_and_normalization(rng, small_config):
    state = random_state(small_config, rng).scaled(3.0)
    assert norm(state) == pytest.approx(9.0)
    assert norm(state.normalized()) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValidationError):
        StateVector.zeros(small_config).normalized()


def test_non_finite_amplitudes_raise(small_config):
    state = StateVector.zeros(small_config)
    state.a[0, 0] = np.nan
    with pytest.raises(NumericError):
        norm(state)


def test_state_shape_checked():
    with pytest.raises(ValidationError):
        StateVector(np.zeros((3, 2)), np.zeros((3, 3)))
