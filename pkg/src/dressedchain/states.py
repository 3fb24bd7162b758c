"""Initial states: Gaussian packets dressed with coherent, vacuum or Fock light,
entangled packet-Fock superpositions and windowed dressed eigenstates."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .analytic import dressed_band
from .model import ChainConfig, StateVector, TruncationError, ValidationError


@dataclass(frozen=True)
class GaussianSpec:
    """Packet ``weight * exp(-(p - u)^2 / sigma^2) * exp(i k p)``."""

    u: float
    sigma: float
    k: float = 0.0
    weight: complex = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError(f"sigma must be > 0, got {self.sigma}")


def gaussian_amplitudes(spec: GaussianSpec, n_sites: int) -> np.ndarray:
    """Unnormalized packet envelope times the quasimomentum phase, per site.

    The exponent has no factor 2 in the denominator: ``sigma`` is the 1/e
    half-width of the amplitude.
    """
    if not spec.sigma > 0:
        raise ValidationError(f"sigma must be > 0, got {spec.sigma}")
    if not 0 <= spec.u < n_sites:
        raise ValidationError(f"packet centre u={spec.u} outside [0, {n_sites})")
    p = np.arange(n_sites)
    return np.exp(-((p - spec.u) ** 2) / spec.sigma**2) * np.exp(1j * spec.k * p)


def poisson_amplitudes(mean: float, n_max: int) -> np.ndarray:
    """Real coherent-state amplitudes ``<n>^{n/2} e^{-<n>/2} / sqrt(n!)``, untruncated."""
    if mean < 0:
        raise ValidationError(f"mean photon number must be >= 0, got {mean}")
    n = np.arange(n_max + 1)
    if mean == 0:
        return (n == 0).astype(float)
    return np.exp(0.5 * (n * math.log(mean) - mean - gammaln(n + 1)))


def _packet_pair(packet_a: GaussianSpec, packet_b: GaussianSpec, n_sites: int):
    if packet_a.weight == 0 and packet_b.weight == 0:
        raise ValidationError("both packet weights are zero")
    ga = packet_a.weight * gaussian_amplitudes(packet_a, n_sites) if packet_a.weight != 0 \
        else np.zeros(n_sites, complex)
    gb = packet_b.weight * gaussian_amplitudes(packet_b, n_sites) if packet_b.weight != 0 \
        else np.zeros(n_sites, complex)
    return ga, gb


def coherent_product_state(packet_a: GaussianSpec, packet_b: GaussianSpec,
                           mean_photons: float, config: ChainConfig) -> StateVector:
    """Electron packet pair times a zero-phase coherent state of light.

    The Fock distribution is truncated at ``config.n_max`` and renormalized.
    """
    ga, gb = _packet_pair(packet_a, packet_b, config.n_sites)
    w = poisson_amplitudes(mean_photons, config.n_max)
    tail = 1.0 - float(np.sum(w**2))
    if tail > 1e-6:
        warnings.warn(f"n_max={config.n_max} drops Poisson tail mass {tail:.3g} "
                      f"for <n>={mean_photons}", RuntimeWarning, stacklevel=2)
    state = StateVector(np.outer(ga, w), np.outer(gb, w))
    return state.normalized()


def vacuum_product_state(packet_a: GaussianSpec, packet_b: GaussianSpec,
                         config: ChainConfig) -> StateVector:
    return fock_product_state(packet_a, packet_b, 0, config)


def fock_product_state(packet_a: GaussianSpec, packet_b: GaussianSpec, n: int,
                       config: ChainConfig) -> StateVector:
    """Electron packet pair times the Fock state ``|n>``."""
    if not 0 <= n <= config.n_max:
        raise TruncationError(f"Fock level {n} needs n_max >= {n}, got {config.n_max}")
    ga, gb = _packet_pair(packet_a, packet_b, config.n_sites)
    state = StateVector.zeros(config)
    state.a[:, n] = ga
    state.b[:, n] = gb
    return state.normalized()


def entangled_fock_state(n: int, u: float, sigma: float, phase: int,
                         config: ChainConfig) -> StateVector:
    """``C0 sum_p G(p) (|a_p, n> + phase |b_p, n+1>)`` with ``phase`` = +1 or -1."""
    if phase not in (1, -1):
        raise ValidationError(f"phase must be +1 or -1, got {phase}")
    if n < 0 or n + 1 > config.n_max:
        raise TruncationError(f"entangled state at n={n} needs n_max >= {n + 1}, got {config.n_max}")
    g = gaussian_amplitudes(GaussianSpec(u, sigma), config.n_sites)
    state = StateVector.zeros(config)
    state.a[:, n] = g
    state.b[:, n + 1] = phase * g
    return state.normalized()


def dressed_eigenstate(n: int, branch: int, phi: float, config: ChainConfig,
                       packet: GaussianSpec | None = None) -> StateVector:
    """Dressed Bloch state of ``branch`` (1 = upper) in sector ``n`` at phase ``phi``.

    Branch 1 carries the (1, -Delta) amplitude pair on ``(|a_p, n>, |b_p, n+1>)``,
    branch 2 carries (Delta, 1), each with the per-site phase ``exp(i p phi)``.
    Without ``packet`` the state is a uniform plane wave, an exact eigenstate of
    the periodic ring only for ``phi`` on the grid ``2 pi m / N``; with ``packet``
    the plane wave is windowed by the packet envelope (its ``k`` and ``weight``
    are ignored).
    """
    if branch not in (1, 2):
        raise ValidationError(f"branch must be 1 or 2, got {branch}")
    if n < 0 or n + 1 > config.n_max:
        raise TruncationError(f"dressed state at n={n} needs n_max >= {n + 1}, got {config.n_max}")
    band = dressed_band(phi, n, config)
    ca, cb = band.amplitudes(branch)
    p = np.arange(config.n_sites)
    env = np.ones(config.n_sites) if packet is None else \
        gaussian_amplitudes(GaussianSpec(packet.u, packet.sigma), config.n_sites)
    wave = env * np.exp(1j * phi * p)
    state = StateVector.zeros(config)
    state.a[:, n] = ca * wave
    state.b[:, n + 1] = cb * wave
    return state.normalized()
