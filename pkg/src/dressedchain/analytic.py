"""Closed-form dressed-band solution and quasiclassical Bloch kinematics.

These formulas are independent of the integrator and serve as its oracle.
Phase convention: with the on-site dc energy ``-omega_b * p`` used by
:mod:`dressedchain.dynamics`, the quasimomentum phase of a Bloch state
advances as ``phi(t) = phi0 + omega_b * t``.  Only ``cos(phi)`` enters the
dressed-band quantities, so for ``phi0 = 0`` the sign of the sweep is
immaterial.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ChainConfig, ValidationError


def bloch_phase(t, phi0: float, omega_b: float):
    """Unwrapped quasimomentum phase at time ``t``."""
    return phi0 + omega_b * (np.asarray(t) if np.ndim(t) else t)


def mixing_ratio(phi, g_n: float, t_a: float, t_b: float):
    """Dressed-state mixing ratio ``g_n / (D + sqrt(D^2 + g_n^2))``, ``D = (t_a - t_b) cos phi``.

    Evaluated in the cancellation-free form ``(sqrt(D^2 + g_n^2) - D) / g_n``
    when ``D < 0``.
    """
    d = (t_a - t_b) * np.cos(phi)
    r = np.hypot(d, g_n)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.where(d >= 0, g_n / (d + r), (r - d) / g_n)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DressedBand:
    n: int
    phi: float
    nu1: float
    nu2: float
    delta: float
    g_n: float
    degenerate: bool = False

    @property
    def excited_weight(self) -> float:
        """``1 / (1 + delta^2)``: weight of ``|a, n>`` in branch 1."""
        return _excited_weight(self.delta)

    def amplitudes(self, branch: int) -> tuple[float, float]:
        """Normalized ``(a, b)`` amplitude pair of a branch."""
        if math.isinf(self.delta):
            ca, cb = 0.0, 1.0
        else:
            r = math.hypot(1.0, self.delta)
            ca, cb = 1.0 / r, self.delta / r
        if branch == 1:
            return ca, -cb
        if branch == 2:
            return cb, ca
        raise ValidationError(f"branch must be 1 or 2, got {branch}")


def _excited_weight(delta: float) -> float:
    if math.isinf(delta):
        return 0.0
    if delta > 1.0:
        inv = 1.0 / delta
        return inv * inv / (1.0 + inv * inv)
    return 1.0 / (1.0 + delta * delta)


def _real_tunneling(config: ChainConfig) -> tuple[float, float]:
    if np.iscomplexobj(config.t_a) or np.iscomplexobj(config.t_b):
        if np.imag(config.t_a) != 0 or np.imag(config.t_b) != 0:
            raise ValidationError("dressed-band formulas assume real tunneling energies")
    return float(np.real(config.t_a)), float(np.real(config.t_b))


def dressed_band(phi: float, n: int, config: ChainConfig) -> DressedBand:
    """Eigenfrequencies and mixing ratio of sector ``n`` at quasimomentum phase ``phi``."""
    if config.g0 < 0:
        raise ValidationError("g0 must be >= 0")
    t_a, t_b = _real_tunneling(config)
    g_n = config.g0 * math.sqrt(n + 1)
    c = math.cos(phi)
    d = (t_a - t_b) * c
    r = math.hypot(d, g_n)
    mean = (t_a + t_b) * c
    degenerate = g_n == 0 and d == 0
    if degenerate:
        delta = 0.0
    elif g_n == 0:
        delta = 0.0 if d > 0 else math.inf
    else:
        delta = mixing_ratio(phi, g_n, t_a, t_b)
    return DressedBand(n, phi, mean + r, mean - r, delta, g_n, degenerate)


def sector_matrix(phi: float, n: int, config: ChainConfig) -> np.ndarray:
    """2x2 plane-wave Hamiltonian of sector ``n`` on ``(a, b)`` amplitudes."""
    t_a, t_b = _real_tunneling(config)
    c = math.cos(phi)
    g_n = config.g0 * math.sqrt(n + 1)
    return np.array([[2 * t_a * c, -g_n], [-g_n, 2 * t_b * c]])


def delta_of_time(t, n: int, phi0: float, config: ChainConfig):
    """Mixing ratio along the Bloch sweep ``phi(t)``."""
    t_a, t_b = _real_tunneling(config)
    g_n = config.g0 * math.sqrt(n + 1)
    return mixing_ratio(bloch_phase(t, phi0, config.omega_b), g_n, t_a, t_b)


@dataclass(frozen=True)
class PhotonStats:
    distribution: dict[int, float]
    mean: float
    variance: float
    entropy: float


def _xlogx(w):
    return w * math.log(w) if w > 0 else 0.0


def analytic_photon_stats(branch: int, n: int, t: float, phi0: float,
                          config: ChainConfig) -> PhotonStats:
    """Photon statistics of a dressed branch adiabatically following the sweep.

    The entropy is returned as the non-negative ``-sum w ln w``.
    """
    if branch not in (1, 2):
        raise ValidationError(f"branch must be 1 or 2, got {branch}")
    delta = delta_of_time(t, n, phi0, config)
    w = _excited_weight(delta)
    if branch == 2:
        w = 1.0 - w
    return PhotonStats(
        distribution={n: w, n + 1: 1.0 - w},
        mean=n + (1.0 - w),
        variance=w * (1.0 - w),
        entropy=-(_xlogx(w) + _xlogx(1.0 - w)),
    )


def adiabatic_final_phase(field_samples, phi0: float, dt: float | None = None,
                          times=None) -> float:
    """Phase reached after a dc ramp: ``phi0 + integral of omega_b(tau)``.

    ``field_samples`` are Bloch-frequency values either on a uniform grid of
    spacing ``dt`` or at the explicit ``times``; composite trapezoid rule.
    """
    y = np.asarray(field_samples, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValidationError("field samples must be finite")
    if y.size < 2:
        return float(phi0)
    if times is not None:
        integral = np.trapezoid(y, np.asarray(times, dtype=float))
    else:
        if dt is None or dt < 0:
            raise ValidationError("give a non-negative dt or explicit sample times")
        integral = np.trapezoid(y, dx=dt)
    return float(phi0 + integral)


def quasiclassical_center(t, band: str, phi0: float, config: ChainConfig,
                          branch: int = 1, n: int = 0):
    """Displacement of a packet centre along a band, in lattice sites.

    With ``dphi/dt = omega_b`` the group velocity ``d nu / d phi`` integrates to
    ``(nu(phi(t)) - nu(phi0)) / omega_b`` for any band dispersion ``nu``.
    ``band`` is ``"a"``, ``"b"`` or ``"mixed"`` (dressed ``branch`` of sector ``n``).
    """
    if not config.omega_b > 0:
        raise ValidationError("quasiclassical Bloch motion needs omega_b > 0")
    t_a, t_b = _real_tunneling(config)
    phi = bloch_phase(t, phi0, config.omega_b)
    if band == "a":
        nu = lambda x: 2 * t_a * np.cos(x)  # noqa: E731
    elif band == "b":
        nu = lambda x: 2 * t_b * np.cos(x)  # noqa: E731
    elif band == "mixed":
        g_n = config.g0 * math.sqrt(n + 1)
        sign = 1.0 if branch == 1 else -1.0

        def nu(x):
            c = np.cos(x)
            return (t_a + t_b) * c + sign * np.hypot((t_a - t_b) * c, g_n)
    else:
        raise ValidationError(f"band must be 'a', 'b' or 'mixed', got {band!r}")
    return (nu(phi) - nu(phi0)) / config.omega_b
