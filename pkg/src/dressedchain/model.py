"""Unit system, chain configuration and the Wannier-Fock state container.

All quantities are dimensionless: hbar = 1 and energies/frequencies are
measured in units of the atomic transition frequency omega_0.

Flat layout
-----------
The state is stored in ``M = 2 N (n_max + 1)`` slots split into ``n_max + 1``
contiguous blocks of ``2N`` slots.  Block ``k`` interleaves the excited ring
``a[:, k]`` (even slots) with the ground ring ``b[:, (k + 1) % (n_max + 1)]``
(odd slots)::

    index(p, n, excited) = 2N * n + 2p
    index(p, n, ground)  = 2N * ((n - 1) mod (n_max + 1)) + 2p + 1

For ``k < n_max`` a block is exactly the dynamical sector ``{a[., k], b[., k+1]}``.
The last block carries the two rings that have no coupling partner: the
top excited ring ``a[., n_max]`` (its partner ``b[., n_max+1]`` is truncated)
and the ground vacuum ring ``b[., 0]`` (the orphan sector).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

EXCITED = "excited"
GROUND = "ground"
ORPHAN = -1


class ValidationError(ValueError):
    """Invalid parameters or configuration."""


class TruncationError(ValidationError):
    """Fock truncation too small for the requested state."""


class NumericError(ArithmeticError):
    """Non-finite amplitudes or a failed linear solve."""


@dataclass(frozen=True)
class ChainConfig:
    """Dimensionless model parameters of the driven two-band chain.

    Parameters
    ----------
    n_sites : int
        Number of atoms ``N``.
    t_a, t_b : complex
        Tunneling energies of the excited and ground bands.
    g0 : float
        Bare atom-light coupling (peak value for pulsed light).
    omega_b : float
        Bloch frequency ``e E_dc a / hbar``.
    delta_eps : float
        Half the band-centre splitting; enters as ``+delta_eps`` on the
        excited band and ``-delta_eps`` on the ground band.
    n_max : int
        Highest retained photon number.
    phi0 : float
        Initial quasimomentum phase per cell.
    """

    n_sites: int
    t_a: complex = 0.0
    t_b: complex = 0.0
    g0: float = 0.0
    omega_b: float = 0.0
    delta_eps: float = 0.0
    n_max: int = 1
    phi0: float = 0.0

    def __post_init__(self):
        errors = self.problems()
        if errors:
            raise ValidationError("; ".join(errors))

    def problems(self) -> list[str]:
        out = []
        if int(self.n_sites) != self.n_sites or self.n_sites < 1:
            out.append(f"n_sites must be a positive integer, got {self.n_sites!r}")
        if int(self.n_max) != self.n_max or self.n_max < 0:
            out.append(f"n_max must be a non-negative integer, got {self.n_max!r}")
        for name in ("t_a", "t_b", "g0", "omega_b", "delta_eps", "phi0"):
            if not np.isfinite(getattr(self, name)):
                out.append(f"{name} must be finite")
        if np.isfinite(self.g0) and self.g0 < 0:
            out.append("g0 must be >= 0")
        if np.isfinite(self.omega_b) and self.omega_b < 0:
            out.append("omega_b must be >= 0")
        return out

    @property
    def n_levels(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 2 * self.n_sites * self.n_levels

    @property
    def bloch_period(self) -> float:
        return 2 * math.pi / self.omega_b if self.omega_b > 0 else math.inf

    def with_(self, **changes) -> "ChainConfig":
        return replace(self, **changes)


def default_n_max(mean_photons: float) -> int:
    """Fock cutoff ``ceil(<n> + 6 sqrt(<n>))`` for a coherent state, at least 1."""
    return max(1, math.ceil(mean_photons + 6.0 * math.sqrt(mean_photons)))


@dataclass
class StateVector:
    """Amplitudes ``a[p, n]`` and ``b[p, n]`` at time ``time``."""

    a: np.ndarray
    b: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)
        self.b = np.asarray(self.b, dtype=complex)
        if self.a.ndim != 2 or self.a.shape != self.b.shape:
            raise ValidationError(
                f"a and b must be equal-shape 2-d grids, got {self.a.shape} and {self.b.shape}")

    @classmethod
    def zeros(cls, config: ChainConfig, time: float = 0.0) -> "StateVector":
        shape = (config.n_sites, config.n_levels)
        return cls(np.zeros(shape, complex), np.zeros(shape, complex), time)

    @property
    def n_sites(self) -> int:
        return self.a.shape[0]

    @property
    def n_max(self) -> int:
        return self.a.shape[1] - 1

    def copy(self) -> "StateVector":
        return StateVector(self.a.copy(), self.b.copy(), self.time)

    def scaled(self, c: complex) -> "StateVector":
        return StateVector(c * self.a, c * self.b, self.time)

    def normalized(self) -> "StateVector":
        nrm = norm(self)
        if nrm == 0:
            raise ValidationError("cannot normalize the zero state")
        return self.scaled(1.0 / math.sqrt(nrm))


def _check_finite(state: StateVector):
    if not (np.all(np.isfinite(state.a)) and np.all(np.isfinite(state.b))):
        raise NumericError(f"non-finite amplitude at t={state.time}")


def norm(state: StateVector) -> float:
    """Total probability ``sum |a|^2 + |b|^2`` (not its square root)."""
    _check_finite(state)
    return float(np.sum(np.abs(state.a) ** 2) + np.sum(np.abs(state.b) ** 2))


@dataclass(frozen=True)
class Layout:
    """Bijection between ``(p, n, band)`` and the flat sector-contiguous index."""

    n_sites: int
    n_max: int
    _perm: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        N, L = self.n_sites, self.n_max + 1
        p = np.arange(N)[:, None]
        n = np.arange(L)[None, :]
        idx_a = 2 * N * n + 2 * p
        idx_b = 2 * N * ((n - 1) % L) + 2 * p + 1
        object.__setattr__(self, "_perm", (idx_a, idx_b))

    @classmethod
    def of(cls, config: ChainConfig) -> "Layout":
        return cls(config.n_sites, config.n_max)

    @property
    def size(self) -> int:
        return 2 * self.n_sites * (self.n_max + 1)

    @property
    def block(self) -> int:
        return 2 * self.n_sites

    def flat_index(self, p: int, n: int, band: str) -> int:
        if not (0 <= p < self.n_sites and 0 <= n <= self.n_max):
            raise IndexError(f"(p={p}, n={n}) outside {self.n_sites} sites x {self.n_max + 1} levels")
        if band == EXCITED:
            return int(self._perm[0][p, n])
        if band == GROUND:
            return int(self._perm[1][p, n])
        raise IndexError(f"unknown band {band!r}")

    def unflatten(self, index: int) -> tuple[int, int, str]:
        if not 0 <= index < self.size:
            raise IndexError(f"flat index {index} outside [0, {self.size})")
        k, r = divmod(index, self.block)
        p, odd = divmod(r, 2)
        if odd:
            return p, (k + 1) % (self.n_max + 1), GROUND
        return p, k, EXCITED

    def to_flat(self, state: StateVector) -> np.ndarray:
        psi = np.empty(self.size, complex)
        psi[self._perm[0]] = state.a
        psi[self._perm[1]] = state.b
        return psi

    def from_flat(self, psi: np.ndarray, time: float = 0.0) -> StateVector:
        return StateVector(psi[self._perm[0]], psi[self._perm[1]], time)


def sector_labels(n_max: int) -> list[int]:
    """Sector labels: ``0..n_max`` for ``{a[., n], b[., n+1]}`` plus ``ORPHAN``."""
    return list(range(n_max + 1)) + [ORPHAN]


def sector_slice(state: StateVector, n: int) -> np.ndarray:
    """Amplitudes of one sector, interleaved ``(a_p, b_p)`` when both rings exist."""
    if n == ORPHAN:
        return state.b[:, 0].copy()
    if not 0 <= n <= state.n_max:
        raise IndexError(f"sector {n} outside 0..{state.n_max}")
    if n == state.n_max:
        return state.a[:, n].copy()
    out = np.empty(2 * state.n_sites, complex)
    out[0::2] = state.a[:, n]
    out[1::2] = state.b[:, n + 1]
    return out


def sector_norms(state: StateVector) -> dict[int, float]:
    """Probability mass carried by each sector; values sum to ``norm(state)``."""
    _check_finite(state)
    pa = np.sum(np.abs(state.a) ** 2, axis=0)
    pb = np.sum(np.abs(state.b) ** 2, axis=0)
    out = {n: float(pa[n] + pb[n + 1]) for n in range(state.n_max)}
    out[state.n_max] = float(pa[state.n_max])
    out[ORPHAN] = float(pb[0])
    return out
