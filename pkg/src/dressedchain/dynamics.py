"""Sector Hamiltonians and the Crank-Nicolson (Cayley) propagator.

In the flat layout of :mod:`dressedchain.model` every block of ``2N`` slots
is an independent pentadiagonal system (couplings at offset 1, ring hops at
offset 2) closed into a ring by two corner pairs.  Each step solves::

    (1 + i dt/2 H) psi(t + dt) = (1 - i dt/2 H) psi(t)

with ``H`` evaluated at ``t + dt/2``.  The band part is factorized with LAPACK
``zgbtrf``; the ring-closing corners are restored with a rank-2 Woodbury
correction per block, whose two correction columns are shared by all blocks.
"""
from __future__ import annotations

import math
import time as _time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import lapack

from .model import ORPHAN, ChainConfig, Layout, NumericError, StateVector, ValidationError, norm
from .pulse import Envelope, coupling_at

KL = KU = 2


@dataclass
class SectorHamiltonian:
    """Hamiltonian of one closed sector.

    Coupled sectors are ordered ``(a_0, b_0, a_1, b_1, ...)``; the top excited
    ring (``n == n_max``) and the orphan ground ring are ordered by site.
    """

    n: int
    n_sites: int
    diagonal: np.ndarray
    t_a: complex
    t_b: complex
    coupling: float
    rings: tuple[str, ...]

    def dense(self) -> np.ndarray:
        N = self.n_sites
        dim = len(self.diagonal)
        H = np.diag(self.diagonal.astype(complex))
        stride = len(self.rings)
        for r, ring in enumerate(self.rings):
            t = self.t_a if ring == "a" else self.t_b
            for p in range(N):
                i = stride * p + r
                j = stride * ((p + 1) % N) + r
                H[i, j] += t
                H[j, i] += np.conj(t)
        if stride == 2:
            for p in range(N):
                H[2 * p, 2 * p + 1] += self.coupling
                H[2 * p + 1, 2 * p] += self.coupling
        assert H.shape == (dim, dim)
        return H


def _onsite(config: ChainConfig):
    p = np.arange(config.n_sites)
    return config.delta_eps - config.omega_b * p, -config.delta_eps - config.omega_b * p


def assemble_sector(config: ChainConfig, n: int, g_now: float) -> SectorHamiltonian:
    """Sector ``n`` couples ``a[., n]`` with ``b[., n+1]``; ``ORPHAN`` is ``b[., 0]``."""
    ea, eb = _onsite(config)
    if n == ORPHAN:
        return SectorHamiltonian(n, config.n_sites, eb, config.t_a, config.t_b, 0.0, ("b",))
    if not 0 <= n <= config.n_max:
        raise ValidationError(f"sector {n} outside 0..{config.n_max}")
    if n == config.n_max:
        return SectorHamiltonian(n, config.n_sites, ea, config.t_a, config.t_b, 0.0, ("a",))
    diag = np.empty(2 * config.n_sites)
    diag[0::2], diag[1::2] = ea, eb
    return SectorHamiltonian(n, config.n_sites, diag, config.t_a, config.t_b,
                             -g_now * math.sqrt(n + 1), ("a", "b"))


def energy_scale(config: ChainConfig, g_max: float | None = None) -> float:
    """Fastest frequency ``max(|de| + wB N, 2(|ta|+|tb|), g sqrt(n_max+1))``."""
    g = config.g0 if g_max is None else g_max
    return max(abs(config.delta_eps) + config.omega_b * config.n_sites,
               2 * (abs(config.t_a) + abs(config.t_b)),
               g * math.sqrt(config.n_max + 1))


def default_dt(config: ChainConfig, g_max: float | None = None) -> float:
    e = energy_scale(config, g_max)
    return 0.05 / e if e > 0 else 1.0


class RingBandedSystem:
    """Block-diagonal linear system with per-block ring-closing corners.

    Each block of size ``block`` (even, two interleaved rings) is pentadiagonal
    with band arrays ``diag``, ``up1``/``lo1`` (offset 1) and ``up2``/``lo2``
    (offset 2), plus corners ``A[f_r, l_r] = corner_fl[k, r]`` and
    ``A[l_r, f_r] = corner_lf[k, r]`` with ``f_r = r`` and ``l_r = block - 2 + r``.
    Band entries that would connect different blocks must be zero.
    """

    def __init__(self, diag, up1, lo1, up2, lo2, corner_fl, corner_lf, block: int,
                 groups: int = 1):
        self.size = len(diag)
        self.block = block
        self.nblocks = self.size // block
        if self.nblocks * block != self.size or block % 2:
            raise ValidationError(f"size {self.size} is not a multiple of the even block {block}")
        self.corner_fl = np.asarray(corner_fl, complex).reshape(self.nblocks, 2)
        self.corner_lf = np.asarray(corner_lf, complex).reshape(self.nblocks, 2)
        if block < 6 and (np.any(self.corner_fl) or np.any(self.corner_lf)):
            raise ValidationError("rings shorter than 3 sites must fold corners into the band")
        ab = np.zeros((2 * KL + KU + 1, self.size), complex)
        ab[KL + KU] = diag
        ab[KL + KU - 1, 1:] = up1
        ab[KL + KU - 2, 2:] = up2
        ab[KL + KU + 1, :-1] = lo1
        ab[KL + KU + 2, :-2] = lo2
        self._bands = (np.asarray(diag, complex), np.asarray(up1, complex), np.asarray(lo1, complex),
                       np.asarray(up2, complex), np.asarray(lo2, complex))
        self._ab = ab
        self._n_groups = max(1, min(int(groups), self.nblocks))
        self._groups = None
        self._pool = None

    def _factorize(self):
        """LU factorization of the band part plus the Woodbury capacitance matrices (on first solve)."""
        ab, groups = self._ab, self._n_groups
        self._ab = None
        K, B = self.nblocks, self.block
        f = np.array([0, 1])
        l = B - 2 + f
        prod = self.corner_lf * self.corner_fl
        gamma = np.sqrt(prod)
        fallback = np.maximum(np.abs(self.corner_lf), np.abs(self.corner_fl))
        gamma = np.where(gamma == 0, fallback, gamma)
        active = gamma != 0
        gamma = np.where(active, gamma, 1.0)
        self._beta = np.where(active, self.corner_fl / gamma, 0.0)
        self._active = bool(np.any(active))

        diag = ab[KL + KU].reshape(K, B)
        diag[:, f] -= np.where(active, gamma, 0.0)
        diag[:, l] -= np.where(active, prod / gamma, 0.0)

        bounds = np.linspace(0, K, groups + 1).round().astype(int) * B
        factors = []
        for s, e in zip(bounds[:-1], bounds[1:]):
            lu, piv, info = lapack.zgbtrf(ab[:, s:e], KL, KU)
            if info != 0:
                raise NumericError(f"banded factorization failed (info={info})")
            factors.append((s, e, lu, piv))
        self._groups = factors
        self._pool = ThreadPoolExecutor(len(self._groups)) if len(self._groups) > 1 else None

        if self._active:
            U = np.zeros((K, B, 2), complex)
            U[:, f[0], 0] = np.where(active[:, 0], gamma[:, 0], 0.0)
            U[:, l[0], 0] = np.where(active[:, 0], self.corner_lf[:, 0], 0.0)
            U[:, f[1], 1] = np.where(active[:, 1], gamma[:, 1], 0.0)
            U[:, l[1], 1] = np.where(active[:, 1], self.corner_lf[:, 1], 0.0)
            Z = self._band_solve(U.reshape(self.size, 2)).reshape(K, B, 2)
            cap = np.zeros((K, 2, 2), complex)
            for r in range(2):
                cap[:, r, :] = Z[:, f[r], :] + self._beta[:, r, None] * Z[:, l[r], :]
            cap += np.eye(2)
            self._Z = Z
            self._cap_inv = np.linalg.inv(cap)

    def _band_solve(self, rhs: np.ndarray) -> np.ndarray:
        two_d = rhs.ndim == 2
        r = rhs if two_d else rhs[:, None]
        out = np.empty_like(r, dtype=complex)

        def work(g):
            s, e, lu, piv = g
            x, info = lapack.zgbtrs(lu, KL, KU, r[s:e], piv)
            if info != 0:
                raise NumericError(f"banded solve failed (info={info})")
            out[s:e] = x

        if self._pool is None:
            for g in self._groups:
                work(g)
        else:
            list(self._pool.map(work, self._groups))
        return out if two_d else out[:, 0]

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._groups is None:
            self._factorize()
        y = self._band_solve(np.asarray(rhs, complex))
        if not self._active:
            return y
        K, B = self.nblocks, self.block
        yb = y.reshape(K, B)
        w = yb[:, [0, 1]] + self._beta * yb[:, [B - 2, B - 1]]
        coef = np.einsum("kij,kj->ki", self._cap_inv, w)
        yb -= np.einsum("kbs,ks->kb", self._Z, coef)
        return y

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, complex)
        d, u1, l1, u2, l2 = self._bands
        y = d * x
        y[:-1] += u1 * x[1:]
        y[1:] += l1 * x[:-1]
        y[:-2] += u2 * x[2:]
        y[2:] += l2 * x[:-2]
        if np.any(self.corner_fl) or np.any(self.corner_lf):
            K, B = self.nblocks, self.block
            xb, yb = x.reshape(K, B), y.reshape(K, B)
            yb[:, [0, 1]] += self.corner_fl * xb[:, [B - 2, B - 1]]
            yb[:, [B - 2, B - 1]] += self.corner_lf * xb[:, [0, 1]]
        return y

    def dense(self) -> np.ndarray:
        return np.column_stack([self.matvec(e) for e in np.eye(self.size)])

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None


def solve_sector_system(system: RingBandedSystem, rhs: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Solve and verify ``||A x - rhs|| / ||rhs|| < tol``."""
    x = system.solve(rhs)
    scale = np.linalg.norm(rhs)
    if not np.all(np.isfinite(x)):
        raise NumericError("non-finite solution")
    if scale > 0:
        res = np.linalg.norm(system.matvec(x) - rhs) / scale
        if res > tol:
            raise NumericError(f"linear-solve residual {res:.3g} above {tol:g}")
    return x


class ChainHamiltonian:
    """Band arrays of the full flat-layout Hamiltonian, ``H(g) = H0 + g C``."""

    def __init__(self, config: ChainConfig):
        self.config = config
        N, L = config.n_sites, config.n_levels
        B, M = 2 * N, config.dim
        self.layout = Layout.of(config)
        ea, eb = _onsite(config)
        d0 = np.empty((L, B), complex)
        d0[:, 0::2], d0[:, 1::2] = ea, eb
        t = np.array([config.t_a, config.t_b], complex)
        if N == 1:
            d0 += np.tile(2 * t.real, (L, 1))
        self.d0 = d0.ravel()

        c1 = np.zeros((L, B))
        c1[:L - 1, 0::2] = np.sqrt(np.arange(1, L))[:, None]
        self.c1 = c1.ravel()[:-1]  # offset-1 coupling pattern; real and symmetric

        up2 = np.zeros((L, B), complex)
        lo2 = np.zeros((L, B), complex)
        self.corner_fl = np.zeros((L, 2), complex)
        self.corner_lf = np.zeros((L, 2), complex)
        if N == 2:
            up2[:, 0:2] = t + t.conj()
            lo2[:, 0:2] = t + t.conj()
        elif N >= 3:
            up2[:, :B - 2] = np.tile(t, N - 1)
            lo2[:, :B - 2] = np.tile(t.conj(), N - 1)
            self.corner_fl[:] = t.conj()
            self.corner_lf[:] = t
        self.up2 = up2.ravel()[:-2]
        self.lo2 = lo2.ravel()[:-2]
        self.block = B
        self.size = M

    def cayley(self, g: float, dt: float, sign: int, groups: int = 1) -> RingBandedSystem:
        """``1 + sign * i dt/2 H(g)`` as a :class:`RingBandedSystem`."""
        c = sign * 0.5j * dt
        d1 = -g * self.c1
        return RingBandedSystem(1.0 + c * self.d0, c * d1, c * d1, c * self.up2, c * self.lo2,
                                c * self.corner_fl, c * self.corner_lf, self.block, groups)

    def matrix(self, g: float) -> RingBandedSystem:
        d1 = -g * self.c1
        return RingBandedSystem(self.d0, d1, d1, self.up2, self.lo2,
                                self.corner_fl, self.corner_lf, self.block, 1)

    def apply(self, psi: np.ndarray, g: float) -> np.ndarray:
        return self.matrix(g).matvec(psi)


class CrankNicolson:
    """Norm-preserving stepper; refactorizes only when ``g(t + dt/2)`` changes."""

    def __init__(self, config: ChainConfig, dt: float, envelope: Envelope | None = None,
                 threads: int = 1):
        if not dt > 0:
            raise ValidationError(f"dt must be > 0, got {dt}")
        self.config = config
        self.dt = dt
        self.envelope = envelope or Envelope("constant", config.g0)
        self.threads = threads
        self.ham = ChainHamiltonian(config)
        self._g = None
        self._lhs = self._rhs = None
        self.factorizations = 0

    def coupling(self, t: float) -> float:
        return coupling_at(self.envelope, t)

    def _prepare(self, g: float):
        if g == self._g:
            return
        if self._lhs is not None:
            self._lhs.close()
        self._lhs = self.ham.cayley(g, self.dt, +1, self.threads)
        self._rhs = self.ham.cayley(g, self.dt, -1)
        self._g = g
        self.factorizations += 1

    def step_flat(self, psi: np.ndarray, t: float) -> np.ndarray:
        self._prepare(self.coupling(t + 0.5 * self.dt))
        out = self._lhs.solve(self._rhs.matvec(psi))
        if not np.all(np.isfinite(out)):
            raise NumericError(f"non-finite amplitudes after step at t={t + self.dt}")
        return out

    def close(self):
        if self._lhs is not None:
            self._lhs.close()


def cn_step(state: StateVector, t: float, dt: float, config: ChainConfig,
            schedule: Envelope | None = None) -> StateVector:
    """Advance ``state`` from ``t`` to ``t + dt`` by one Crank-Nicolson step."""
    layout = Layout.of(config)
    stepper = CrankNicolson(config, dt, schedule)
    psi = stepper.step_flat(layout.to_flat(state), t)
    stepper.close()
    return layout.from_flat(psi, t + dt)


@dataclass(frozen=True)
class EvolutionPlan:
    """Step ``dt`` (shrunk so an integer number of steps ends at ``t_end``)."""

    dt: float
    t_end: float
    sample_stride: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValidationError(f"dt must be > 0, got {self.dt}")
        if not self.t_end >= 0:
            raise ValidationError(f"t_end must be >= 0, got {self.t_end}")
        if int(self.sample_stride) != self.sample_stride or self.sample_stride < 1:
            raise ValidationError(f"sample_stride must be a positive integer, got {self.sample_stride}")

    @property
    def n_steps(self) -> int:
        return math.ceil(self.t_end / self.dt - 1e-9) if self.t_end > 0 else 0

    @property
    def step(self) -> float:
        return self.t_end / self.n_steps if self.n_steps else self.dt

    def check_accuracy(self, config: ChainConfig, envelope: Envelope | None = None,
                       limit: float = 0.1):
        g_max = envelope.peak_g if envelope is not None else None
        e = energy_scale(config, g_max)
        if self.step * e > limit:
            raise ValidationError(
                f"dt*E_max = {self.step * e:.3g} exceeds {limit} (E_max = {e:.4g}); reduce dt")


@dataclass
class TrajectorySummary:
    final_state: StateVector
    n_steps: int
    n_frames: int
    wall_time: float
    max_norm_drift: float
    factorizations: int
    dt: float
    seam_warnings: list[float] = field(default_factory=list)


class EvolutionAborted(RuntimeError):
    """The observer raised; carries the simulation time of the failing frame."""

    def __init__(self, time: float, cause: BaseException):
        super().__init__(f"observer failed at t={time}: {cause!r}")
        self.time = time


def evolve(state: StateVector, plan: EvolutionPlan, config: ChainConfig,
           schedule: Envelope | None = None,
           observer: Callable | None = None, threads: int = 1,
           check_accuracy: bool = True) -> TrajectorySummary:
    """Integrate from ``state.time`` over ``plan.t_end``, sampling every ``sample_stride`` steps.

    ``observer`` receives an :class:`~dressedchain.observables.ObservableFrame`
    for the initial state, every ``sample_stride``-th step and the final step.
    """
    from .observables import observe, seam_mass

    if check_accuracy:
        plan.check_accuracy(config, schedule)
    layout = Layout.of(config)
    stepper = CrankNicolson(config, plan.step, schedule, threads)
    psi = layout.to_flat(state)
    t0 = state.time
    n_steps = plan.n_steps
    drift = 0.0
    frames = 0
    seam = []
    start = _time.perf_counter()

    def emit(psi, t):
        nonlocal drift, frames
        snap = layout.from_flat(psi, t)
        drift = max(drift, abs(norm(snap) - 1.0))
        if seam_mass(snap) > 1e-4:
            seam.append(t)
        frames += 1
        if observer is not None:
            frame = observe(snap, config)
            try:
                observer(frame)
            except Exception as exc:  # noqa: BLE001 - re-raised with context
                raise EvolutionAborted(t, exc) from exc

    try:
        emit(psi, t0)
        for i in range(1, n_steps + 1):
            psi = stepper.step_flat(psi, t0 + (i - 1) * plan.step)
            if i % plan.sample_stride == 0 or i == n_steps:
                emit(psi, t0 + i * plan.step)
    finally:
        stepper.close()
    t_final = t0 + n_steps * plan.step
    return TrajectorySummary(layout.from_flat(psi, t_final), n_steps, frames,
                             _time.perf_counter() - start, drift, stepper.factorizations,
                             plan.step, seam)
