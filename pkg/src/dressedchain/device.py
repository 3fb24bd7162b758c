"""Physical device parameters -> dimensionless chain parameters.

Two device families are supported: a Josephson junction in an inductive
environment coupled to a microwave resonator (quasicharge Bloch bands), and a
semiconductor superlattice / quantum-dot chain driven through an intersubband
or interband transition.  Frequencies in the returned fragments are
normalized to the transition frequency.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import constants as C

from .model import ValidationError

E = C.e
HBAR = C.hbar
H = C.h
RESISTANCE_QUANTUM = H / (2 * E) ** 2


def josephson_bandwidth(E_J: float, E_C: float) -> float:
    """Lowest-band width ``16 sqrt(E_C E_J / pi) (E_J / 2E_C)^(1/4) exp(-sqrt(8 E_J / E_C))``.

    Homogeneous of degree one, so any energy unit works (the result is in the
    same unit).
    """
    if not (E_J > 0 and E_C > 0):
        raise ValidationError(f"E_J and E_C must be positive, got {E_J}, {E_C}")
    return 16.0 * math.sqrt(E_C * E_J / math.pi) * (E_J / (2 * E_C)) ** 0.25 \
        * math.exp(-math.sqrt(8 * E_J / E_C))


@dataclass(frozen=True)
class JosephsonParams:
    """Junction and resonator parameters.

    ``E_J`` and ``E_C`` are given as frequencies ``E / h`` in Hz; inductances
    in henry, impedances in ohm.  ``quoted`` optionally carries reference
    numbers (e.g. from a data sheet) that the report sets beside the formula
    values; recognised keys are ``plasma_frequency_hz`` and ``bandwidth_hz``.
    """

    E_J: float
    E_C: float
    L_1: float
    L_2: float
    L_r: float
    Z_r: float
    phi_eg: float = 1.0
    R_0: float = RESISTANCE_QUANTUM
    quoted: dict = field(default_factory=dict)

    def flags(self) -> list[str]:
        out = []
        if self.E_J / self.E_C < 10:
            out.append(f"E_J/E_C = {self.E_J / self.E_C:.3g} < 10: not in the E_J >> E_C regime")
        if self.L_1 > 0 and self.L_2 / self.L_1 < 100:
            out.append(f"L_2/L_1 = {self.L_2 / self.L_1:.3g} < 100: L_2 >> L_1 not satisfied")
        return out


@dataclass
class DeviceMapping:
    fragment: dict
    report: dict

    def text(self) -> str:
        lines = ["chain fragment:"]
        lines += [f"  {k} = {v:.10g}" for k, v in self.fragment.items()]
        lines.append("report:")
        for k, v in self.report.items():
            if isinstance(v, list):
                lines.append(f"  {k}:")
                lines += [f"    - {x}" for x in v] or ["    (none)"]
            elif isinstance(v, dict):
                lines.append(f"  {k}:")
                lines += [f"    {kk} = {vv}" for kk, vv in v.items()]
            else:
                lines.append(f"  {k} = {v}")
        return "\n".join(lines)


def josephson_to_chain(params: JosephsonParams, rwa_limit: float = 0.1) -> DeviceMapping:
    """Map a junction-resonator circuit onto chain parameters.

    The plasma frequency ``sqrt(8 E_J E_C) / hbar`` plays the transition
    frequency, the band width fixes ``2 t``, the dual plasma frequency
    ``pi sqrt(Delta_0 L_2) / e`` (evaluated in SI exactly as written, so its
    unit is only nominally rad/s) plays the Bloch frequency, and the coupling
    is ``(|phi_eg|^2 / sqrt 2) sqrt(R_0 / 2 pi Z_r) (L_1 / L_2) omega_p``.
    """
    for name in ("E_J", "E_C", "L_2", "L_r", "Z_r", "R_0"):
        if not getattr(params, name) > 0:
            raise ValidationError(f"{name} must be positive")
    if params.L_1 < 0:
        raise ValidationError("L_1 must be >= 0")
    f_p = math.sqrt(8 * params.E_J * params.E_C)          # Hz
    omega_p = 2 * math.pi * f_p                            # rad/s
    delta0 = josephson_bandwidth(params.E_J, params.E_C)   # Hz
    t = delta0 / 2 / f_p                                   # units of hbar omega_p
    omega_c = math.pi * math.sqrt(H * delta0 * params.L_2) / E
    g = (abs(params.phi_eg) ** 2 / math.sqrt(2)) * math.sqrt(params.R_0 / (2 * math.pi * params.Z_r)) \
        * (params.L_1 / params.L_2) * omega_p
    e_lr = (HBAR / (2 * E)) ** 2 / params.L_r
    checks = params.flags()
    if g / omega_p > rwa_limit:
        checks.append(f"g/omega_p = {g / omega_p:.3g} > {rwa_limit}: rotating-wave approximation doubtful")
    if e_lr >= HBAR * omega_p:
        checks.append(f"E_Lr/(hbar omega_p) = {e_lr / (HBAR * omega_p):.3g} >= 1")
    fragment = {"t_a": t, "t_b": t, "g0": g / omega_p, "omega_b": omega_c / omega_p}
    report = {
        "plasma_frequency_hz": f_p,
        "bandwidth_hz": delta0,
        "dual_plasma_frequency_as_written": omega_c,
        "coupling_rad_s": g,
        "ratios": {"g/omega0": g / omega_p, "omega_B/omega0": omega_c / omega_p,
                   "t/hbar_omega0": t},
        "validity": checks,
    }
    if params.quoted:
        formula = {"plasma_frequency_hz": f_p, "bandwidth_hz": delta0}
        report["quoted_vs_formula"] = {
            k: f"quoted {v:.6g}, formula {formula[k]:.6g}, ratio {v / formula[k]:.4g}"
            for k, v in params.quoted.items() if k in formula
        }
    return DeviceMapping(fragment, report)


def heterostructure_to_chain(transition_freq: float, dipole: float, field_amplitude,
                             dc_field: float, period: float, coherence_time: float | None = None,
                             tunneling: float = 0.0) -> DeviceMapping:
    """Map a driven superlattice (or quantum-dot chain) onto chain parameters.

    Parameters
    ----------
    transition_freq : float
        Transition frequency in THz (cycles per second / 1e12).
    dipole : float
        Transition dipole length ``|d| / e`` in nm.
    field_amplitude : float or (float, float)
        Peak optical field amplitude in kV/cm; a range yields one coupling per end.
    dc_field : float
        Static field in kV/cm.
    period : float
        Lattice period in nm.
    coherence_time : float, optional
        Dephasing time in fs, compared against the Rabi and Bloch periods.
    tunneling : float
        Miniband tunneling energy in meV (applied to both bands).
    """
    amps = tuple(field_amplitude) if isinstance(field_amplitude, (tuple, list)) else (field_amplitude,)
    for name, val in (("transition_freq", transition_freq), ("dipole", dipole), ("period", period)):
        if not val > 0:
            raise ValidationError(f"{name} must be positive, got {val}")
    if dc_field < 0 or any(a < 0 for a in amps):
        raise ValidationError("field strengths must be >= 0")
    omega0 = 2 * math.pi * transition_freq * 1e12
    omega_b = E * dc_field * 1e5 * period * 1e-9 / HBAR
    gs = [E * dipole * 1e-9 * a * 1e5 / HBAR for a in amps]
    t = tunneling * 1e-3 * E / (HBAR * omega0)
    fragment = {"t_a": t, "t_b": t, "g0": gs[-1] / omega0, "omega_b": omega_b / omega0}
    if len(gs) > 1:
        fragment["g0_min"] = gs[0] / omega0
    report = {
        "transition_omega_rad_s": omega0,
        "bloch_period_s": 2 * math.pi / omega_b if omega_b > 0 else math.inf,
        "vacuum_rabi_period_s": [2 * math.pi / (2 * g) if g > 0 else math.inf for g in gs],
        "ratios": {"g/omega0": fragment["g0"], "omega_B/omega0": fragment["omega_b"],
                   "t/hbar_omega0": t},
        "validity": [],
    }
    if coherence_time is not None:
        report["validity"] += coherence_flags(coherence_time * 1e-15, omega0,
                                              rabi=2 * fragment["g0"], omega_b=fragment["omega_b"])
    return DeviceMapping(fragment, report)


def coherence_flags(coherence_s: float, omega0: float, rabi: float, omega_b: float) -> list[str]:
    """Compare a dephasing time with the Rabi period ``2 pi / rabi`` and Bloch period.

    ``rabi`` and ``omega_b`` are normalized to ``omega0`` (rad/s).
    """
    out = []
    for name, w in (("Rabi", rabi), ("Bloch", omega_b)):
        if w <= 0:
            continue
        period = 2 * math.pi / (w * omega0)
        ratio = coherence_s / period
        verdict = "ok" if ratio >= 1 else "marginal"
        out.append(f"{name} period {period:.4g} s vs coherence {coherence_s:.4g} s "
                   f"(ratio {ratio:.3g}): {verdict}")
    return out


def heterostructure_to_physical(fragment: dict, transition_freq: float, dipole: float,
                                period: float) -> dict:
    """Invert :func:`heterostructure_to_chain` for the field strengths (kV/cm) and tunneling (meV)."""
    omega0 = 2 * math.pi * transition_freq * 1e12
    return {
        "dc_field": fragment["omega_b"] * omega0 * HBAR / (E * period * 1e-9) / 1e5,
        "field_amplitude": fragment["g0"] * omega0 * HBAR / (E * dipole * 1e-9) / 1e5,
        "tunneling": fragment["t_a"] * HBAR * omega0 / E * 1e3,
    }


def bloch_period_seconds(omega_b_normalized: float, transition_freq: float) -> float:
    """Bloch period in seconds for a normalized Bloch frequency and a transition in THz."""
    return 2 * math.pi / (omega_b_normalized * 2 * math.pi * transition_freq * 1e12)
