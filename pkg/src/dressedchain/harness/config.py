"""Experiment configuration files.

Configs are INI files read with :mod:`configparser`.  Sections::

    [meta]           schema_version (required, = 1), figure, checks
    [chain]          n_sites, omega_b, t_a | t_a_over_omega_b, t_b | t_b_over_omega_b (default 0),
                     g0 | rabi_frequency [+ rabi_photons], delta_eps, n_max, phi0
    [initial_state]  kind = coherent | vacuum | fock | entangled | dressed, plus the
                     parameters of that kind (see ``STATE_KEYS``)
    [evolution]      t_end | t_end_bloch, dt (optional), sample_stride
    [envelope]       shape, peak_g, center | center_bloch, width | width_bloch,
                     start | start_bloch, duration | duration_bloch   (optional)
    [outputs]        observables (comma list), directory

Keys ending in ``_bloch`` are in Bloch periods.  ``rabi_frequency`` is the
photon-number-dependent Rabi frequency ``2 g0 sqrt(n + 1)`` at ``n =
rabi_photons``, which defaults to the photon number of the initial state.
Every problem found is reported, each prefixed with its ``section.key`` path.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..dynamics import EvolutionPlan, default_dt
from ..model import ChainConfig, StateVector, ValidationError, default_n_max
from ..pulse import SHAPES, Envelope
from ..states import (GaussianSpec, coherent_product_state, dressed_eigenstate,
                      entangled_fock_state, fock_product_state, vacuum_product_state)

SCHEMA_VERSION = 1
OBSERVABLES = ("inversion", "current", "photon_dist", "mean_n", "var_n", "entropy", "center")

_PACKET = {"u_a": float, "sigma_a": float, "k_a": float, "a0": float,
           "u_b": float, "sigma_b": float, "k_b": float, "b0": float}
STATE_KEYS = {
    "coherent": {"mean_photons": float, **_PACKET},
    "vacuum": dict(_PACKET),
    "fock": {"n": int, **_PACKET},
    "entangled": {"n": int, "u": float, "sigma": float, "phase": int},
    "dressed": {"n": int, "branch": int, "phi": float, "u": float, "sigma": float},
}
_STATE_REQUIRED = {
    "coherent": ("mean_photons",),
    "vacuum": (),
    "fock": ("n",),
    "entangled": ("n", "u", "sigma"),
    "dressed": ("n", "branch"),
}


class ConfigError(ValidationError):
    """All problems found in one config file."""

    def __init__(self, errors: list[str], source: str = "<config>"):
        self.errors = list(errors)
        self.source = source
        super().__init__(f"{source}: " + "; ".join(self.errors))


@dataclass(frozen=True)
class InitialStateSpec:
    kind: str
    params: dict

    @property
    def photon_number(self) -> float:
        if self.kind == "coherent":
            return self.params["mean_photons"]
        return self.params.get("n", 0)


@dataclass(frozen=True)
class OutputSpec:
    observables: tuple[str, ...] = OBSERVABLES
    directory: str | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    chain: ChainConfig
    initial_state: InitialStateSpec
    plan: EvolutionPlan
    envelope: Envelope | None = None
    outputs: OutputSpec = OutputSpec()
    figure: str = ""
    checks: str = ""
    rabi_photons: float = 0.0
    source: dict = field(default_factory=dict, compare=False)

    @property
    def rabi_frequency(self) -> float:
        return 2 * self.chain.g0 * math.sqrt(self.rabi_photons + 1)

    def build_state(self) -> StateVector:
        return build_initial_state(self.initial_state, self.chain)

    def echo(self) -> dict:
        """Parameters in the vocabulary of the input (ratios to ``omega_b`` where defined)."""
        c = self.chain
        out = {"name": self.name, "figure": self.figure, "n_sites": c.n_sites,
               "t_a": _num(c.t_a), "t_b": _num(c.t_b), "g0": c.g0,
               "rabi_frequency": self.rabi_frequency, "rabi_photons": self.rabi_photons,
               "omega_b": c.omega_b, "delta_eps": c.delta_eps, "n_max": c.n_max, "phi0": c.phi0}
        if c.omega_b > 0:
            out["t_a_over_omega_b"] = _num(c.t_a) / c.omega_b
            out["t_b_over_omega_b"] = _num(c.t_b) / c.omega_b
            out["bloch_period"] = c.bloch_period
        out["initial_state"] = {"kind": self.initial_state.kind, **self.initial_state.params}
        out["evolution"] = {"dt": self.plan.step, "t_end": self.plan.t_end,
                            "n_steps": self.plan.n_steps, "sample_stride": self.plan.sample_stride}
        if self.envelope is not None:
            e = self.envelope
            out["envelope"] = {"shape": e.shape, "peak_g": e.peak_g, "center": e.center,
                               "width": e.width, "start": e.start, "duration": e.duration}
        out["observables"] = list(self.outputs.observables)
        return out

    def run_hash(self) -> str:
        """Git blob hash of the canonical echo: equal configs give equal hashes."""
        body = json.dumps(self.echo(), sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha1(b"blob %d\0" % len(body) + body).hexdigest()


def _num(x):
    return float(x.real) if isinstance(x, complex) and x.imag == 0 else x


class _Reader:
    """Typed access to a parsed file that records problems instead of raising."""

    def __init__(self, parser: configparser.ConfigParser):
        self.parser = parser
        self.errors: list[str] = []

    def has(self, section: str, key: str) -> bool:
        return self.parser.has_option(section, key)

    def get(self, section: str, key: str, kind=float, default=None, required=False):
        if not self.has(section, key):
            if required:
                self.errors.append(f"{section}.{key}: missing")
            return default
        raw = self.parser.get(section, key).strip()
        try:
            if kind is int:
                val = float(raw)
                if val != int(val):
                    raise ValueError
                return int(val)
            if kind is float:
                val = float(raw)
                if not math.isfinite(val):
                    raise ValueError
                return val
            return raw
        except ValueError:
            self.errors.append(f"{section}.{key}: expected {kind.__name__}, got {raw!r}")
            return default

    def one_of(self, section: str, plain: str, alt: str, kind=float, required=True):
        """Value given under exactly one of two alternative keys; returns (key, value)."""
        both = self.has(section, plain) and self.has(section, alt)
        if both:
            self.errors.append(f"{section}.{plain}: give either {plain} or {alt}, not both")
        for key in (plain, alt):
            if self.has(section, key):
                return key, self.get(section, key, kind)
        if required:
            self.errors.append(f"{section}.{plain}: missing (or give {alt})")
        return None, None

    def check(self, ok: bool, path: str, message: str):
        if not ok:
            self.errors.append(f"{path}: {message}")

    def unknown(self, section: str, allowed):
        if not self.parser.has_section(section):
            return
        for key in self.parser.options(section):
            if key not in allowed:
                self.errors.append(f"{section}.{key}: unknown key")


def parse_config(path) -> ExperimentConfig:
    """Read and validate an experiment config; raises :class:`ConfigError` listing every problem."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"cannot read file: {exc.strerror}"], str(path)) from exc
    return parse_config_text(text, name=path.stem, source=str(path))


def parse_config_text(text: str, name: str = "experiment", source: str = "<config>") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError([f"syntax: {exc}"], source) from exc
    r = _Reader(parser)

    version = r.get("meta", "schema_version", int)
    if version is None:
        raise ConfigError(["meta.schema_version: missing; this reader expects "
                           f"schema_version = {SCHEMA_VERSION}"], source)
    if version != SCHEMA_VERSION:
        raise ConfigError([f"meta.schema_version: unsupported version {version} "
                           f"(expected {SCHEMA_VERSION})"], source)
    for sec in ("chain", "initial_state", "evolution"):
        if not parser.has_section(sec):
            r.errors.append(f"{sec}: missing section")
    r.unknown("meta", {"schema_version", "figure", "checks"})
    known = {"meta", "chain", "initial_state", "evolution", "envelope", "outputs"}
    for sec in parser.sections():
        if sec not in known:
            r.errors.append(f"{sec}: unknown section")

    state = _read_state(r)
    chain, rabi_photons = _read_chain(r, state)
    envelope = _read_envelope(r, chain)
    plan = _read_plan(r, chain, envelope)
    outputs = _read_outputs(r)

    if r.errors:
        raise ConfigError(r.errors, source)
    cfg = ExperimentConfig(name=name, chain=chain, initial_state=state, plan=plan,
                           envelope=envelope, outputs=outputs,
                           figure=parser.get("meta", "figure", fallback=""),
                           checks=" ".join(parser.get("meta", "checks", fallback="").split()),
                           rabi_photons=rabi_photons, source={"path": source})
    try:
        build_initial_state(cfg.initial_state, cfg.chain, dry_run=True)
    except ValidationError as exc:
        raise ConfigError([f"initial_state: {exc}"], source) from exc
    return cfg


def _read_state(r: _Reader) -> InitialStateSpec | None:
    sec = "initial_state"
    if not r.parser.has_section(sec):
        return None
    kind = r.get(sec, "kind", str, required=True)
    if kind is None:
        return None
    if kind not in STATE_KEYS:
        r.errors.append(f"{sec}.kind: must be one of {sorted(STATE_KEYS)}, got {kind!r}")
        return None
    keys = STATE_KEYS[kind]
    r.unknown(sec, set(keys) | {"kind"})
    params = {}
    for key, typ in keys.items():
        val = r.get(sec, key, typ, required=key in _STATE_REQUIRED[kind])
        if val is not None:
            params[key] = val
    for key in ("sigma", "sigma_a", "sigma_b"):
        if key in params:
            r.check(params[key] > 0, f"{sec}.{key}", f"must be > 0, got {params[key]}")
    if "n" in params:
        r.check(params["n"] >= 0, f"{sec}.n", f"must be >= 0, got {params['n']}")
    if "mean_photons" in params:
        r.check(params["mean_photons"] >= 0, f"{sec}.mean_photons", "must be >= 0")
    if kind == "entangled":
        params.setdefault("phase", 1)
        r.check(params["phase"] in (1, -1), f"{sec}.phase", "must be +1 or -1")
    if kind == "dressed":
        params.setdefault("phi", 0.0)
        r.check(params["branch"] in (1, 2) if "branch" in params else True,
                f"{sec}.branch", "must be 1 or 2")
        r.check(("u" in params) == ("sigma" in params), f"{sec}.u",
                "u and sigma go together (omit both for a plane wave)")
    if kind in ("coherent", "vacuum", "fock"):
        params.setdefault("a0", 1.0)
        params.setdefault("b0", 0.0)
        for band in ("a", "b"):
            w = params[f"{band}0"]
            if w != 0:
                for key in (f"u_{band}", f"sigma_{band}"):
                    r.check(key in params, f"{sec}.{key}", f"missing (needed because {band}0 != 0)")
            params.setdefault(f"k_{band}", 0.0)
        r.check(params["a0"] != 0 or params["b0"] != 0, f"{sec}.a0", "a0 and b0 are both zero")
    return InitialStateSpec(kind, params)


def _read_chain(r: _Reader, state: InitialStateSpec | None):
    sec = "chain"
    r.unknown(sec, {"n_sites", "omega_b", "t_a", "t_a_over_omega_b", "t_b", "t_b_over_omega_b",
                    "g0", "rabi_frequency", "rabi_photons", "delta_eps", "n_max", "phi0"})
    n_sites = r.get(sec, "n_sites", int, required=True)
    omega_b = r.get(sec, "omega_b", float, default=0.0)
    tun = {}
    for band in ("t_a", "t_b"):
        key, val = r.one_of(sec, band, f"{band}_over_omega_b", required=False)
        if key is None:
            val = 0.0
        elif key is not None and key.endswith("_over_omega_b") and val is not None:
            r.check(omega_b > 0, f"{sec}.{key}", "needs omega_b > 0")
            val = val * omega_b
        tun[band] = val
    photons = state.photon_number if state is not None else 0.0
    rabi_photons = r.get(sec, "rabi_photons", float, default=photons)
    key, val = r.one_of(sec, "g0", "rabi_frequency")
    g0 = val
    if key == "rabi_frequency" and val is not None and rabi_photons is not None:
        r.check(rabi_photons >= 0, f"{sec}.rabi_photons", "must be >= 0")
        g0 = val / (2 * math.sqrt(max(rabi_photons, 0.0) + 1))
    n_max = r.get(sec, "n_max", int)
    if n_max is None and state is not None:
        if state.kind == "coherent":
            n_max = default_n_max(state.params.get("mean_photons", 0.0))
        else:
            n_max = state.params.get("n", 0) + 1
    fields = dict(n_sites=n_sites, t_a=tun["t_a"], t_b=tun["t_b"], g0=g0, omega_b=omega_b,
                  delta_eps=r.get(sec, "delta_eps", float, default=0.0),
                  n_max=n_max, phi0=r.get(sec, "phi0", float, default=0.0))
    if any(v is None for v in fields.values()):
        return None, rabi_photons
    try:
        return ChainConfig(**fields), rabi_photons
    except ValidationError as exc:
        for msg in str(exc).split("; "):
            r.errors.append(f"{sec}.{msg.split()[0]}: {msg}")
        return None, rabi_photons


def _time_key(r: _Reader, sec: str, key: str, chain: ChainConfig | None, required=False):
    """Read ``key`` or ``key_bloch`` (Bloch periods) and return the value in 1/omega_0 units."""
    which, val = r.one_of(sec, key, f"{key}_bloch", required=required)
    if which is None or val is None:
        return None
    if which.endswith("_bloch"):
        if chain is None:
            return None
        if not chain.omega_b > 0:
            r.errors.append(f"{sec}.{which}: Bloch-period units need omega_b > 0")
            return None
        return val * chain.bloch_period
    return val


def _read_envelope(r: _Reader, chain: ChainConfig | None) -> Envelope | None:
    sec = "envelope"
    if not r.parser.has_section(sec):
        return None
    r.unknown(sec, {"shape", "peak_g", "center", "center_bloch", "width", "width_bloch",
                    "start", "start_bloch", "duration", "duration_bloch"})
    shape = r.get(sec, "shape", str, required=True)
    if shape is not None and shape not in SHAPES:
        r.errors.append(f"{sec}.shape: must be one of {SHAPES}, got {shape!r}")
        return None
    peak = r.get(sec, "peak_g", float, default=chain.g0 if chain is not None else None)
    kw = {}
    if shape == "gaussian":
        kw["center"] = _time_key(r, sec, "center", chain, required=True)
        kw["width"] = _time_key(r, sec, "width", chain, required=True)
        if kw["width"] is not None:
            r.check(kw["width"] > 0, f"{sec}.width", "must be > 0")
    elif shape == "raised_cosine":
        kw["start"] = _time_key(r, sec, "start", chain, required=True)
        kw["duration"] = _time_key(r, sec, "duration", chain, required=True)
        if kw["duration"] is not None:
            r.check(kw["duration"] > 0, f"{sec}.duration", "must be > 0")
    if peak is not None:
        r.check(peak >= 0, f"{sec}.peak_g", "must be >= 0")
    if shape is None or peak is None or any(v is None for v in kw.values()) or r.errors:
        return None
    return Envelope(shape, peak, **kw)


def _read_plan(r: _Reader, chain: ChainConfig | None, envelope: Envelope | None):
    sec = "evolution"
    r.unknown(sec, {"t_end", "t_end_bloch", "dt", "sample_stride"})
    t_end = _time_key(r, sec, "t_end", chain, required=True)
    dt = r.get(sec, "dt", float)
    stride = r.get(sec, "sample_stride", int, default=1)
    if t_end is not None:
        r.check(t_end >= 0, f"{sec}.t_end", f"must be >= 0, got {t_end}")
    if dt is not None:
        r.check(dt > 0, f"{sec}.dt", f"must be > 0, got {dt}")
    r.check(stride >= 1, f"{sec}.sample_stride", f"must be >= 1, got {stride}")
    if chain is None or t_end is None or r.errors:
        return None
    if dt is None:
        dt = default_dt(chain, envelope.peak_g if envelope is not None else None)
    plan = EvolutionPlan(dt, t_end, stride)
    try:
        plan.check_accuracy(chain, envelope)
    except ValidationError as exc:
        r.errors.append(f"{sec}.dt: {exc}")
    return plan


def _read_outputs(r: _Reader) -> OutputSpec:
    sec = "outputs"
    r.unknown(sec, {"observables", "directory"})
    raw = r.get(sec, "observables", str)
    obs = OBSERVABLES
    if raw:
        obs = tuple(x.strip() for x in raw.split(",") if x.strip())
        bad = [x for x in obs if x not in OBSERVABLES]
        r.check(not bad, f"{sec}.observables", f"unknown {bad}; choose from {list(OBSERVABLES)}")
    return OutputSpec(obs, r.get(sec, "directory", str))


def build_initial_state(spec: InitialStateSpec, chain: ChainConfig,
                        dry_run: bool = False) -> StateVector | None:
    """Construct the initial state; with ``dry_run`` only the cheap validity checks run."""
    p = spec.params
    kind = spec.kind
    if kind in ("coherent", "vacuum", "fock"):
        packets = []
        for band in ("a", "b"):
            w = p[f"{band}0"]
            if w == 0:
                packets.append(GaussianSpec(0.0, 1.0, 0.0, 0.0))
            else:
                packets.append(GaussianSpec(p[f"u_{band}"], p[f"sigma_{band}"], p[f"k_{band}"], w))
                if not 0 <= p[f"u_{band}"] < chain.n_sites:
                    raise ValidationError(f"u_{band}={p[f'u_{band}']} outside [0, {chain.n_sites})")
        if kind == "fock" and not p["n"] <= chain.n_max:
            raise ValidationError(f"Fock level {p['n']} exceeds n_max={chain.n_max}")
        if dry_run:
            return None
        if kind == "coherent":
            return coherent_product_state(*packets, p["mean_photons"], chain)
        if kind == "vacuum":
            return vacuum_product_state(*packets, chain)
        return fock_product_state(*packets, p["n"], chain)
    if "u" in p and not 0 <= p["u"] < chain.n_sites:
        raise ValidationError(f"u={p['u']} outside [0, {chain.n_sites})")
    if p["n"] + 1 > chain.n_max:
        raise ValidationError(f"photon level {p['n'] + 1} exceeds n_max={chain.n_max}")
    if dry_run:
        return None
    if kind == "entangled":
        return entangled_fock_state(p["n"], p["u"], p["sigma"], p["phase"], chain)
    packet = GaussianSpec(p["u"], p["sigma"]) if "u" in p else None
    return dressed_eigenstate(p["n"], p["branch"], p["phi"], chain, packet)
