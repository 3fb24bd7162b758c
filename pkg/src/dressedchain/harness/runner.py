"""Run an experiment config and write its output bundle.

Bundle layout (one directory per run)::

    frames.csv     time[, time_bloch], total_inversion, mean_n, var_n, entropy, center, norm
    inversion.csv  time, W(p=0) ... W(p=N-1)
    current.csv    time, J(p=0) ... J(p=N-1)
    photons.csv    time, P(n=0) ... P(n=n_max)
    analytic.csv   dressed-state runs only: adiabatic photon statistics on the frame times
    meta.json      config echo, run hash, step statistics, wall time, norm drift

Data files carry no timestamps and use a fixed 17-digit format, so equal
configs give byte-identical CSVs.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import __version__
from ..analytic import analytic_photon_stats
from ..dynamics import TrajectorySummary, evolve
from ..model import ValidationError
from .config import ExperimentConfig

log = logging.getLogger(__name__)

FMT = "%.16e"
SCALAR_COLUMNS = ("total_inversion", "mean_n", "var_n", "entropy", "center", "norm")
_MATRIX_FILES = {"inversion": "inversion.csv", "current": "current.csv", "photon_dist": "photons.csv"}


@dataclass
class RunResult:
    directory: Path
    summary: TrajectorySummary
    meta: dict


def _row(values) -> str:
    return ",".join(FMT % v for v in values) + "\n"


class _BundleWriter:
    def __init__(self, directory: Path, config: ExperimentConfig):
        self.config = config
        self.bloch = config.chain.omega_b > 0
        self.files = {}
        self.times = []
        head = ["time"] + (["time_bloch"] if self.bloch else []) + list(SCALAR_COLUMNS)
        self.files["frames"] = open(directory / "frames.csv", "w", newline="\n")
        self.files["frames"].write(",".join(head) + "\n")
        n_sites, n_levels = config.chain.n_sites, config.chain.n_levels
        for obs, fname in _MATRIX_FILES.items():
            if obs not in config.outputs.observables:
                continue
            width, tag = (n_levels, "n") if obs == "photon_dist" else (n_sites, "p")
            f = open(directory / fname, "w", newline="\n")
            f.write(",".join(["time"] + [f"{tag}{i}" for i in range(width)]) + "\n")
            self.files[obs] = f

    def __call__(self, frame):
        t = frame.time
        self.times.append(t)
        lead = [t] + ([t / self.config.chain.bloch_period] if self.bloch else [])
        scalars = [frame.total_inversion, frame.mean_n, frame.var_n, frame.entropy,
                   frame.center, frame.norm]
        self.files["frames"].write(_row(lead + scalars))
        for obs in _MATRIX_FILES:
            if obs in self.files:
                self.files[obs].write(_row(np.concatenate(([t], getattr(frame, obs)))))

    def close(self):
        for f in self.files.values():
            f.close()


def _write_analytic(directory: Path, config: ExperimentConfig, times):
    p = config.initial_state.params
    n, branch, phi = p["n"], p["branch"], p["phi"]
    with open(directory / "analytic.csv", "w", newline="\n") as f:
        f.write("time,mean_n,var_n,entropy\n")
        for t in times:
            s = analytic_photon_stats(branch, n, t, phi, config.chain)
            f.write(_row([t, s.mean, s.variance, s.entropy]))


def run(config: ExperimentConfig, out_dir=None, threads: int = 1) -> RunResult:
    """Evolve ``config`` and write the bundle to ``out_dir``.

    ``out_dir`` defaults to ``outputs.directory`` of the config, then to
    ``runs/<config name>``.  Integrator failures propagate; a
    :class:`~dressedchain.dynamics.EvolutionAborted` carries the failing time.
    """
    directory = Path(out_dir or config.outputs.directory or Path("runs") / config.name)
    directory.mkdir(parents=True, exist_ok=True)
    state = config.build_state()
    writer = _BundleWriter(directory, config)
    try:
        summary = evolve(state, config.plan, config.chain, config.envelope,
                         observer=writer, threads=threads)
    finally:
        writer.close()
    if config.initial_state.kind == "dressed":
        if config.envelope is not None and not config.envelope.is_constant:
            log.warning("analytic overlay assumes constant coupling; skipped")
        else:
            _write_analytic(directory, config, writer.times)
    if summary.seam_warnings:
        log.warning("%s: packet mass within 5 sites of the wrap seam at %d frames (first t=%.6g); "
                    "centre and current near the seam mix both chain ends",
                    config.name, len(summary.seam_warnings), summary.seam_warnings[0])
    meta = {
        "config": config.echo(),
        "checks": config.checks,
        "run_hash": config.run_hash(),
        "version": __version__,
        "n_steps": summary.n_steps,
        "n_frames": summary.n_frames,
        "dt": summary.dt,
        "factorizations": summary.factorizations,
        "max_norm_drift": summary.max_norm_drift,
        "seam_frames": len(summary.seam_warnings),
        "wall_time_s": summary.wall_time,
        "files": sorted(p.name for p in directory.glob("*.csv")),
    }
    (directory / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return RunResult(directory, summary, meta)


def read_frames(path) -> dict[str, np.ndarray]:
    """Columns of a ``frames.csv`` (or any headed numeric CSV) by name."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"missing file: {path}")
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=float)
    data = np.atleast_1d(data)
    return {name: np.asarray(data[name]) for name in data.dtype.names}


def read_matrix(path) -> tuple[np.ndarray, np.ndarray]:
    """``(times, values)`` of a site- or level-resolved CSV."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"missing file: {path}")
    raw = np.atleast_2d(np.loadtxt(path, delimiter=",", skiprows=1))
    return raw[:, 0], raw[:, 1:]


def uniform_prefix(times: np.ndarray, rtol: float = 1e-9) -> int:
    """Length of the leading uniformly spaced run of ``times``.

    The final frame of a run lands on ``t_end`` and may follow a shorter gap.
    """
    if times.size < 3:
        return int(times.size)
    step = times[1] - times[0]
    gaps = np.diff(times)
    bad = np.nonzero(~np.isclose(gaps, step, rtol=rtol, atol=0.0))[0]
    return int(bad[0] + 1) if bad.size else int(times.size)

