"""Stand-alone matplotlib scripts for an output bundle.

The scripts are written next to the data and read it at run time, so this
module itself needs no plotting library.
"""
from __future__ import annotations

import json
from pathlib import Path

from ..model import ValidationError

_HEADER = '''"""Generated by dressedchain plot; run with python3 in this directory."""
import json
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = Path(__file__).resolve().parent
META = json.loads((HERE / "meta.json").read_text()) if (HERE / "meta.json").exists() else {}
T_B = META.get("config", {}).get("bloch_period")
'''

_SCALARS = _HEADER + '''
frames = np.genfromtxt(HERE / "frames.csv", delimiter=",", names=True)
t = frames["time_bloch"] if "time_bloch" in frames.dtype.names else frames["time"]
xlabel = "t / T_B" if "time_bloch" in frames.dtype.names else "t (1/omega_0)"
analytic = None
if (HERE / "analytic.csv").exists():
    analytic = np.genfromtxt(HERE / "analytic.csv", delimiter=",", names=True)
    t_an = analytic["time"] / T_B if T_B else analytic["time"]

fig, axes = plt.subplots(4, 1, figsize=(8, 10), sharex=True)
for ax, col, label in zip(axes, ("mean_n", "var_n", "entropy", "total_inversion"),
                          ("<n>", "variance of n", "entropy S", "total inversion")):
    ax.plot(t, frames[col], lw=0.8, label="numeric")
    if analytic is not None and col in analytic.dtype.names:
        ax.plot(t_an, analytic[col], "--", lw=1.2, label="dressed-band formula")
        ax.legend(loc="best")
    ax.set_ylabel(label)
axes[-1].set_xlabel(xlabel)
fig.tight_layout()
fig.savefig(HERE / "scalars.png", dpi=150)
'''

_HEATMAP = _HEADER + '''
raw = np.loadtxt(HERE / "@CSV@", delimiter=",", skiprows=1, ndmin=2)
t, values = raw[:, 0], raw[:, 1:]
if T_B:
    t, ylabel = t / T_B, "t / T_B"
else:
    ylabel = "t (1/omega_0)"
n_sites = values.shape[1]
fig, ax = plt.subplots(figsize=(8, 6))
lim = np.max(np.abs(values)) or 1.0
top = t[-1] if t.size > 1 else t[0] + 1.0
mesh = ax.imshow(values, origin="lower", aspect="auto", cmap="RdBu_r", vmin=-lim, vmax=lim,
                 extent=(-0.5, n_sites - 0.5, t[0], top), interpolation="nearest")
ax.set_xlabel("site p")
ax.set_ylabel(ylabel)
fig.colorbar(mesh, ax=ax, label="@LABEL@")
fig.tight_layout()
fig.savefig(HERE / "@PNG@", dpi=150)
'''

_MAPS = (("inversion.csv", "plot_inversion.py", "inversion.png", "inversion density W"),
         ("current.csv", "plot_current.py", "current.png", "current density J"))


def emit_plots(directory) -> list[Path]:
    """Write plot scripts for every data file present; returns the script paths.

    ``frames.csv`` is required.  Heat-map scripts are written only for the
    site-resolved files that exist; an ``analytic.csv`` adds overlay curves.
    """
    d = Path(directory)
    if not d.is_dir():
        raise ValidationError(f"bundle directory not found: {d}")
    if not (d / "frames.csv").exists():
        raise ValidationError(f"missing file: {d / 'frames.csv'}")
    if (d / "meta.json").exists():
        try:
            json.loads((d / "meta.json").read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"unreadable {d / 'meta.json'}: {exc}") from exc
    written = [d / "plot_scalars.py"]
    written[0].write_text(_SCALARS)
    for csv, script, png, label in _MAPS:
        if (d / csv).exists():
            path = d / script
            path.write_text(_HEATMAP.replace("@CSV@", csv).replace("@PNG@", png).replace("@LABEL@", label))
            written.append(path)
    return written
