"""Command-line entry point ``dressedchain``.

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from pathlib import Path

from ..device import JosephsonParams, heterostructure_to_chain, josephson_to_chain
from ..dynamics import EvolutionAborted
from ..model import NumericError, ValidationError
from .config import ConfigError, parse_config
from .plots import emit_plots
from .runner import read_frames, run, uniform_prefix
from .spectrum import spectrum

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2

_JJ_KEYS = ("E_J", "E_C", "L_1", "L_2", "L_r", "Z_r", "phi_eg", "R_0")
_HS_KEYS = ("transition_freq", "dipole", "field_amplitude", "dc_field", "period",
            "coherence_time", "tunneling")


def _cmd_validate(args) -> int:
    cfg = parse_config(args.config)
    print(json.dumps(cfg.echo(), indent=2))
    if cfg.envelope is not None and not cfg.envelope.is_constant and not cfg.envelope.is_slow():
        print(f"warning: envelope timescale {cfg.envelope.timescale():.4g} is under ten carrier "
              "periods; the rotating-wave treatment is doubtful", file=sys.stderr)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = parse_config(args.config)
    res = run(cfg, args.out, threads=args.threads)
    m = res.meta
    print(f"{cfg.name}: {m['n_steps']} steps, dt={m['dt']:.6g}, {m['n_frames']} frames, "
          f"max |norm-1|={m['max_norm_drift']:.3g}, {m['wall_time_s']:.1f} s -> {res.directory}")
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    cols = read_frames(args.frames)
    if args.column not in cols:
        raise ValidationError(f"column {args.column!r} not in {sorted(cols)}")
    t = cols["time"]
    k = uniform_prefix(t)
    if k < t.size:
        print(f"note: using the {k} uniformly spaced samples of {t.size}", file=sys.stderr)
    if k < 2:
        raise ValidationError("need at least two samples")
    res = spectrum(cols[args.column][:k], float(t[1] - t[0]))
    print(f"bin width {res.bin_width:.6g} (angular)")
    print("frequency,power")
    for f, p in res.detected_peaks:
        print(f"{f:.10g},{p:.10g}")
    return EXIT_OK


def _cmd_plot(args) -> int:
    for path in emit_plots(args.directory):
        print(path)
    return EXIT_OK


def _read_params(path: Path, section: str, keys) -> tuple[dict, dict]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    if not parser.read(path):
        raise ValidationError(f"cannot read {path}")
    if not parser.has_section(section):
        raise ValidationError(f"{path}: missing [{section}] section")
    values, errors = {}, []
    for key, raw in parser.items(section):
        if key not in keys:
            errors.append(f"{section}.{key}: unknown key")
            continue
        try:
            parts = [float(x) for x in raw.replace(",", " ").split()]
        except ValueError:
            errors.append(f"{section}.{key}: not a number: {raw!r}")
            continue
        values[key] = parts[0] if len(parts) == 1 else tuple(parts)
    if errors:
        raise ValidationError("; ".join(errors))
    quoted = {k: float(v) for k, v in parser.items("quoted")} if parser.has_section("quoted") else {}
    return values, quoted


def _cmd_device(args) -> int:
    path = Path(args.params)
    if args.kind == "josephson":
        values, quoted = _read_params(path, "josephson", _JJ_KEYS)
        missing = [k for k in ("E_J", "E_C", "L_1", "L_2", "L_r", "Z_r") if k not in values]
        if missing:
            raise ValidationError(f"josephson: missing {missing}")
        mapping = josephson_to_chain(JosephsonParams(**values, quoted=quoted))
    else:
        values, _ = _read_params(path, "heterostructure", _HS_KEYS)
        missing = [k for k in ("transition_freq", "dipole", "field_amplitude", "dc_field", "period")
                   if k not in values]
        if missing:
            raise ValidationError(f"heterostructure: missing {missing}")
        mapping = heterostructure_to_chain(**values)
    print(mapping.text())
    if args.json:
        Path(args.json).write_text(json.dumps({"fragment": mapping.fragment, "report": mapping.report},
                                              indent=2, default=str) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dressedchain",
                                 description="Bloch oscillations of a light-dressed two-level chain.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a config and write its output bundle")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (default: outputs.directory or runs/<name>)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for the sector solves")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("validate", help="parse a config and echo the resolved parameters")
    p.add_argument("config")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("spectrum", help="power spectrum peaks of a frames.csv column")
    p.add_argument("frames")
    p.add_argument("--column", default="mean_n")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("plot", help="write matplotlib scripts into a bundle directory")
    p.add_argument("directory")
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("device", help="map physical device parameters onto chain parameters")
    p.add_argument("kind", choices=("josephson", "heterostructure"))
    p.add_argument("params", help="INI file with a [josephson] or [heterostructure] section")
    p.add_argument("--json", help="also write fragment and report as JSON to this path")
    p.set_defaults(func=_cmd_device)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid config {exc.source}:", file=sys.stderr)
        for err in exc.errors:
            print(f"  {err}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericError, EvolutionAborted) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
