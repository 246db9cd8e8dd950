"""Command-line interface.

Subcommands: ``sweep``, ``boundary``, ``fig2a``, ``fig2b``, ``spectrum`` and
``validate``.  Exit codes: 0 success, 1 validation error, 2 solver
failure(s), 3 I/O error.  The configuration file format is documented in
``docs/config.md`` and in :mod:`resetent.configio`.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .configio import config_summary, load_config
from .entanglement import MixtureSpec
from .liouvillian import CapacityError, check_lindblad
from .models import ValidationError, pairwise_ising, validate, xyz_preset
from .solver import spectral_gap, spectrum
from .sweep import boundary, fig2a_rows, fig2b_rows, parse_range, run_sweep

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("resetent")


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, int, np.integer)):
        return str(int(x))
    x = float(x)
    return "nan" if math.isnan(x) else repr(x)


def _write_csv(path, header, rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise CLIError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def _write_json(path, payload) -> None:
    try:
        Path(path).write_text(json.dumps(payload, indent=2, default=_json_default) + "\n")
    except OSError as exc:
        raise CLIError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def _json_default(x):
    if isinstance(x, float) and math.isnan(x):
        return None
    return float(x)


def _load(path):
    try:
        config = load_config(path)
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    return config


def _preflight(config) -> None:
    validate(config)
    check = check_lindblad(config)
    if not check:
        raise ValidationError("config", f"generator is not of Lindblad form (min Choi eigenvalue {check.min_choi_eigenvalue:.3g})")


def _range(text, name):
    try:
        return parse_range(text)
    except ValueError as exc:
        raise ValidationError(name, str(exc)) from exc


def cmd_sweep(args) -> int:
    config = _load(args.config)
    _preflight(config)
    g_axis = _range(args.g_range, "--g-range")
    r_axis = _range(args.r_range, "--r-range")
    rows = run_sweep(config, g_axis, r_axis, workers=args.workers, tol=args.tol)
    with_avg = config.n_qubits > 2
    header = ["g_over_gamma", "r_over_gamma", "negativity"] + (["avg_negativity"] if with_avg else [])
    header += ["residual", "wall_time_s"]
    table = []
    for row in rows:
        line = [row.g_over_gamma, row.r_over_gamma, row.negativity]
        if with_avg:
            line.append(row.avg_negativity)
        line += [row.residual, 0.0 if args.no_timing else row.wall_time_s]
        table.append(line)
    _write_csv(args.out, header, table)
    if args.json:
        _write_json(args.json, {"tool": "resetent", "version": __version__, "command": "sweep",
                                "config": config_summary(config), "header": header, "rows": table})
    failed = sum(r.failed for r in rows)
    if failed:
        log.error("%d of %d grid points failed", failed, len(rows))
        return EXIT_SOLVER
    return EXIT_OK


def cmd_boundary(args) -> int:
    config = _load(args.config)
    _preflight(config)
    g_values = [float(v) for v in args.g_values.split(",")]
    rows = [boundary(config, g, r_lo=args.r_lo, r_hi=args.r_hi, tol=args.tol) for g in g_values]
    table = [[r.g_over_gamma, r.r_star, r.r_star_closed_form, int(r.found)] for r in rows]
    _write_csv(args.out, ["g_over_gamma", "r_star", "r_star_closed_form", "found"], table)
    for r in rows:
        if not r.found:
            log.warning("no entanglement boundary found for g/gamma = %g", r.g_over_gamma)
    return EXIT_OK


def cmd_fig2a(args) -> int:
    for s in (0.0, 0.5):
        _preflight(xyz_preset(1.0, s, g=args.g, polarization_rate=args.polarization_rate))
    r_axis = _range(args.r_range, "--r-range")
    rows = fig2a_rows(r_axis, g_t=args.g, polarization_rate=args.polarization_rate, workers=args.workers, tol=args.tol)
    _write_csv(args.out, ["r_over_gamma", "negativity_s0", "negativity_s05"], rows)
    return EXIT_SOLVER if any(math.isnan(v) for row in rows for v in row) else EXIT_OK


def cmd_fig2b(args) -> int:
    if not args.lam > 0:
        raise ValidationError("--lambda", f"must be positive, got {args.lam}")
    mix = MixtureSpec(args.lam, args.n_min, args.n_max)
    for n in sorted(set(mix.weights) | {args.n_qubits}):
        _preflight(pairwise_ising(n, args.g, 1.0, 1.0))
    r_axis = _range(args.r_range, "--r-range")
    rows = fig2b_rows(r_axis, g_t=args.g, n_qubits=args.n_qubits, mix=mix, workers=args.workers, tol=args.tol)
    n = args.n_qubits
    header = ["r_over_gamma", f"avg_negativity_{n}q", f"pair_negativity_{n}q", "pair_negativity_poisson"]
    table = [[r.r_over_gamma, r.avg_negativity, r.pair_negativity, r.pair_negativity_poisson] for r in rows]
    _write_csv(args.out, header, table)
    return EXIT_SOLVER if any(math.isnan(v) for row in table for v in row) else EXIT_OK


def cmd_spectrum(args) -> int:
    config = _load(args.config)
    validate(config)
    try:
        w = spectrum(config)
    except CapacityError as exc:
        raise CLIError(str(exc), EXIT_VALIDATION) from exc
    except np.linalg.LinAlgError as exc:
        raise CLIError(f"eigensolver failed: {exc}", EXIT_SOLVER) from exc
    _write_csv(args.out, ["re", "im"], [[v.real, v.imag] for v in w])
    print(f"spectral_gap={spectral_gap(w)!r}")
    return EXIT_OK


def cmd_validate(args) -> int:
    config = _load(args.config)
    validate(config)
    check = check_lindblad(config)
    print(f"valid: {config.n_qubits} qubits; Lindblad check {'passed' if check else 'FAILED'} "
          f"(min Choi eigenvalue {check.min_choi_eigenvalue:.3g}, {check.method})")
    return EXIT_OK if check else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="resetent", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True, out=True):
        if config:
            p.add_argument("--config", required=True, help="model configuration (INI)")
        if out:
            p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--tol", type=float, default=1e-10, help="steady-state residual tolerance")
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("sweep", help="negativity on a (g/gamma, r/gamma) grid")
    common(p)
    p.add_argument("--g-range", required=True, help="lo:hi:steps[:log|lin], default log")
    p.add_argument("--r-range", required=True, help="lo:hi:steps[:log|lin], default log")
    p.add_argument("--json", help="also write a JSON envelope with config echo")
    p.add_argument("--no-timing", action="store_true", help="write wall_time_s as 0 for byte-stable output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("boundary", help="threshold r/gamma of the entangled region")
    common(p)
    p.add_argument("--g-values", required=True, help="comma-separated g/gamma values")
    p.add_argument("--r-lo", type=float, default=1e-2)
    p.add_argument("--r-hi", type=float, default=1e6)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("fig2a", help="XYZ + field model at s=0 and s=1/2")
    common(p, config=False)
    p.add_argument("--r-range", default="0.01:1e5:36:log")
    p.add_argument("--g", type=float, default=10.0, help="coupling g/gamma")
    p.add_argument("--polarization-rate", type=float, default=1.0, help="C/gamma (B = 2C)")
    p.set_defaults(func=cmd_fig2a)

    p = sub.add_parser("fig2b", help="pairwise Ising: average, pair and Poisson-mixture negativity")
    common(p, config=False)
    p.add_argument("--r-range", default="0.1:1e5:25:log")
    p.add_argument("--g", type=float, default=5.0, help="coupling g/gamma")
    p.add_argument("--lambda", dest="lam", type=float, default=4.0, help="Poisson mean of the particle number")
    p.add_argument("--n-qubits", type=int, default=5)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=6)
    p.set_defaults(func=cmd_fig2b)

    p = sub.add_parser("spectrum", help="Liouvillian eigenvalues")
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("validate", help="check a configuration file")
    common(p, out=False)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
