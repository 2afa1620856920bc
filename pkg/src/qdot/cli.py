"""Command-line front end: exact solutions, spectra, bound states, validation.

Output is CSV (default) or JSON with identical numeric content; every
float is printed with 12 significant digits, so parsing the output
recovers the values exactly at that precision.  CSV starts with
'#'-prefixed metadata lines followed by a header row.  Exit codes:
0 success, 2 usage error, 3 numerically inconclusive, 4 internal
numerical failure.

Grid defaults may come from the environment (QDOT_RMIN, QDOT_RMAX,
QDOT_STEPS, QDOT_TOL); explicit flags always win.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import heun, validate
from .model import NumericsError, PotentialKind, RadialProblem
from .numerov import SpectrumRequest, bound_states, find_eigenvalues, grid_resolvable_floor

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3
EXIT_NUMERICAL = 4

# fixed column orders, stable for scripting
COLUMNS = {
    "eigenvalue": ("index", "eta_ha", "nodes"),
    "wavefunction-sample": ("r_bohr", "u"),
    "report-row": ("report", "row", "inputs", "expected", "computed",
                   "rel_error", "status", "note"),
    "heun-solution": None,  # root_index, t, omega_ha, eta_ha, y_coeff_0..n
}


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _emit(stream, kind, metadata, columns, rows, fmt_name):
    """Write one table; JSON carries the same 12-digit numeric content."""
    if fmt_name == "json":
        def back(v):
            if isinstance(v, str):
                return v
            if isinstance(v, (int, np.integer)):
                return int(v)
            return float(fmt(v))
        doc = {
            "kind": kind,
            "metadata": {k: back(v) for k, v in metadata.items()},
            "columns": list(columns),
            "rows": [[back(v) for v in row] for row in rows],
        }
        json.dump(doc, stream, indent=1)
        stream.write("\n")
    else:
        for k, v in metadata.items():
            stream.write(f"# {k} = {v if isinstance(v, str) else fmt(v)}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def _env_float(name):
    raw = os.environ.get(name)
    return float(raw) if raw not in (None, "") else None


def _env_int(name):
    raw = os.environ.get(name)
    return int(raw) if raw not in (None, "") else None


def _grid_args(parser, include_rmin=True):
    if include_rmin:
        parser.add_argument("--rmin", type=float, default=None,
                            help="inner cutoff in Bohr radii (default 1e-3 or QDOT_RMIN)")
    parser.add_argument("--rmax", type=float, default=None,
                        help="outer cutoff in Bohr radii (default 40/sqrt(omega) or QDOT_RMAX)")
    parser.add_argument("--steps", type=int, default=None,
                        help="grid point count (default 20000 or QDOT_STEPS)")
    parser.add_argument("--tol", type=float, default=None,
                        help="eigenvalue tolerance in Ha (default 1e-6 or QDOT_TOL)")


def _resolve_grid(args):
    rmin = args.rmin if args.rmin is not None else _env_float("QDOT_RMIN")
    rmax = args.rmax if args.rmax is not None else _env_float("QDOT_RMAX")
    steps = args.steps if args.steps is not None else _env_int("QDOT_STEPS")
    tol = args.tol if getattr(args, "tol", None) is not None else _env_float("QDOT_TOL")
    return (
        rmin if rmin is not None else 1e-3,
        rmax,
        steps if steps is not None else 20000,
        tol if tol is not None else 1e-6,
    )


def _write_wave(path, wave, metadata):
    with open(path, "w", encoding="utf-8") as fh:
        _emit(fh, "wavefunction-sample", metadata,
              COLUMNS["wavefunction-sample"],
              list(zip(wave.grid, wave.values)), "csv")


def cmd_poly(args, out):
    if args.n < 1 or args.l < 0:
        raise SystemExit(_usage(f"need n >= 1 and l >= 0, got n={args.n} l={args.l}"))
    roots, asymptotic = heun.admissible_roots(args.n, args.l)
    solutions = [heun.build_solution(args.n, args.l, i) for i in range(len(roots))]
    metadata = {
        "n": args.n,
        "l": args.l,
        "positive_roots": len(roots),
        "asymptotic_root": "yes (omega -> infinity, non-interacting limit)"
        if asymptotic else "no",
    }
    if args.samples:
        if args.root_index is None:
            idx = len(roots) - 1
            metadata["root_index"] = f"{idx} (largest root, default)"
        else:
            idx = args.root_index
        if not 0 <= idx < len(roots):
            raise SystemExit(_usage(f"--root-index {idx} out of range (0..{len(roots)-1})"))
        sol = solutions[idx]
        metadata.update({
            "t": fmt(sol.t), "omega_ha": fmt(sol.omega), "eta_ha": fmt(sol.eta),
            "y_coeffs": ", ".join(fmt(c) for c in sol.y_coeffs),
        })
        grid = np.linspace(1e-3, 40.0 / np.sqrt(sol.omega), args.samples)
        wave = heun.sample_u(sol, grid)
        _emit(out, "wavefunction-sample", metadata,
              COLUMNS["wavefunction-sample"],
              list(zip(wave.grid, wave.values)), args.format)
        return EXIT_OK
    columns = ["root_index", "t", "omega_ha", "eta_ha"] + [
        f"y_coeff_{p}" for p in range(args.n + 1)
    ]
    rows = [
        [i, sol.t, sol.omega, sol.eta, *sol.y_coeffs]
        for i, sol in enumerate(solutions)
    ]
    _emit(out, "heun-solution", metadata, columns, rows, args.format)
    return EXIT_OK


def _spectrum_table(states, metadata, args, out):
    rows = [[i, s.eta, s.nodes] for i, s in enumerate(states)]
    if not states:
        metadata["notice"] = "no eigenvalues in the requested window"
    _emit(out, "eigenvalue", metadata, COLUMNS["eigenvalue"], rows, args.format)


def cmd_spectrum(args, out):
    kind = PotentialKind.from_name(args.potential)
    rmin, rmax, steps, tol = _resolve_grid(args)
    problem = RadialProblem(potential=kind, omega=args.omega, l=args.l,
                            r_min=rmin, r_max=rmax, steps=steps)
    request = SpectrumRequest(problem=problem, eta_min=args.eta_min,
                              eta_max=args.eta_max, max_states=args.max_states,
                              tol=tol)
    states = find_eigenvalues(request)
    metadata = {
        "potential": kind.value, "omega_ha": problem.omega, "l": problem.l,
        "r_min": problem.r_min, "r_max": problem.r_max, "steps": problem.steps,
        "eta_min": args.eta_min, "eta_max": args.eta_max, "tol": tol,
    }
    _spectrum_table(states, metadata, args, out)
    if args.waves:
        for i, s in enumerate(states):
            _write_wave(f"{args.waves}.state{i}.csv", s.wave,
                        {**metadata, "state": i, "eta_ha": s.eta, "nodes": s.nodes})
    return EXIT_OK


def cmd_bound(args, out):
    kind = PotentialKind.from_name(args.potential)
    rmin = args.rmin  # mandatory here: results depend on it
    _, rmax, steps, tol = _resolve_grid(args)
    problem = RadialProblem(potential=kind, omega=args.omega, l=0,
                            r_min=rmin, r_max=rmax, steps=steps)
    floor = args.eta_floor
    if floor is None:
        floor = 0.999 * grid_resolvable_floor(problem)
    states = bound_states(problem, eta_floor=floor)
    metadata = {
        "potential": kind.value, "omega_ha": problem.omega, "l": 0,
        "r_min": problem.r_min, "r_max": problem.r_max, "steps": problem.steps,
        "eta_floor": floor,
        "note": "negative energies depend on r_min and the grid step; "
                "the critical -1/(4 r^2) core is regularized by the cutoff",
    }
    _spectrum_table(states, metadata, args, out)
    if args.waves and states:
        s = states[0]
        _write_wave(f"{args.waves}.ground.csv", s.wave,
                    {**metadata, "eta_ha": s.eta, "nodes": s.nodes})
    return EXIT_OK


def cmd_validate(args, out):
    exp = validate.load_expectations(args.expectations)
    producers = {
        "1": validate.reproduce_table1,
        "poly": validate.reproduce_polynomials,
        "2": validate.reproduce_table2,
        "3": validate.reproduce_table3,
        "4": validate.reproduce_table4,
        "bound": validate.reproduce_bound_states,
    }
    wanted = list(producers) if args.table == "all" else [args.table]
    reports = [producers[t](exp) for t in wanted]
    rows = []
    for rep in reports:
        for row in rep.rows:
            status = "annotated" if row.annotation else ("pass" if row.passed else "fail")
            rows.append([rep.label, row.label, row.inputs, row.expected,
                         row.computed, row.rel_error, status, row.annotation or ""])
    metadata = {"tables": ", ".join(r.label for r in reports)}
    inconclusive = [r.label for r in reports if r.inconclusive]
    if inconclusive:
        metadata["inconclusive"] = ", ".join(inconclusive)
    _emit(out, "report-row", metadata, COLUMNS["report-row"], rows, args.format)
    if inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if all(r.passed for r in reports) else 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(_usage(message))


def _usage(message):
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdot", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poly", help="exact polynomial solutions at admissible frequencies")
    p.add_argument("--n", type=int, required=True, help="polynomial degree, >= 1")
    p.add_argument("--l", type=int, default=0, help="angular momentum, >= 0")
    p.add_argument("--root-index", type=int, default=None,
                   help="which positive root (ascending); default largest for --samples")
    p.add_argument("--samples", type=int, default=0,
                   help="emit u(r) sampled at this many radii instead of the root table")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("spectrum", help="Numerov eigenvalues in an energy window")
    p.add_argument("--potential", required=True, help="coulomb, log or none")
    p.add_argument("--omega", type=float, required=True, help="frequency in Ha")
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--eta-min", type=float, required=True)
    p.add_argument("--eta-max", type=float, required=True)
    p.add_argument("--max-states", type=int, default=50)
    p.add_argument("--waves", default=None,
                   help="prefix; write one wavefunction CSV per state")
    _grid_args(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bound", help="negative-energy states (l = 0 only)")
    p.add_argument("--potential", required=True, help="coulomb or log")
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--rmin", type=float, required=True,
                   help="inner cutoff; bound energies depend on it")
    p.add_argument("--l", type=_reject_l, default=None,
                   help=argparse.SUPPRESS)
    p.add_argument("--eta-floor", type=float, default=None,
                   help="search floor in Ha (default: deepest the grid resolves)")
    p.add_argument("--waves", default=None,
                   help="prefix; write the ground-state wavefunction CSV")
    _grid_args(p, include_rmin=False)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("validate", help="reproduce the bundled reference expectations")
    p.add_argument("--table", choices=("1", "2", "3", "4", "poly", "bound", "all"),
                   default="all")
    p.add_argument("--expectations", default=None,
                   help="path to an expectations file (default: bundled)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_validate)
    return parser


def _reject_l(_value):
    raise argparse.ArgumentTypeError(
        "bound states exist only for l = 0 (the centrifugal term is "
        "repulsive for l >= 1); the --l flag is not accepted here"
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, sys.stdout)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (ValueError, argparse.ArgumentTypeError) as exc:
        return _usage(str(exc))
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
