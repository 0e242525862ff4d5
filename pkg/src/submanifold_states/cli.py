"""Command line: ``subman dims | run | sweep | list``.

Exit codes: 0 success, 2 usage, 3 degenerate state, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from .experiments import (
    CSV_FIELDS,
    ExperimentSpec,
    dims_table,
    flat_row,
    load_experiment,
    run_one,
    set_parameter,
    shipped_experiments,
)
from .quadrature import DegenerateSubmanifoldError, QuadratureError
from .serialize import dumps, fmt
from .states import DegenerateStateError, NumericalError

EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_NUMERICAL = 4


def _csv(rows: list[dict], fields: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([fmt(row.get(k)) for k in fields])
    return buf.getvalue()


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _apply_flags(exp: ExperimentSpec, args) -> ExperimentSpec:
    changes = {}
    if args.nodes is not None:
        changes["nodes"] = args.nodes
    if args.tol is not None:
        changes["tol"] = args.tol
    if args.format is not None:
        changes["format"] = args.format
    if args.emit_matrix:
        changes["emit_matrix"] = True
    return exp.with_(**changes) if changes else exp


def cmd_dims(args) -> int:
    rows = [dims_table(args.n1, args.n2, N) for N in args.N]
    fields = ["n1", "n2", "N", "d1", "d2", "dN"]
    if args.format == "json":
        _emit(dumps(rows if len(rows) > 1 else rows[0]) + "\n", args.output)
    elif args.format == "csv":
        _emit(_csv(rows, fields), args.output)
    else:
        lines = [" ".join(f"{k:>4}" for k in fields)]
        lines += [" ".join(f"{r[k]:>4}" for k in fields) for r in rows]
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_run(args) -> int:
    exp = _apply_flags(load_experiment(args.spec), args)
    results = [run_one(exp, N, args.deterministic, args.workers) for N in exp.Ns]
    if exp.format == "csv":
        fields = CSV_FIELDS + ([] if args.deterministic else ["wall_time"])
        _emit(_csv([flat_row(r) for r in results], fields), args.output)
    else:
        doc = {"schema": 1, "experiment": exp.name, "spec": exp.to_dict(), "results": results}
        _emit(dumps(doc) + "\n", args.output)
    for r in results:
        if r["convergence"]["warning"]:
            print(f"warning: N={r['N']}: {r['convergence']['warning']}", file=sys.stderr)
    return 0


def _parse_values(text: str, integer: bool) -> list:
    conv = int if integer else float
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad range {text!r}; use start:stop[:step]")
        start, stop = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
        return list(range(start, stop + 1, step))
    return [conv(v) for v in text.split(",") if v.strip()]


def cmd_sweep(args) -> int:
    exp = _apply_flags(load_experiment(args.spec), args)
    integer = args.parameter in ("N", "nodes", "n1", "n2")
    values = _parse_values(args.values, integer)
    rows = []
    for v in values:
        row = {args.parameter: v}
        try:
            point = set_parameter(exp, args.parameter, v)
            for r in (run_one(point, N, args.deterministic, args.workers) for N in point.Ns):
                rows.append({**row, **flat_row(r), "error": None})
        except (ValueError, KeyError, ArithmeticError) as exc:
            rows.append({**row, "error": f"{type(exc).__name__}: {exc}"})
    fields = [args.parameter] + [f for f in CSV_FIELDS if f != args.parameter] + ["error"]
    if not args.deterministic:
        fields.append("wall_time")
    _emit(_csv(rows, fields), args.output)
    return 0


def cmd_list(args) -> int:
    _emit("\n".join(shipped_experiments()) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nodes", type=int, help="nodes per periodic parameter (bounded ones get half)")
    common.add_argument("--tol", type=float, help="tolerance for separability verdicts (default 1e-9)")
    common.add_argument("--deterministic", action="store_true", help="sequential reduction, no timing fields")
    common.add_argument("--workers", type=int, default=1, help="threads for Gram assembly")
    common.add_argument("--emit-matrix", action="store_true", help="always include rho_N in the output")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    p = argparse.ArgumentParser(prog="subman", description="Restriction states on P^n1 x P^n2 and their entanglement.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dims", help="section-space dimensions d1, d2, d_N")
    d.add_argument("n1", type=int)
    d.add_argument("n2", type=int)
    d.add_argument("N", type=int, nargs="+")
    d.add_argument("--format", choices=["table", "json", "csv"], default="table")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_dims)

    r = sub.add_parser("run", parents=[common], help="run an experiment spec (file or shipped name)")
    r.add_argument("spec")
    r.add_argument("--format", choices=["json", "csv"])
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", parents=[common], help="CSV of report fields over a parameter")
    s.add_argument("spec")
    s.add_argument("parameter", help="N, nodes, n1, n2, scale, or a submanifold param such as radius")
    s.add_argument("values", help="comma list (0.5,1,2) or inclusive integer range (1:4)")
    s.add_argument("--format", choices=["csv"])
    s.set_defaults(func=cmd_sweep)

    ls = sub.add_parser("list", help="names of the shipped experiment specs")
    ls.add_argument("-o", "--output")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "dims" and (args.n1 < 1 or args.n2 < 1 or any(N < 0 for N in args.N)):
        parser.error("dims needs n1, n2 >= 1 and N >= 0")
    try:
        return args.func(args)
    except (DegenerateStateError, DegenerateSubmanifoldError) as exc:
        print(f"error: degenerate state: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (QuadratureError, NumericalError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
