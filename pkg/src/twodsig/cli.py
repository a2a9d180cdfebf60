"""Command-line interface: ``twodsig {extract,verify,bench,rotate,lift,goursat}``.

Exit codes: 0 success, 1 usage, 2 input, 3 resource limit, 4 failed check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import combinatorics as cb
from .errors import InputError, ResourceLimitError, UnsupportedError
from .field import (
    GridField,
    GridRect,
    field_to_csv,
    homotopy_sine,
    lift,
    load_field,
    monomial,
    rotate90,
    save_field,
    trig_poly,
)
from .goursat import GoursatProblem, compare_goursat_expansion, solve_goursat_2d
from .identities import CHECKER_GROUPS, default_battery
from .report import reports_table, reports_to_json
from .signature import (
    BRUTE_FORCE_CAP,
    MAX_LEVEL,
    SigQuery,
    SigTable,
    brute_force_signature,
    full_signature,
    id_signature,
    sym_signature,
)

EXIT_USAGE, EXIT_INPUT, EXIT_RESOURCE, EXIT_CHECK = 1, 2, 3, 4
BUILTINS = ("homotopy_sine", "trig_poly", "monomial")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# argument helpers


def _int_list(text: str) -> list:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _float_pair(text: str) -> tuple:
    try:
        a, b = (float(v) for v in str(text).split(","))
    except ValueError as exc:
        raise UsageError(f"expected T1,T2, got {text!r}") from exc
    return a, b


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines (``#`` comments, optional [sections] ignored)."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise InputError(f"bad config line {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        value = value.strip('"').strip("'")
        out[key.replace("-", "_")] = value
    return out


def _add_field_args(p):
    p.add_argument("--input", help="field file (csv, pgm or png)")
    p.add_argument("--format", choices=("csv", "pgm", "png"), help="input format (default: from extension)")
    p.add_argument("--builtin", choices=BUILTINS, help="use a built-in synthetic field instead of --input")
    p.add_argument("--size", type=int, default=64, help="grid size N for built-in fields")
    p.add_argument("--channels", type=int, default=1, help="channels of the trig_poly built-in")
    p.add_argument("--degree", type=int, default=3, help="degree of the trig_poly built-in")
    p.add_argument("--domain", help="T1,T2 for image inputs (default 1,1)")


def _common(p):
    p.add_argument("--config", help="file of key=value defaults; flags win")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twodsig", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("extract", help="compute signature coordinates of a field")
    _common(p)
    _add_field_args(p)
    p.add_argument("--kind", choices=("id", "full", "sym"), default="full")
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--coords", nargs="+", help="explicit coordinates, e.g. 'w=1,2;v=2,1' or 'w=1,2'")
    p.add_argument("--rect", help="i0,j0,i1,j1 (default: full grid)")
    p.add_argument("--out", help="output path (.json or .csv); default stdout json")
    p.add_argument("--out-format", choices=("json", "csv"))
    p.add_argument("--jobs", type=int, default=1, help="coordinates evaluated concurrently")
    p.add_argument("--unsafe-level", action="store_true", help=f"allow --level above {MAX_LEVEL}")

    p = sub.add_parser("verify", help="run the identity checker battery")
    _common(p)
    _add_field_args(p)
    p.add_argument("--refinements", default="32,64,128")
    p.add_argument("--only", choices=CHECKER_GROUPS)
    p.add_argument("--out", help="write the JSON report here")

    p = sub.add_parser("bench", help="time full_signature across grid sizes and permutations")
    _common(p)
    p.add_argument("--sizes", default="64,128,256,512")
    p.add_argument("--levels", default="1,2,3")
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--out", help="CSV output path (default stdout)")

    p = sub.add_parser("rotate", help="rotate a square field by quarter turns")
    _common(p)
    _add_field_args(p)
    p.add_argument("--turns", type=int, default=1)
    p.add_argument("--out", help="CSV field output (default stdout)")

    p = sub.add_parser("lift", help="prepend the channels s1^2 s2 and s1 s2^2")
    _common(p)
    _add_field_args(p)
    p.add_argument("--out", help="CSV field output (default stdout)")

    p = sub.add_parser("goursat", help="solve the linear Goursat problem driven by a field")
    _common(p)
    _add_field_args(p)
    p.add_argument("--matrices", help="JSON file {\"A\": [[[..]],..], \"v\": [..]}")
    p.add_argument("--lam", type=float, default=1.0, help="scalar coefficient when --matrices is absent")
    p.add_argument("--scheme", choices=("explicit", "trapezoidal"), default="explicit")
    p.add_argument("--level", type=int, default=4, help="expansion level for the comparison report")
    p.add_argument("--rect", help="i0,j0,i1,j1 (default: full grid)")
    p.add_argument("--out", help="CSV field output of the solution (default stdout)")
    p.add_argument("--report", help="write the comparison report (JSON) here")
    return parser


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        cfg = read_config(args.config)
        subparser = parser._subparsers._group_actions[0].choices[args.command]  # type: ignore[union-attr]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        typed = {}
        for a in subparser._actions:
            if a.dest in cfg:
                raw = cfg[a.dest]
                if a.nargs == "+":
                    typed[a.dest] = raw.split()
                elif isinstance(a, argparse._StoreTrueAction):
                    typed[a.dest] = raw.lower() in ("1", "true", "yes")
                elif a.type is not None:
                    typed[a.dest] = a.type(raw)
                else:
                    typed[a.dest] = raw
        subparser.set_defaults(**typed)
        args = parser.parse_args(argv)
    return args


def load_input(args) -> GridField:
    if args.input and args.builtin:
        raise UsageError("give either --input or --builtin, not both")
    if args.builtin:
        N = args.size
        if N < 1:
            raise UsageError("--size must be >= 1")
        if args.builtin == "homotopy_sine":
            return homotopy_sine(N)
        if args.builtin == "monomial":
            return monomial(1, 1, N)
        return trig_poly(args.seed, args.degree, args.channels, N)
    if not args.input:
        raise UsageError("an input is required: --input PATH or --builtin NAME")
    T1, T2 = _float_pair(args.domain) if args.domain else (1.0, 1.0)
    return load_field(args.input, args.format, T1, T2)


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands


def enumerate_coords(kind: str, d: int, level: int) -> list:
    """Graded lexicographic coordinates: level, then word, then permutation."""
    if kind == "full":
        return cb.extended_words_up_to(d, level)
    return cb.words_up_to(d, level)


def cmd_extract(args) -> int:
    if args.level < 0:
        raise UsageError("--level must be >= 0")
    if args.level > MAX_LEVEL and not args.unsafe_level:
        raise UsageError(f"--level above {MAX_LEVEL} needs --unsafe-level")
    X = load_input(args)
    rect = GridRect.parse(args.rect).validate(X) if args.rect else X.full_rect()
    if args.coords:
        coords = []
        for text in args.coords:
            try:
                coords.append(_parse_coord(args.kind, text))
            except InputError as exc:
                raise UsageError(str(exc)) from exc
        levels = [len(c.word) if isinstance(c, cb.ExtendedWord) else len(c) for c in coords]
        if max(levels, default=0) > MAX_LEVEL and not args.unsafe_level:
            raise UsageError(f"coordinates above level {MAX_LEVEL} need --unsafe-level")
    else:
        coords = enumerate_coords(args.kind, X.d, args.level)
    max_level = None if args.unsafe_level else MAX_LEVEL
    query = SigQuery(args.kind, tuple(coords), rect, max_level=max_level or 10 ** 6)
    table = run_query(X, query, args.jobs)
    fmt = args.out_format or ("csv" if args.out and args.out.lower().endswith(".csv") else "json")
    _write_text(args.out, table.to_csv() if fmt == "csv" else table.to_json())
    return 0


def _parse_coord(kind: str, text: str):
    return cb.ExtendedWord.parse(text) if kind == "full" else cb.parse_word_key(text)


def run_query(X: GridField, query: SigQuery, jobs: int = 1) -> SigTable:
    """Evaluate a query, optionally spreading coordinates over threads.

    Results are merged in the query's coordinate order.
    """
    fn = {"id": id_signature, "full": full_signature, "sym": sym_signature}[query.kind]
    coords = list(query.coords)
    if jobs <= 1 or len(coords) <= 1:
        return fn(X, coords, query.rect)
    chunks = [coords[i::jobs] for i in range(jobs)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(lambda cs: fn(X, cs, query.rect), chunks))
    merged = {}
    lookup = {}
    for part in parts:
        lookup.update(part.entries)
    for c in coords:
        key = c.key() if isinstance(c, cb.ExtendedWord) else cb.word_key(c)
        merged[key] = lookup[key]
    return SigTable(query.kind, merged, (X.n1, X.n2), tuple(query.rect))


def cmd_verify(args) -> int:
    refinements = _int_list(args.refinements)
    if len(refinements) < 1 or min(refinements) < 2:
        raise UsageError("--refinements needs grid sizes >= 2")
    field = None
    if args.input or args.builtin:
        field = load_input(args)
        if args.only == "rotation" and not (field.n1 == field.n2 and field.T1 == field.T2):
            raise UsageError("--only rotation needs a square input grid")
    try:
        reports = default_battery(refinements, args.seed, args.only, field)
    except InputError as exc:
        raise UsageError(str(exc)) from exc
    print(reports_table(reports))
    if args.out:
        _write_text(args.out, reports_to_json(reports))
    return 0 if all(r.passed for r in reports) else EXIT_CHECK


def cmd_bench(args) -> int:
    sizes = _int_list(args.sizes)
    levels = _int_list(args.levels)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "n", "perm", "method", "seconds", "entries_per_sec", "status"])
    for N in sizes:
        X = trig_poly(args.seed, 2, 1, N)
        for n in levels:
            for perm in cb.all_permutations(n):
                c = cb.ExtendedWord((1,) * n, perm)
                best = None
                status = "ok"
                try:
                    for _ in range(max(1, args.repeat)):
                        t0 = time.perf_counter()
                        full_signature(X, [c])
                        dt = time.perf_counter() - t0
                        best = dt if best is None else min(best, dt)
                except ResourceLimitError:
                    status = "refused"
                rate = "" if best is None or best == 0 else f"{1.0 / best:.3f}"
                w.writerow([N, n, ",".join(map(str, perm)), "elimination",
                            "" if best is None else f"{best:.6f}", rate, status])
            c = cb.ExtendedWord((1,) * n, cb.identity(n))
            try:
                t0 = time.perf_counter()
                brute_force_signature(X, c, cap=BRUTE_FORCE_CAP)
                dt = time.perf_counter() - t0
                w.writerow([N, n, ",".join(map(str, c.perm)), "brute", f"{dt:.6f}",
                            f"{1.0 / dt:.3f}" if dt else "", "ok"])
            except ResourceLimitError:
                w.writerow([N, n, ",".join(map(str, c.perm)), "brute", "", "", "refused"])
    _write_text(args.out, buf.getvalue())
    return 0


def cmd_rotate(args) -> int:
    X = load_input(args)
    if X.n1 != X.n2 or X.T1 != X.T2:
        raise UsageError("rotation needs a square grid")
    _write_field(args.out, rotate90(X, args.turns))
    return 0


def cmd_lift(args) -> int:
    _write_field(args.out, lift(load_input(args)))
    return 0


def _write_field(path, X: GridField) -> None:
    if path and not path.lower().endswith(".csv") and path != "-":
        save_field(X, path)
    else:
        _write_text(path, field_to_csv(X))


def cmd_goursat(args) -> int:
    X = load_input(args)
    rect = GridRect.parse(args.rect).validate(X) if args.rect else None
    if args.matrices:
        try:
            with open(args.matrices, encoding="utf-8") as fh:
                data = json.load(fh)
            A = np.asarray(data["A"], dtype=float)
            v = np.asarray(data.get("v", [1.0] * A.shape[-1]), dtype=float)
        except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
            raise InputError(f"bad matrices file: {exc}") from exc
    else:
        A = np.full((X.d, 1, 1), args.lam)
        v = np.ones(1)
    if args.level > MAX_LEVEL:
        raise UsageError(f"--level above {MAX_LEVEL} is not supported")
    problem = GoursatProblem(A, v, X, rect)
    sol = solve_goursat_2d(problem, args.scheme)
    r = problem.rect
    out = GridField(sol.values, r.m1 * X.h1, r.m2 * X.h2)
    _write_field(args.out, out)
    if args.report:
        rep = compare_goursat_expansion(problem, args.level, args.scheme)
        _write_text(args.report, reports_to_json([rep]))
    return 0


COMMANDS = {
    "extract": cmd_extract,
    "verify": cmd_verify,
    "bench": cmd_bench,
    "rotate": cmd_rotate,
    "lift": cmd_lift,
    "goursat": cmd_goursat,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"twodsig: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceLimitError, MemoryError) as exc:
        print(f"twodsig: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InputError, UnsupportedError, OSError) as exc:
        print(f"twodsig: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
