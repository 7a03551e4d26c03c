"""Command-line front end.

Subcommands::

    confined-aim solve    --A 2 --R 2.2 --state 1s [--oracle]
    confined-aim table    --id 2 [--jobs 4]
    confined-aim critical --l 0 --n 1 --A 2 [--oracle]
    confined-aim exact    --n 2 --l 0 --A 2

Every command accepts ``--digits`` and ``--format json|csv``.  JSON output is
one object per line; all numbers are decimal strings.  The default precision
can be set with the ``CONFINED_AIM_DIGITS`` environment variable; an explicit
``--digits`` wins.

Exit status: 0 on success, 2 when a computation does not converge, 3 on
invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

import gmpy2
from gmpy2 import mpfr

from . import golden, oracle
from .aim import SolveOptions
from .errors import AIMError
from .hydrogen import (
    HydrogenModel,
    StateLabel,
    exact_closed_forms,
    exact_energy,
    exact_factor,
    exact_radii,
    solve_critical,
    solve_energy,
)
from .numerics import PrecisionContext, to_real

ENV_DIGITS = "CONFINED_AIM_DIGITS"
EXIT_OK, EXIT_NO_CONVERGENCE, EXIT_INVALID = 0, 2, 3

ENERGY_KEYS = ("A", "R", "l", "n", "E", "a_re", "a_im", "axis", "iterations", "residual", "digits")


class InvalidInput(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    digits: int = 50
    n_max: int = 200
    fmt: str = "json"
    oracle: bool = False

    def __post_init__(self):
        if self.digits < 16:
            raise InvalidInput(f"digits must be >= 16, got {self.digits}")
        if self.fmt not in ("json", "csv"):
            raise InvalidInput(f"format must be json or csv, got {self.fmt!r}")
        if self.n_max < 12:
            raise InvalidInput(f"n-max must be >= 12, got {self.n_max}")

    def options(self) -> SolveOptions:
        return SolveOptions(digits=self.digits, n_max=self.n_max, max_digits=2 * self.digits)


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; here bad input means 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _fmt(x, digits: int) -> str:
    if isinstance(x, (int, str)):
        return str(x)
    if isinstance(x, float):
        return repr(x)
    text = format(x, f".{digits}g")
    # gmpy2 writes integral values as "18.0"; keep the plain decimal
    return text[:-2] if text.endswith(".0") else text


def _decimal(text: str) -> str:
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise InvalidInput(f"not a number: {text!r}") from None
    if not d.is_finite():
        raise InvalidInput(f"not a finite number: {text!r}")
    return text


def _positive(name: str, text: str) -> str:
    if Decimal(_decimal(text)) <= 0:
        raise InvalidInput(f"{name} must be positive, got {text}")
    return text


def energy_record(res, digits: int, with_oracle: bool = False) -> dict:
    rec = {
        "A": str(res.model.A),
        "R": str(res.model.R),
        "l": str(res.state.l),
        "n": str(res.state.n),
        "E": _fmt(res.E, digits),
        "a_re": _fmt(res.a_re, digits),
        "a_im": _fmt(res.a_im, digits),
        "axis": res.axis,
        "iterations": str(res.n_used),
        "residual": format(res.relative_residual, ".6g"),
        "digits": str(res.digits),
    }
    if with_oracle:
        rec["oracle_E"] = _fmt(res.oracle_E, digits)
    return rec


def emit(records: list[dict], fmt: str, out=None):
    out = out or sys.stdout
    if fmt == "json":
        for rec in records:
            out.write(json.dumps(rec) + "\n")
        return
    if not records:
        return
    fields = list(records[0])
    for rec in records[1:]:
        fields += [k for k in rec if k not in fields]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(records)
    out.write(buf.getvalue())


# --- table rows (module level so worker processes can import them) ---------


def _energy_row(job):
    l, row, cfg = job
    res = solve_energy(HydrogenModel(golden.A_DONOR, l, row.R), StateLabel(1, l), cfg.options())
    rec = energy_record(res, cfg.digits)
    rec.update(_deviation(res.E, row.E))
    rec["flag"] = "exact" if row.exact else ("" if res.stabilized else "unstabilized")
    if cfg.oracle:
        check = oracle.oracle_energy(float(row.R), (1, l), float(golden.A_DONOR))
        rec["oracle_E"] = repr(check.E)
    return rec


def _critical_row(job):
    row, cfg = job
    res = solve_critical(row.l, row.n, golden.A_DONOR, cfg.options())
    rec = critical_record(res, cfg.digits)
    rec.update(_deviation(res.r_c, row.r_c))
    if cfg.oracle:
        rec.update(_critical_checks(row.l, row.n, float(golden.A_DONOR)))
    return rec


def _deviation(value, printed: str) -> dict:
    dev = abs(Decimal(format(value, ".60g")) - Decimal(printed)) / golden.ulp(printed)
    return {"published": printed, "deviation_ulp": format(dev, ".3f")}


def critical_record(res, digits: int) -> dict:
    return {
        "A": str(res.A),
        "l": str(res.l),
        "n": str(res.n),
        "r_c": _fmt(res.r_c, digits),
        "iterations": str(res.n_used),
        "digits": str(res.digits),
    }


def _critical_checks(l: int, n: int, A: float) -> dict:
    from scipy.special import jn_zeros

    j = float(jn_zeros(2 * l + 1, n)[-1])
    shoot = oracle.oracle_critical_radii(l, n, A)[-1]
    return {"bessel_r_c": repr(j * j / (4 * A)), "oracle_r_c": repr(shoot)}


def _table1(cfg: RunConfig) -> list[dict]:
    ctx = PrecisionContext(cfg.digits)
    A = golden.A_DONOR
    out = []
    for row in golden.TABLE1:
        radii = exact_radii(row.n, row.l, A, ctx)
        R = radii[row.m]
        closed = exact_closed_forms(row.n, row.l)
        with ctx.local():
            AR = R * to_real(A)
            if row.closed is not None:
                c, d, sign, q = row.closed
                ref = c * (d + sign * gmpy2.sqrt(mpfr(q))) if q else mpfr(c * d)
                dev = format(abs(AR - ref), ".3g")
            else:
                dev = format(abs(Decimal(format(AR, ".60g")) - Decimal(row.printed)) / golden.ulp(row.printed), ".3f")
        factor = exact_factor(row.n, row.l, row.m, A, ctx)
        out.append(
            {
                "n": str(row.n),
                "l": str(row.l),
                "m": str(row.m),
                "A": A,
                "R": _fmt(R, cfg.digits),
                "R_closed": f"{closed[row.m]}/A" if closed else "",
                "E": _fmt(exact_energy(row.n, row.l, A, ctx), cfg.digits),
                "E_closed": f"-A^2/{4 * (row.n + row.l + 1) ** 2}",
                "factor": " ".join(_fmt(c, cfg.digits) for c in factor.coefficients),
                "published": row.closed_form() or row.printed,
                "deviation": dev,
            }
        )
    return out


def _run_rows(fn, jobs_list, jobs: int) -> list[dict]:
    if jobs <= 1:
        return [fn(j) for j in jobs_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map keeps submission order, so output order never depends on timing
        return list(pool.map(fn, jobs_list))


# --- commands --------------------------------------------------------------


def cmd_solve(args, cfg: RunConfig) -> int:
    A = _positive("A", args.A)
    R = _positive("R", args.R)
    try:
        state = StateLabel.parse(args.state)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    model = HydrogenModel(A, state.l, R)
    res = solve_energy(model, state, cfg.options(), oracle_check=cfg.oracle)
    emit([energy_record(res, cfg.digits, cfg.oracle)], cfg.fmt)
    return EXIT_OK


def cmd_table(args, cfg: RunConfig) -> int:
    if args.id not in (1, 2, 3, 4):
        raise InvalidInput(f"no table {args.id}; choose 1, 2, 3 or 4")
    if args.jobs < 1:
        raise InvalidInput("jobs must be >= 1")
    if args.id == 1:
        rows = _table1(cfg)
    elif args.id in (2, 3):
        l = 0 if args.id == 2 else 1
        rows = _run_rows(_energy_row, [(l, r, cfg) for r in golden.table(args.id)], args.jobs)
    else:
        rows = _run_rows(_critical_row, [(r, cfg) for r in golden.TABLE4], args.jobs)
    emit(rows, cfg.fmt)
    if args.id != 1:
        worst = max(Decimal(r["deviation_ulp"]) for r in rows)
        print(f"table {args.id}: {len(rows)} rows, max deviation {worst} ulp of the print", file=sys.stderr)
    return EXIT_OK


def cmd_critical(args, cfg: RunConfig) -> int:
    A = _positive("A", args.A)
    if args.l < 0 or args.n < 1:
        raise InvalidInput("need l >= 0 and n >= 1")
    res = solve_critical(args.l, args.n, A, cfg.options())
    rec = critical_record(res, cfg.digits)
    if cfg.oracle:
        rec.update(_critical_checks(args.l, args.n, float(Decimal(A))))
    emit([rec], cfg.fmt)
    return EXIT_OK


def cmd_exact(args, cfg: RunConfig) -> int:
    A = _positive("A", args.A)
    if args.n < 1 or args.l < 0:
        raise InvalidInput("need n >= 1 and l >= 0")
    ctx = PrecisionContext(cfg.digits)
    radii = exact_radii(args.n, args.l, A, ctx)
    E = exact_energy(args.n, args.l, A, ctx)
    closed = exact_closed_forms(args.n, args.l)
    records = []
    for m, R in enumerate(radii):
        factor = exact_factor(args.n, args.l, m, A, ctx)
        rec = {
            "A": A,
            "n": str(args.n),
            "l": str(args.l),
            "m": str(m),
            "R": _fmt(R, cfg.digits),
            "E": _fmt(E, cfg.digits),
            "factor": " ".join(_fmt(c, cfg.digits) for c in factor.coefficients),
        }
        if closed:
            rec["R_closed"] = f"{closed[m]}/A"
        records.append(rec)
    emit(records, cfg.fmt)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--digits", type=int, default=None, help=f"working digits (env {ENV_DIGITS}, default 50)")
    common.add_argument("--n-max", type=int, default=200, help="largest AIM iteration count")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--oracle", action="store_true", help="cross-check with the shooting oracle")

    p = _Parser(prog="confined-aim", description="AIM solver for a hydrogen-like atom in a spherical box")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="one eigenvalue")
    s.add_argument("--A", default="2", help="Coulomb strength (2 = Rydberg units)")
    s.add_argument("--R", required=True, help="box radius")
    s.add_argument("--state", default="1s", help='state label, e.g. "1s", "2p" or "n,l"')
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser("table", parents=[common], help="regenerate a published table")
    t.add_argument("--id", type=int, required=True)
    t.add_argument("--jobs", type=int, default=1, help="worker processes")
    t.set_defaults(func=cmd_table)

    c = sub.add_parser("critical", parents=[common], help="critical cage radius")
    c.add_argument("--l", type=int, default=0)
    c.add_argument("--n", type=int, default=1)
    c.add_argument("--A", default="2")
    c.set_defaults(func=cmd_critical)

    e = sub.add_parser("exact", parents=[common], help="special radii with exact solutions")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--l", type=int, default=0)
    e.add_argument("--A", default="2")
    e.set_defaults(func=cmd_exact)
    return p


def resolve_digits(flag: int | None, environ=None) -> int:
    if flag is not None:
        return flag
    environ = os.environ if environ is None else environ
    raw = environ.get(ENV_DIGITS)
    if raw is None or raw == "":
        return 50
    try:
        return int(raw)
    except ValueError:
        raise InvalidInput(f"{ENV_DIGITS} must be an integer, got {raw!r}") from None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(resolve_digits(args.digits), args.n_max, args.format, args.oracle)
        return args.func(args, cfg)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AIMError as exc:
        # solver failures first: some of them are also ValueErrors
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
