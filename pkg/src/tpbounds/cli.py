"""Command line: figure data as CSV, or an acceptance suite as JSON.

    tpbounds --nu 100 --m 5 --out fig4.csv
    tpbounds --nu 100 --mode section4 --grid 0.65:1.35:0.05
    tpbounds --suite bound-validity
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from mpmath import mp

from .acceptance import SUITES, Workspace, default_grid, figure_point, modes_for, run_suite
from .mpnum import DomainError, PrecisionError, QuadratureError

COLUMNS = ["z_re", "z_im", "A_value", "A_bound", "A_true_err", "A_ratio",
           "B_value", "B_bound", "B_true_err", "B_ratio", "mode", "seconds"]

log = logging.getLogger("tpbounds")


def parse_grid(text: str | None) -> list:
    """``start:stop:step`` on the real line, or a comma list of (complex) points."""
    if not text:
        return default_grid()
    if ":" in text:
        start, stop, step = (Fraction(p) for p in text.split(":"))
        if step <= 0 or stop < start:
            raise ValueError("grid needs start <= stop and step > 0")
        count = int((stop - start) / step + Fraction(1, 10 ** 9)) + 1
        return [start + i * step for i in range(count)]
    out = []
    for item in text.split(","):
        item = item.strip().replace(" ", "")
        if "j" in item:
            out.append(complex(item))
        else:
            out.append(Fraction(item))
    return out


def _fmt(x) -> str:
    """17 significant digits in scientific notation."""
    if isinstance(x, str):
        return x
    if mp.isinf(x):
        return "inf"
    return "%.16e" % float(x)


def _value_columns(row: dict) -> dict:
    out = {}
    for key in COLUMNS:
        v = row[key]
        if key in ("A_value", "B_value") and v.imag != 0:
            out[key] = "%.16e%+.16ej" % (float(v.real), float(v.imag))
        elif key in ("A_value", "B_value"):
            out[key] = _fmt(v.real)
        else:
            out[key] = _fmt(v)
    return out


def _point_job(args):
    z, nu, m, mode, r0, digits = args
    ws = Workspace(digits=digits)
    return figure_point(ws, z, nu, m, mode, r0)


def run_figure(args) -> int:
    grid = parse_grid(args.grid)
    r0 = Fraction(args.r0)
    jobs = []
    for z in grid:
        modes = modes_for(z, args.mode, r0)
        if not modes:
            raise DomainError(f"z = {z} is outside the region of mode {args.mode}")
        jobs.extend((z, args.nu, args.m, md, r0, args.digits) for md in modes)
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            rows = list(pool.map(_point_job, jobs))      # map keeps grid order
    else:
        ws = Workspace(digits=args.digits)
        rows = []
        for z, nu, m, md, r0_, _ in jobs:
            try:
                rows.append(figure_point(ws, z, nu, m, md, r0_))
            except (DomainError, PrecisionError, QuadratureError) as exc:
                raise type(exc)(f"at z = {z}: {exc}") from exc
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow(_value_columns(row))
    finally:
        if args.out:
            out.close()
    bad = [r for r in rows if r["A_true_err"] > r["A_bound"] or r["B_true_err"] > r["B_bound"]]
    for r in bad:
        print(f"bound violated at z = {float(r['z_re'])}{float(r['z_im']):+}i ({r['mode']})", file=sys.stderr)
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tpbounds",
                                description="Bounds for Airy-type expansions of J_ν(νz): figure data and checks.")
    p.add_argument("--nu", type=float, default=100.0)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--grid", help="start:stop:step or a comma list (complex as 0.5+0.3j); "
                                  "default 0.05:0.75:0.05")
    p.add_argument("--mode", choices=["section3", "section4", "both"], default="section3",
                   help="section3: away from the turning point; section4: Cauchy loop around z = 1")
    p.add_argument("--r0", default="1/2", help="loop radius (default 1/2)")
    p.add_argument("--digits", type=int, default=80)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--suite", help="run an acceptance suite and print JSON: " + ", ".join(SUITES))
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    if args.digits < 30:
        parser.error("--digits must be at least 30")
    if args.m < 0:
        parser.error("--m must be non-negative")
    if args.suite is not None:
        if args.suite not in SUITES:
            parser.error(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
        res = run_suite(args.suite, Workspace(digits=args.digits))
        print(json.dumps(res.as_dict(), indent=2, default=str))
        return 0 if res.passed else 1
    try:
        return run_figure(args)
    except (DomainError, PrecisionError, QuadratureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
