"""Command-line front end.

Exit status: 0 success, 2 input or validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import shutil
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import environments as env
from . import reproduce
from . import scenario as scn
from .errors import ConvergenceError, InputError, ValidationError
from .quantities import Quantity, as_quantity, convert

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


# -- formatting helpers --------------------------------------------------------------

def fmt(value):
    """Six significant digits for humans."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return f"{value:.6g}"


def exact(value):
    """Round-trippable text for CSV cells."""
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def write_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([exact(v) for v in row])
    return buf.getvalue()


def write_table(header, rows):
    cells = [list(header)] + [[fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _json_default(obj):
    if isinstance(obj, Quantity):
        return {"value": obj.value, "unit": obj.unit}
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(type(obj).__name__)


def write_json(obj):
    return json.dumps(obj, indent=2, default=_json_default, allow_nan=False) + "\n"


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- budget -----------------------------------------------------------------------------

REPORT_HEADER = ("section", "label", "field", "value", "unit")


def render_report(report, fmt_name):
    if fmt_name == "json":
        return write_json(scn.report_to_dict(report))
    rows = scn.report_rows(report)
    if fmt_name == "csv":
        return write_csv(("scenario",) + REPORT_HEADER, [(report.name,) + r for r in rows])
    text = f"scenario: {report.name}\n" + write_table(REPORT_HEADER, rows)
    if report.coupling_note:
        text += f"note: {report.coupling_note}\n"
    return text


def cmd_budget(args):
    report = scn.evaluate(scn.load_scenario(args.scenario))
    _emit(render_report(report, args.format), args.out)
    return EXIT_OK


# -- reproduce-paper ------------------------------------------------------------------

CASE_HEADER = ("case", "reference", "computed", "unit", "rel_deviation", "tolerance", "result")


def cmd_reproduce(args):
    ids = reproduce.case_ids()
    if args.case != "all":
        if args.case not in reproduce.CASES:
            print(f"error: unknown case {args.case!r}; valid ids: all, {', '.join(ids)}",
                  file=sys.stderr)
            return EXIT_INPUT
        ids = [args.case]
    results = reproduce.run_all(ids)
    rows = [(r.case.id, r.case.reference, r.computed, r.case.unit, r.deviation,
             r.case.tolerance.describe(), "pass" if r.passed else "FAIL") for r in results]
    if args.format == "json":
        text = write_json([{
            "case": r.case.id, "description": r.case.description, "reference": r.case.reference,
            "computed": r.computed, "unit": r.case.unit,
            "rel_deviation": None if math.isnan(r.deviation) else r.deviation,
            "tolerance": r.case.tolerance.describe(), "passed": r.passed,
        } for r in results])
    elif args.format == "csv":
        text = write_csv(CASE_HEADER, rows)
    else:
        n_pass = sum(r.passed for r in results)
        text = write_table(CASE_HEADER, rows) + f"{n_pass}/{len(results)} cases pass\n"
    _emit(text, args.out)
    return EXIT_OK if all(r.passed for r in results) else 1


# -- sweep ------------------------------------------------------------------------------

SWEEP_FIELDS = scn.VERDICT_FIELDS


def _endpoint(text, current):
    """A sweep endpoint: a quantity string, or a bare number in the unit of the
    field being varied."""
    try:
        number = float(text)
    except ValueError:
        number = None
    if isinstance(current, Quantity):
        q = as_quantity(text) if number is None else Quantity(number, current.unit)
        return convert(q, current.unit)
    if number is None:
        raise ValidationError(f"sweep endpoint {text!r} must be a plain number for this field")
    return number


def sweep_values(doc, path, start, stop, steps, log=False):
    current = scn.get_parameter(doc, path)
    a, b = _endpoint(start, current), _endpoint(stop, current)
    if steps < 1:
        raise ValidationError("--steps must be at least 1")
    unit = current.unit if isinstance(current, Quantity) else "1"
    va = a.value if isinstance(a, Quantity) else a
    vb = b.value if isinstance(b, Quantity) else b
    if steps == 1:
        grid = [va]
    elif log:
        if va <= 0 or vb <= 0:
            raise ValidationError("--log needs positive endpoints")
        grid = list(np.geomspace(va, vb, steps))
        grid[0], grid[-1] = va, vb
    else:
        grid = list(np.linspace(va, vb, steps))
    grid = [float(v) for v in grid]
    if isinstance(current, Quantity):
        return [Quantity(v, unit) for v in grid], unit
    if isinstance(current, int) and not isinstance(current, bool):
        return [int(round(v)) for v in grid], unit
    return grid, unit


def _sweep_point(payload):
    doc, path, value = payload
    report = scn.evaluate(scn.parse_scenario(scn.with_parameter(doc, path, value)))
    v = report.verdict
    return tuple(getattr(v, f) for f in SWEEP_FIELDS)


def run_sweep(doc, path, values, jobs=1):
    payloads = [(doc, path, v) for v in values]
    if jobs > 1 and len(values) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_point, payloads))  # map preserves order
    return [_sweep_point(p) for p in payloads]


def cmd_sweep(args):
    path = scn.resolve_scenario_path(args.scenario)
    doc = scn.decode_json(path.read_bytes())
    scn.parse_scenario(doc)
    values, unit = sweep_values(doc, args.vary, args.start, args.stop, args.steps, args.log)
    results = run_sweep(doc, args.vary, values, args.jobs)
    header = ("parameter", "value", "unit") + SWEEP_FIELDS
    rows = [(args.vary, v.value if isinstance(v, Quantity) else v, unit) + r
            for v, r in zip(values, results)]
    _emit(write_csv(header, rows), args.out)
    if args.plot:
        from .plotting import plot_sweep
        plot_sweep(rows, args.vary, unit, args.plot, y=args.y)
    return EXIT_OK


# -- spectrum-ingest -------------------------------------------------------------------

def cmd_spectrum_ingest(args):
    src = Path(args.csv)
    name = args.name or src.stem
    spectrum = env.load_solar_spectrum(src, name=name)
    lo, hi = spectrum.span_nm
    print(f"name: {name}")
    print(f"samples: {spectrum.wavelength_nm.size}")
    print(f"span: {fmt(lo)} - {fmt(hi)} nm")
    print(f"integrated irradiance: {fmt(spectrum.total_irradiance())} W m^-2")
    if args.validate_only:
        print("valid (not registered)")
        return EXIT_OK
    root = args.catalog_dir or os.environ.get(env.CATALOG_ENV)
    if not root:
        raise ValidationError(
            f"no catalog directory: pass --catalog-dir or set {env.CATALOG_ENV}")
    dest = Path(root) / "spectra" / f"{name}.csv"
    dest.parent.mkdir(parents=True, exist_ok=True)
    shutil.copyfile(src, dest)
    print(f"registered as {name!r} in {dest}")
    return EXIT_OK


# -- entry point ------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="qlink",
                                description="Quantum-channel feasibility over interstellar paths.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("budget", help="evaluate a scenario file or catalog scenario")
    b.add_argument("scenario")
    b.add_argument("--format", choices=("table", "csv", "json"), default="table")
    b.add_argument("--out", help="write to this file instead of stdout")
    b.set_defaults(func=cmd_budget)

    r = sub.add_parser("reproduce-paper", help="recompute the published reference numbers")
    r.add_argument("--case", default="all", help="case id or 'all'")
    r.add_argument("--format", choices=("table", "csv", "json"), default="table")
    r.add_argument("--out")
    r.set_defaults(func=cmd_reproduce)

    s = sub.add_parser("sweep", help="vary one scenario field and tabulate the verdict")
    s.add_argument("scenario")
    s.add_argument("--vary", required=True, help="field path, e.g. gravity_legs[0].r_receive")
    s.add_argument("--from", dest="start", required=True)
    s.add_argument("--to", dest="stop", required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--log", action="store_true", help="logarithmic spacing")
    s.add_argument("--out", help="CSV destination (default stdout)")
    s.add_argument("--plot", help="also render a PNG (needs matplotlib)")
    s.add_argument("--y", choices=SWEEP_FIELDS, default="survival", help="field to plot")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    i = sub.add_parser("spectrum-ingest", help="validate and register a spectrum CSV")
    i.add_argument("csv")
    i.add_argument("--validate-only", action="store_true")
    i.add_argument("--name")
    i.add_argument("--catalog-dir")
    i.set_defaults(func=cmd_spectrum_ingest)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
