"""Command-line front end.

    ddr run --config cfg.json [--backend NAME|all] [--tol T] [--out path.csv]
    ddr probe --config cfg.json --kmax K [--x X]

The configuration is a JSON document::

    {
      "mass_scale": 0.938,
      "parity": "even",
      "terms": [{"c": 1.0, "lambda": 0.5, "n": 0}],
      "grid": {"start": 2.0, "stop": 100.0, "points": 10, "spacing": "log"},
      "backends": ["oracle", "closed"],
      "tolerances": {"series_rel_tol": 1e-12, "quad_rel_tol": 1e-10},
      "output": "out.csv"
    }

Grid values are energy ratios E/m and must exceed 1.001: Re G diverges
logarithmically as E approaches m.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .amplitude import AmplitudeSpec, Parity, validate_term
from .engine import (DEFAULT_TRUNCATION, Backend, TruncationSpec, evaluate,
                     im_total, tangent_series_probe)
from .errors import DDRError, InvalidLogPower, LambdaOutOfRange, SchemaError
from .idr import MIN_RATIO_OFFSET, QuadOptions
from .special import SeriesControl

ALL_BACKENDS = [b.value for b in Backend]
MIN_START = 1 + MIN_RATIO_OFFSET


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    points: int
    spacing: str = "log"

    def values(self):
        if self.points == 1:
            return [self.start]
        if self.spacing == "log":
            return list(np.geomspace(self.start, self.stop, self.points))
        return list(np.linspace(self.start, self.stop, self.points))


@dataclass(frozen=True)
class RunConfig:
    spec: AmplitudeSpec
    grid: Grid
    backends: tuple = ("oracle", "closed")
    ctl: SeriesControl = field(default_factory=SeriesControl)
    quad: QuadOptions = field(default_factory=QuadOptions)
    trunc: TruncationSpec = DEFAULT_TRUNCATION
    pole_guard: float = 1e-6
    output_path: str | None = None


def _require(doc, key, path, types):
    if key not in doc:
        raise SchemaError(f"{path}{key}", "missing required field")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, types):
        raise SchemaError(f"{path}{key}", f"expected {_typename(types)}, got {value!r}")
    return value


def _typename(types):
    if isinstance(types, tuple):
        return " or ".join(t.__name__ for t in types)
    return types.__name__


def _backends(value, path="backends"):
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list) or not value:
        raise SchemaError(path, "expected a non-empty list of backend names")
    out = []
    for i, name in enumerate(value):
        if name == "all":
            out.extend(b for b in ALL_BACKENDS if b not in out)
        elif name in ALL_BACKENDS:
            if name not in out:
                out.append(name)
        else:
            raise SchemaError(f"{path}[{i}]",
                              f"unknown backend {name!r}; choose from {ALL_BACKENDS} or 'all'")
    return tuple(out)


def parse_config(text):
    """Validate a JSON configuration document and build a :class:`RunConfig`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("", "top level must be an object")

    mass = _require(doc, "mass_scale", "", (int, float))
    if not mass > 0:
        raise SchemaError("mass_scale", "must be positive")
    parity = _require(doc, "parity", "", str)
    if parity not in ("even", "odd"):
        raise SchemaError("parity", f"must be 'even' or 'odd', got {parity!r}")

    raw_terms = _require(doc, "terms", "", list)
    if not raw_terms:
        raise SchemaError("terms", "at least one term is required")
    terms = []
    for i, raw in enumerate(raw_terms):
        path = f"terms[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError(path, "expected an object")
        c = _require(raw, "c", path + ".", (int, float))
        lam = _require(raw, "lambda", path + ".", (int, float))
        n = _require(raw, "n", path + ".", (int, float))
        try:
            terms.append(validate_term(c, lam, n))
        except LambdaOutOfRange as exc:
            raise SchemaError(f"{path}.lambda", str(exc)) from exc
        except InvalidLogPower as exc:
            raise SchemaError(f"{path}.n", str(exc)) from exc
    spec = AmplitudeSpec(tuple(terms), Parity(parity), float(mass))

    g = _require(doc, "grid", "", dict)
    start = _require(g, "start", "grid.", (int, float))
    stop = _require(g, "stop", "grid.", (int, float))
    points = _require(g, "points", "grid.", int)
    spacing = g.get("spacing", "log")
    if not start > MIN_START:
        raise SchemaError("grid.start", f"grid.start must exceed {MIN_START:g}")
    if points < 1:
        raise SchemaError("grid.points", "must be >= 1")
    if points > 1 and not stop > start:
        raise SchemaError("grid.stop", "must exceed grid.start")
    if spacing not in ("log", "linear"):
        raise SchemaError("grid.spacing", "must be 'log' or 'linear'")
    grid = Grid(float(start), float(stop), points, spacing)

    backends = _backends(doc.get("backends", ["oracle", "closed"]))

    tol = doc.get("tolerances", {}) or {}
    if not isinstance(tol, dict):
        raise SchemaError("tolerances", "expected an object")
    known = {"series_rel_tol", "quad_rel_tol", "max_terms", "k_max", "pole_guard"}
    for key in tol:
        if key not in known:
            raise SchemaError(f"tolerances.{key}", f"unknown field; expected one of {sorted(known)}")
    try:
        ctl = SeriesControl(rel_tol=float(tol.get("series_rel_tol", 1e-12)),
                            max_terms=int(tol.get("max_terms", 10 ** 6)))
        quad = QuadOptions(rel_tol=float(tol.get("quad_rel_tol", 1e-10)))
        trunc = replace(DEFAULT_TRUNCATION, ctl=ctl,
                        k_max=int(tol.get("k_max", DEFAULT_TRUNCATION.k_max)))
    except DDRError as exc:
        raise SchemaError("tolerances", str(exc)) from exc
    pole_guard = float(tol.get("pole_guard", 1e-6))
    if not pole_guard > 0:
        raise SchemaError("tolerances.pole_guard", "must be positive")

    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise SchemaError("output", "expected a path string")
    return RunConfig(spec, grid, backends, ctl, quad, trunc, pole_guard, output)


def _fmt(v):
    return format(v, ".17g")


def csv_header(backends):
    cols = ["x", "im_g"] + [f"re_g_{b}" for b in backends]
    if "oracle" in backends:
        for b in backends:
            if b != "oracle":
                cols += [f"abs_diff_{b}", f"rel_diff_{b}"]
    return cols


def compute_rows(config, log=None):
    """Evaluate every backend on the grid.

    Returns ``(header, rows, diverged)`` where ``rows`` are lists of floats
    and ``diverged`` lists ``(x, backend, diagnostics)`` for every
    non-converged evaluation.
    """
    backends = config.backends
    header = csv_header(backends)
    rows, diverged = [], []
    for x in config.grid.values():
        x = float(x)
        values = {}
        for b in backends:
            try:
                res = evaluate(config.spec, x, b, ctl=config.ctl, trunc=config.trunc,
                               quad=config.quad, pole_guard=config.pole_guard)
            except DDRError as exc:
                raise DDRError(f"backend {b} at x={x!r}: {exc}") from exc
            values[b] = res.value
            if not res.converged:
                diverged.append((x, b, res.diagnostics))
        row = [x, im_total(config.spec, x)] + [values[b] for b in backends]
        if "oracle" in backends:
            ref = values["oracle"]
            for b in backends:
                if b != "oracle":
                    d = abs(values[b] - ref)
                    row += [d, d / max(1.0, abs(ref))]
        rows.append(row)
    return header, rows, diverged


def write_csv(path_or_file, header, rows):
    def _write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "w", encoding="utf-8", newline="") as fh:
            _write(fh)
    else:
        _write(path_or_file)


def _describe_divergence(x, backend, diag):
    parts = []
    for i, d in enumerate((diag or {}).get("per_term", [])):
        if d and d.get("converged") is False:
            trace = d.get("trace") or d.get("energy_trace") or []
            tail = ", ".join(f"{v:.3g}" for v in trace[-4:])
            parts.append(f"term {i} (last |terms|: {tail})")
    where = "; ".join(parts) if parts else "see diagnostics"
    return f"divergence: backend {backend} at x={x:.17g}: series non-decaying: {where}"


def run(config, stdout=None, stderr=None):
    """Evaluate the grid and write the CSV; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        header, rows, diverged = compute_rows(config)
        if config.output_path:
            write_csv(config.output_path, header, rows)
        else:
            write_csv(stdout, header, rows)
    except (DDRError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    for x, b, diag in diverged:
        print(_describe_divergence(x, b, diag), file=stderr)
    return 2 if diverged else 0


def probe_report(config, k_max, x=None):
    """Text report of the tangent-series probe for every term."""
    x = config.grid.start if x is None else float(x)
    out = io.StringIO()
    print(f"tangent-series probe at E/m = {x:.17g}, k = 0..{k_max}", file=out)
    for i, term in enumerate(config.spec.terms):
        pr = tangent_series_probe(term, x, k_max)
        print(f"term {i}: c={term.c:g} lambda={term.lam:g} n={term.n}: {pr.describe()}",
              file=out)
        mags = " ".join(f"{abs(e):.6g}" for e in pr.entries)
        print(f"  |Im G^(2k+1)|: {mags}", file=out)
    return out.getvalue()


def build_parser():
    p = argparse.ArgumentParser(
        prog="ddr",
        description="Real parts of forward amplitudes from parametrised imaginary "
                    "parts, by dispersion integral and derivative relations.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="evaluate a grid of energies and write CSV",
                       description="Evaluate Re G on the configured E/m grid. "
                       "Grid values must exceed 1.001 (Re G diverges as E -> m). "
                       "Exit status: 0 ok, 1 error, 2 some series did not converge.")
    r.add_argument("--config", required=True, help="JSON configuration file")
    r.add_argument("--backend", choices=ALL_BACKENDS + ["all"],
                   help="override the configured backends")
    r.add_argument("--tol", type=float, help="relative tolerance for series and quadrature")
    r.add_argument("--out", help="CSV output path (default: config output, else stdout)")

    pr = sub.add_parser("probe", help="report convergence of the tangent series")
    pr.add_argument("--config", required=True)
    pr.add_argument("--kmax", type=int, required=True)
    pr.add_argument("--x", type=float, help="energy ratio (default: grid.start)")
    return p


def _load(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = _load(args.config)
    except (DDRError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.command == "probe":
        if args.kmax < 0:
            print("error: --kmax must be >= 0", file=sys.stderr)
            return 1
        try:
            sys.stdout.write(probe_report(config, args.kmax, args.x))
        except DDRError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        return 0
    if args.backend:
        config = replace(config, backends=_backends(args.backend))
    if args.tol is not None:
        if not args.tol > 0:
            print("error: --tol must be positive", file=sys.stderr)
            return 1
        ctl = replace(config.ctl, rel_tol=args.tol)
        config = replace(config, ctl=ctl, quad=replace(config.quad, rel_tol=args.tol),
                         trunc=replace(config.trunc, ctl=ctl))
    if args.out:
        config = replace(config, output_path=args.out)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
