"""Command-line front end.

    bitension tension   --catalog f-k --a 2 --k 1
    bitension residual  --catalog torus-quarter-pi --kappa 1 --check-routes
    bitension sweep     --a 1 --k 1 --a1 0
    bitension solve     --family mv --C3 1
    bitension curvature --A 1 --C0 0 --C 1

Tables go to ``--out`` (or stdout); summaries and verdicts go to stderr.
Exit status: 0 success, 2 usage or configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import classify, fields, funckit, geometry, solutions
from .errors import BitensionError, GridError
from .funckit import GridSpec

log = logging.getLogger("bitension")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

FORMATS = ("csv", "json", "gnuplot")
SIGMAS = {
    "sin": (lambda: funckit.sine((0.0, math.pi)), GridSpec(0.0, math.pi, 2001, 1e-3)),
    "flat": (lambda: funckit.constant(1.0), GridSpec(0.0, 2 * math.pi, 2001, 1e-3)),
    "polar": (lambda: funckit.identity((0.0, math.inf)), GridSpec(0.0, 3.0, 2001, 1e-3)),
}
SIGMA_METRICS = {
    "sin": geometry.sphere_domain,
    "flat": geometry.flat_metric,
    "polar": geometry.polar_plane,
}
QUADRATURE_FAMILIES = ("quadrature", "p11", "pb")


class ConfigError(Exception):
    """Bad user input detected before any numerics run."""


# ---------------------------------------------------------------------------
# output


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, str):
        return v
    v = float(v)
    return v if math.isfinite(v) else repr(v)


def render(columns: Sequence[str], rows, fmt: str, summary: dict | None = None,
           command: str = "") -> str:
    """Serialize a table; rows are sequences aligned with ``columns``."""
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_cell(v) for v in row) for row in rows]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        doc = {
            "command": command,
            "columns": list(columns),
            "rows": [[_json_value(v) for v in row] for row in rows],
            "summary": {k: _json_value(v) for k, v in (summary or {}).items()},
        }
        return json.dumps(doc, indent=1) + "\n"
    if fmt == "gnuplot":
        blocks = []
        for j, name in enumerate(columns[1:], start=1):
            body = [f"# {columns[0]} {name}"]
            body += [f"{_cell(row[0])} {_cell(row[j])}" for row in rows]
            blocks.append("\n".join(body))
        return "\n\n\n".join(blocks) + "\n"
    raise ConfigError(f"unknown format {fmt!r}")


def _emit(args, columns, rows, summary=None):
    text = render(columns, rows, args.format, summary, args.command)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for key, value in (summary or {}).items():
        print(f"{key}: {_cell(value)}", file=sys.stderr)


# ---------------------------------------------------------------------------
# configuration


def _grid(args, default: GridSpec) -> GridSpec:
    return GridSpec(
        default.lo if args.lo is None else args.lo,
        default.hi if args.hi is None else args.hi,
        default.n if args.n is None else args.n,
        default.eps if args.eps is None else args.eps,
    )


def _constants(args) -> dict:
    return {f"C{i}": getattr(args, f"C{i}") for i in range(5)}


def _quadrature(args, family: str):
    sigma_name = args.sigma
    if family == "pb":
        sigma_name = "sin"
    if sigma_name not in SIGMAS:
        raise ConfigError(f"unknown warp {sigma_name!r}; choose from {', '.join(SIGMAS)}")
    make_sigma, default_grid = SIGMAS[sigma_name]
    grid = _grid(args, default_grid)
    sigma = make_sigma()
    C = {k: (0.0 if v is None else v) for k, v in _constants(args).items()}
    tol = funckit.DEFAULT_TOL
    if family == "quadrature":
        sol = solutions.build_quadrature_profile(sigma, C["C1"], C["C2"], C["C3"], C["C4"],
                                                 grid, tol=tol)
    elif family == "p11":
        k = 1.0 if args.k is None else args.k
        sol = solutions.build_p11_profile(sigma, C["C0"], C["C1"], C["C2"], C["C3"], C["C4"],
                                          k, grid, tol=tol)
    else:
        sol = solutions.build_p11_profile(sigma, 0.5, 0.0, 1.0, 0.0, 1.0, 1.0, grid, tol=tol)
    return sol, grid, sigma_name


def _catalog_map(args):
    name = args.catalog or args.family
    if not name:
        raise ConfigError("select a map with --catalog NAME")
    params = dict(_constants(args), a=args.a, k=args.k, a1=args.a1, kappa=args.kappa, C=args.C)
    try:
        spec = solutions.catalog_entry(name, **params)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from exc
    m = spec.build()
    if args.c is not None:
        m = dataclasses.replace(m, c=args.c)
    return m, _grid(args, spec.grid), spec


def _selected_map(args):
    """``(map, grid, expected)``; grid profiles are evaluated on their own grid."""
    family = solutions.normalize_name(args.family) if args.family else None
    if family in ("quadrature", "p11") and not args.catalog:
        sol, grid, sigma_name = _quadrature(args, family)
        m = solutions.quadrature_map(sol, SIGMA_METRICS[sigma_name]())
        if family == "p11":
            m = dataclasses.replace(m, k=1.0 if args.k is None else args.k)
        return m, grid, None
    m, grid, spec = _catalog_map(args)
    return m, grid, spec.expected


def _is_grid_profile(m) -> bool:
    return isinstance(m.profile, funckit.NumericProfile)


def _radii(m, grid):
    return None if _is_grid_profile(m) else grid.points


# ---------------------------------------------------------------------------
# subcommands


def cmd_tension(args) -> int:
    m, grid, _ = _selected_map(args)
    r = _radii(m, grid)
    x, y = fields.tension(m, r, backend=args.backend)
    pts = grid.points
    _emit(args, ("r", "x", "y"), zip(pts, x, y),
          {"sup_tension": fields._sup(x, y), "in_range": m.in_target_range(r)})
    return EXIT_OK


def cmd_residual(args) -> int:
    m, grid, expected = _selected_map(args)
    tol = args.tol if args.tol is not None else fields.HARMONIC_TOL
    rep = fields.residual_report(m, None if _is_grid_profile(m) else grid, "simplified",
                                 tol, tol, backend=args.backend)
    f = fields.field_data(m, _radii(m, grid), "simplified", backend=args.backend)
    cols = ["r", "x", "y", "res1", "res2"]
    data = [f.r, f.x, f.y, f.res1, f.res2]
    summary = {
        "sup_tension": rep.sup_tension,
        "sup_residual": rep.sup_norm,
        "tension_excess": rep.tension_excess,
        "residual_excess": rep.residual_excess,
        "in_range": rep.in_range,
    }
    if args.check_routes:
        g = fields.field_data(m, _radii(m, grid), "term-sum", backend=args.backend)
        cols += ["res1_termsum", "res2_termsum"]
        data += [g.res1, g.res2]
        summary["route_agreement"] = fields.routes_agree(m, _radii(m, grid), backend=args.backend)
    summary["verdict"] = rep.verdict
    if expected is not None:
        summary["expected"] = expected
    _emit(args, cols, zip(*data), summary)
    return EXIT_OK


def cmd_sweep(args) -> int:
    a = args.a if args.a is not None else classify.DEFAULT_A
    k = args.k if args.k is not None else classify.DEFAULT_K
    a1 = args.a1 if args.a1 is not None else classify.DEFAULT_A1
    if any(float(v) == 0.0 for v in a):
        raise ConfigError("a = 0 is excluded from the linear family")
    grid = _grid(args, classify.DEFAULT_GRID)
    tol = args.tol if args.tol is not None else fields.HARMONIC_TOL
    rep = classify.classify_sweep(a, k, a1, grid, tol, tol, workers=args.workers)
    summary = {
        "tuples": len(rep.rows),
        "harmonic": len(rep.with_verdict("harmonic")),
        "proper_biharmonic": len(rep.with_verdict("proper-biharmonic")),
        "neither": len(rep.with_verdict("neither")),
        "max_bridge_error": rep.max_bridge_error,
    }
    if args.format == "json":
        doc = dict(rep.to_dict(), command="sweep", summary=summary)
        text = json.dumps(doc, indent=1) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        for key, value in summary.items():
            print(f"{key}: {_cell(value)}", file=sys.stderr)
        return EXIT_OK
    rows = [[getattr(r, c) for c in classify.COLUMNS] for r in rep.rows]
    _emit(args, classify.COLUMNS, rows, summary)
    return EXIT_OK


def cmd_solve(args) -> int:
    family = solutions.normalize_name(args.family or "")
    if not family:
        raise ConfigError("select a family with --family")
    if family in QUADRATURE_FAMILIES:
        sol, grid, _ = _quadrature(args, family)
        pts = grid.points
        prof = sol.profile
        drho = prof.integrand(pts) if prof.integrand is not None else prof.derivative(1)
        summary = {"proper": sol.proper}
        if family == "pb":
            summary["max_deviation_from_closed_form"] = float(
                np.max(np.abs(prof.values - solutions.pb_profile()(pts))))
        _emit(args, ("r", "rho", "drho", "x"), zip(pts, prof.values, drho, sol.x), summary)
        return EXIT_OK
    if family in ("mv", "example-cot", "stereographic-north", "stereographic-south"):
        args.catalog = family
        m, grid, spec = _catalog_map(args)
        pts = grid.points
        rho, drho = m.profile.jet(pts, 1)
        x, _ = fields.tension(m, pts)
        _emit(args, ("r", "rho", "drho", "x"), zip(pts, rho, drho, x),
              {"expected": spec.expected, "in_range": m.in_target_range(pts)})
        return EXIT_OK
    raise ConfigError(f"unknown family {args.family!r}; choose from "
                      f"{', '.join(QUADRATURE_FAMILIES + ('mv', 'example-cot', 'stereographic-north', 'stereographic-south'))}")


def cmd_curvature(args) -> int:
    if args.sphere:
        metric = geometry.sphere_target()
        grid = _grid(args, GridSpec(0.0, math.pi, 201, 1e-3))
        rho = grid.points
        K = geometry.gauss_curvature(metric, rho)
        closed = np.ones_like(rho)
    else:
        A = 1.0 if args.A is None else args.A
        C0 = 0.0 if args.C0 is None else args.C0
        C = 1.0 if args.C is None else args.C
        metric = geometry.quadratic_warp(A, C0, C)
        lo, hi = metric.interval
        default = GridSpec(max(-1.0, lo + 1e-3), min(1.0, hi - 1e-3), 201, 0.0)
        grid = _grid(args, default)
        rho = grid.points
        K = geometry.gauss_curvature(metric, rho)
        closed = geometry.quadratic_warp_curvature(C0, C, rho, A)
    _emit(args, ("rho", "K", "K_closed"), zip(rho, K, closed),
          {"max_deviation": float(np.max(np.abs(np.asarray(K) - closed)))})
    return EXIT_OK


COMMANDS = {
    "tension": cmd_tension,
    "residual": cmd_residual,
    "sweep": cmd_sweep,
    "solve": cmd_solve,
    "curvature": cmd_curvature,
}


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, multi: bool = False) -> None:
    nargs = "+" if multi else None
    p.add_argument("--catalog", help=f"catalog map: {', '.join(solutions.CATALOG_NAMES)}")
    p.add_argument("--family", help="solution family (solve) or map family")
    p.add_argument("--sigma", default="sin", help="domain warp for quadrature families: sin, flat, polar")
    p.add_argument("--a", type=float, nargs=nargs)
    p.add_argument("--k", type=float, nargs=nargs)
    p.add_argument("--a1", type=float, nargs=nargs)
    p.add_argument("--c", type=float)
    p.add_argument("--kappa", type=float)
    for i in range(5):
        p.add_argument(f"--C{i}", type=float, dest=f"C{i}")
    p.add_argument("--A", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--tol", type=float, help="verdict threshold for tension and residual")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--check-routes", action="store_true", dest="check_routes",
                   help="also report the term-sum residual route")
    p.add_argument("--sphere", action="store_true", help="curvature of the round sphere")
    p.add_argument("--backend", choices=("python", "compiled"), default=None)
    p.add_argument("--workers", type=int, default=1, help="threads for sweep rows")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bitension", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "tension": "tension components on a grid",
        "residual": "bitension residuals, sup norms and verdict",
        "sweep": "classify the linear sphere family over a parameter grid",
        "solve": "emit a solution profile and its tension",
        "curvature": "Gauss curvature of a target metric",
    }
    for name, text in helps.items():
        _common(sub.add_parser(name, help=text), multi=(name == "sweep"))
    return parser


def _configure_logging() -> None:
    level = os.environ.get("BITENSION_LOG", "WARNING").strip().upper()
    value = logging.getLevelName(level)
    if not isinstance(value, int):
        value = int(level) if level.isdigit() else logging.WARNING
    logging.basicConfig(level=value, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_CONFIG
    log.debug("arguments: %s", vars(args))
    if args.backend:
        from . import kernels

        if args.backend not in kernels.BACKENDS:
            print(f"error: backend {args.backend!r} is not available", file=sys.stderr)
            return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, GridError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BitensionError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
