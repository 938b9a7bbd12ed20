"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical or constraint
failure, 4 IO error.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .entanglement import cross_correlation, log_negativity_closed_form, wavepacket_negativity
from .experiments import (SCENARIOS, TABLE1_BETA1_UM, UNITS, Scenario, ScenarioError, SweepAxis,
                          _meta, builtin, pmap, run_scenario)
from .interference import (DEFAULT_TARGET_R, find_measurement_point, screen_pattern,
                           visibility_closed)
from .params import ConfigError, load_config, parse_length
from .propagation import PathLabel, free_gouy, slit_wavepacket
from .results import EmitError, ResultSet, emit, render

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("biphoton")


def _setup(args):
    if args.config:
        return load_config(args.config)
    return load_config({})


def _screen_grid(args) -> np.ndarray:
    n = args.grid or 2001
    if n < 2:
        raise ConfigError("--grid needs at least two points")
    return np.linspace(-4e-3, 4e-3, n)


def cmd_gouy(args) -> ResultSet:
    params, geom = _setup(args)
    uu = slit_wavepacket(params, geom, PathLabel.UU)
    dd = slit_wavepacket(params, geom, PathLabel.DD)
    return ResultSet({"zeta_uu_rad": [uu.zeta_slit], "zeta_dd_rad": [dd.zeta_slit],
                      "gouy_diff_rad": [abs(uu.zeta_slit - dd.zeta_slit)],
                      "zeta_free_rad": [float(free_gouy(params, geom.z + geom.z_tau))]},
                     _meta(Scenario("custom", params, geom), verb="gouy"))


def cmd_negativity(args) -> ResultSet:
    params, geom = _setup(args)
    uu = slit_wavepacket(params, geom, PathLabel.UU)
    cols = {"e_n": [wavepacket_negativity(uu)]}
    if not uu.coupled:
        cf = log_negativity_closed_form(uu)
        cols["e_n_closed_form"] = [cf.value]
        cols["closed_form_discrepancy"] = [cf.discrepancy]
    return ResultSet(cols, _meta(Scenario("custom", params, geom), verb="negativity"))


def cmd_pattern(args) -> ResultSet:
    params, geom = _setup(args)
    grid = _screen_grid(args)
    sp = screen_pattern(params, geom, grid, normalization=args.normalization)
    return ResultSet({"r_mm": grid * 1e3, "i4": sp.i4, "i2": sp.i2, "i2_prime": sp.i2_prime,
                      "ir": sp.ir, "vis": sp.vis},
                     _meta(Scenario("custom", params, geom), verb="pattern",
                           normalization=args.normalization))


def cmd_visibility(args) -> ResultSet:
    params, geom = _setup(args)
    grid = _screen_grid(args)
    sp = screen_pattern(params, geom, grid, normalization=args.normalization)
    cols = {"r_mm": grid * 1e3, "vis": sp.vis}
    if geom.symmetric:
        cols["vis_closed"] = visibility_closed(slit_wavepacket(params, geom, PathLabel.UU), grid)
    return ResultSet(cols, _meta(Scenario("custom", params, geom), verb="visibility"))


def cmd_correlations(args) -> ResultSet:
    params, geom = _setup(args)
    cols = {}
    for path in PathLabel:
        rep = cross_correlation(slit_wavepacket(params, geom, path))
        cols[f"rho_{path.value}"] = [rep.rho]
        cols[f"rho_{path.value}_moment"] = [rep.rho_moment]
        cols[f"rho_{path.value}_linear"] = [rep.rho_linear]
    return ResultSet(cols, _meta(Scenario("custom", params, geom), verb="correlations"))


def cmd_table1(args) -> ResultSet:
    if args.config:
        params, geom = load_config(args.config)
        s = builtin("table1", params, geom)
    else:
        s = builtin("table1")
    if args.n is None and args.target is None:
        return run_scenario(s)
    target = DEFAULT_TARGET_R if args.target is None else parse_length(args.target)
    rows = pmap(lambda b: find_measurement_point(s.params, replace(s.geom, beta1=b * 1e-6),
                                                 n=args.n, target=target,
                                                 both_signs=args.n is None), TABLE1_BETA1_UM)
    return ResultSet({
        "r_mm": [m.r_star * 1e3 for m in rows],
        "beta1_um": list(TABLE1_BETA1_UM),
        "gouy_diff_rad": [m.gouy_diff for m in rows],
        "e_n": [math.nan if m.e_n_linear is None else m.e_n_linear for m in rows],
    }, _meta(s, n=[m.n for m in rows], target_r_m=target))


def cmd_scenario(args) -> ResultSet:
    if args.config and args.id != "custom":
        params, geom = load_config(args.config)
        s = builtin(args.id, params, geom, grid=args.grid)
    elif args.id == "custom":
        params, geom = _setup(args)
        s = builtin("custom", params, geom, grid=args.grid)
    else:
        s = builtin(args.id, grid=args.grid)
    return run_scenario(s)


def cmd_sweep(args) -> ResultSet:
    params, geom = _setup(args)
    if args.var not in UNITS:
        raise ConfigError(f"cannot sweep {args.var!r}; choose from {sorted(UNITS)}")
    axis = SweepAxis(args.var, parse_length(args.start), parse_length(args.stop), args.num)
    return run_scenario(Scenario("custom", params, geom, axis))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with source and slit parameters")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    common.add_argument("--grid", type=int, help="number of screen samples")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="biphoton", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    sub.add_parser("gouy", parents=[common], help="Gouy phases of the same-slit paths")
    sub.add_parser("negativity", parents=[common], help="logarithmic negativity of the upper path")
    for name, helptext in (("pattern", "screen intensities"), ("visibility", "fringe visibility")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--normalization", choices=("exact", "unit"), default="exact")
    sub.add_parser("correlations", parents=[common], help="position cross-correlations per path")
    t = sub.add_parser("table1", parents=[common], help="Gouy difference vs upper slit width")
    t.add_argument("--n", type=int, help="even integer of the n*pi constraint")
    t.add_argument("--target", help="preferred measurement position, e.g. -0.12mm")
    s = sub.add_parser("scenario", parents=[common], help="run a built-in scenario")
    s.add_argument("id", choices=SCENARIOS)
    w = sub.add_parser("sweep", parents=[common], help="sweep one parameter")
    w.add_argument("--var", required=True)
    w.add_argument("--start", required=True)
    w.add_argument("--stop", required=True)
    w.add_argument("--num", type=int, default=51)
    return parser


COMMANDS = {"gouy": cmd_gouy, "negativity": cmd_negativity, "pattern": cmd_pattern,
            "visibility": cmd_visibility, "correlations": cmd_correlations, "table1": cmd_table1,
            "scenario": cmd_scenario, "sweep": cmd_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        rs = COMMANDS[args.verb](args)
        if args.out:
            emit(rs, args.format, args.out)
        else:
            sys.stdout.write(render(rs, args.format))
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EmitError, OSError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, ScenarioError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
