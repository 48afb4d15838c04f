"""Command line interface: reproducible runs of every tier.

    kinsir {ode|macro|kinetic|converge|coeffs} --config FILE [--out DIR]

Each run writes headered CSV files into the output directory. The header
records the toolkit version, the subcommand, and the fully resolved
configuration, so identical configs yield byte-identical files. Errors
exit with one code per failure class and a single line on stderr.
"""

import argparse
import os
import sys

from . import __version__
from .config import load_config
from .convergence import run_convergence_study
from .errors import (
    CflViolationError,
    ConsistencyError,
    DegenerateFitError,
    KinsirError,
    NegativeStateError,
    NegativityError,
    OddNodeCountError,
    ParseError,
    RegimeError,
    ResidualError,
    StepSizeError,
    ValidationError,
)
from .grids import SpatialGrid
from .kinetic import init_local_equilibrium, run_kinetic
from .macro import build_macro_coefficients, run_macro
from .sir import SirState, equilibria, integrate_sir
from .velocity import build_velocity_grid, species_equilibria

EXIT_CODES = {
    ParseError: 2,
    ValidationError: 3,
    NegativeStateError: 4,
    OddNodeCountError: 5,
    ResidualError: 6,
    ConsistencyError: 7,
    CflViolationError: 8,
    NegativityError: 9,
    StepSizeError: 10,
    RegimeError: 11,
    DegenerateFitError: 12,
}


def _fmt(value):
    return f"{value:.17g}"


def _header(subcommand, config):
    lines = [f"kinsir {__version__}", f"subcommand = {subcommand}"]
    lines.extend(config.resolved_lines())
    return ["# " + line for line in lines]


def _write_csv(path, header, columns, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in header:
            handle.write(line + "\n")
        handle.write(columns + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")


def _write_snapshots(path, header, snapshots, grid):
    rows = (
        (snap.time, x, c, s, u)
        for snap in snapshots
        for x, c, s, u in zip(grid.centers, snap.c, snap.s, snap.u)
    )
    _write_csv(path, header, "time,x,c,s,u", rows)


def _cmd_ode(config, out_dir):
    header = _header("ode", config)
    trajectory = integrate_sir(
        SirState(config.c0, config.s0, config.u0),
        config.params, config.t_final, config.dt,
    )
    rows = (
        (t, row[0], row[1], row[2])
        for t, row in zip(trajectory.times, trajectory.states)
    )
    _write_csv(os.path.join(out_dir, "trajectory.csv"), header, "t,c,s,u", rows)

    report = equilibria(config.params)
    quantities = [("r0", report.r0)]
    quantities += [(f"q0_{f}", v) for f, v in
                   zip("csu", (report.q0.u, report.q0.v, report.q0.w))]
    if report.qstar is not None:
        quantities += [(f"qstar_{f}", v) for f, v in
                       zip("csu", (report.qstar.u, report.qstar.v, report.qstar.w))]
    path = os.path.join(out_dir, "equilibrium.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in header:
            handle.write(line + "\n")
        handle.write("quantity,value\n")
        for name, value in quantities:
            handle.write(f"{name},{_fmt(value)}\n")
    return ["trajectory.csv", "equilibrium.csv"]


def _cmd_macro(config, out_dir):
    header = _header("macro", config)
    grid = SpatialGrid(config.length, config.n_cells)
    vgrid = build_velocity_grid(config.params.vmax, config.n_nodes)
    coeff = build_macro_coefficients(config.params, vgrid)
    snapshots = run_macro(
        config.profile.build(grid), coeff, config.t_final,
        snapshot_times=list(config.snapshot_times) or None,
        dt_max=config.dt_max or None,
    )
    _write_snapshots(os.path.join(out_dir, "macro_snapshots.csv"),
                     header, snapshots, grid)
    return ["macro_snapshots.csv"]


def _cmd_kinetic(config, out_dir):
    header = _header("kinetic", config)
    grid = SpatialGrid(config.length, config.n_cells)
    vgrid = build_velocity_grid(config.params.vmax, config.n_nodes)
    eqs = species_equilibria(vgrid)
    state = init_local_equilibrium(
        config.profile.build(grid), eqs, vgrid, config.epsilon
    )
    snapshots, _ = run_kinetic(
        state, config.params, eqs, config.t_final,
        snapshot_times=list(config.snapshot_times) or None, cfl=config.cfl,
    )
    _write_snapshots(os.path.join(out_dir, "kinetic_moments.csv"),
                     header, snapshots, grid)
    return ["kinetic_moments.csv"]


def _cmd_converge(config, out_dir):
    header = _header("converge", config)
    report = run_convergence_study(
        config.params, config.profile, config.eps_list, config.t_final,
        snapshot_times=list(config.snapshot_times) or None,
        length=config.length, n_cells=config.n_cells, n_nodes=config.n_nodes,
        ref_refine=config.ref_refine, cfl=config.cfl,
    )
    path = os.path.join(out_dir, "convergence.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in header + report.to_lines():
            handle.write(line + "\n")
    orders = " ".join(f"{f}={report.orders[f]:.3f}" for f in ("c", "s", "u"))
    print(f"converge: regime={report.regime} orders {orders} "
          f"estimated={report.estimated_order:.3f}")
    return ["convergence.csv"]


def _cmd_coeffs(config, out_dir):
    header = _header("coeffs", config)
    vgrid = build_velocity_grid(config.params.vmax, config.n_nodes)
    coeff = build_macro_coefficients(config.params, vgrid)
    rows = [("Dc", coeff.Dc), ("Ds", coeff.Ds), ("Du", coeff.Du),
            ("chi", coeff.chi)]
    path = os.path.join(out_dir, "coefficients.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in header:
            handle.write(line + "\n")
        handle.write("name,value\n")
        for name, value in rows:
            handle.write(f"{name},{_fmt(value)}\n")
    return ["coefficients.csv"]


_COMMANDS = {
    "ode": _cmd_ode,
    "macro": _cmd_macro,
    "kinetic": _cmd_kinetic,
    "converge": _cmd_converge,
    "coeffs": _cmd_coeffs,
}


def dispatch(subcommand, config, out_dir):
    """Run one subcommand; returns the list of files written."""
    os.makedirs(out_dir, exist_ok=True)
    return _COMMANDS[subcommand](config, out_dir)


def _apply_thread_cap():
    threads = os.environ.get("KINSIR_THREADS")
    if threads is None:
        return
    if not threads.isdigit() or int(threads) < 1:
        raise ValidationError("KINSIR_THREADS must be a positive integer")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = threads


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="kinsir",
        description="Virus dynamics across kinetic and macroscopic scales.",
    )
    parser.add_argument("--version", action="version",
                        version=f"kinsir {__version__}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    help_lines = {
        "ode": "integrate the virus ODE system and report its equilibria",
        "macro": "run the chemotaxis-reaction-diffusion solver",
        "kinetic": "run the velocity-jump solver and emit moments",
        "converge": "run a kinetic-to-limit convergence study",
        "coeffs": "print the derived transport coefficients",
    }
    for name, text in help_lines.items():
        sub = subparsers.add_parser(name, help=text)
        sub.add_argument("--config", required=True, help="key = value file")
        sub.add_argument("--out", default=".", help="output directory")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        _apply_thread_cap()
        config = load_config(args.config)
        written = dispatch(args.subcommand, config, args.out)
    except KinsirError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CODES.get(type(exc), 1)
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not raises
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for name in written:
        print(f"wrote {os.path.join(args.out, name)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
