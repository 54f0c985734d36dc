"""Command-line entry point.

Subcommands: ``basis`` (dimension / state dump), ``evolve`` (single-
configuration trajectory CSV), ``spectrum`` (eigenvalue/overlap CSV),
``run`` (disorder-averaged experiments from a preset or config file),
``preset-list``, and ``validate`` (self-test battery).  Usage and
configuration errors exit 2; numerical failures exit 1.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, ensemble, runio, selfcheck
from .basis import enumerate_full, enumerate_restricted
from .disorder import sample_configuration
from .dynamics import TimeGrid, propagate, spectrum_overlap
from .hamiltonians import BlockadeHamiltonian, LongRangeHamiltonian
from .lattice import LatticeSpec, build_blockade_graph
from .observables import excitation_series, site_occupation_series


def _add_lattice_args(p: argparse.ArgumentParser) -> None:
    geom = p.add_mutually_exclusive_group(required=True)
    geom.add_argument("--chain", type=int, metavar="N", help="chain with N sites")
    geom.add_argument("--grid", type=int, nargs=2, metavar=("ROWS", "COLS"), help="open rectangular grid")
    p.add_argument("--periodic", action="store_true", help="wrap the chain boundary")
    p.add_argument("--blockade-range", type=int, default=1, metavar="B")


def _lattice_from_args(args) -> LatticeSpec:
    if args.chain is not None:
        boundary = "periodic" if args.periodic else "open"
        return LatticeSpec("chain", args.chain, boundary, args.blockade_range)
    if args.periodic:
        raise ValueError("grids are open-boundary only")
    return LatticeSpec("grid", tuple(args.grid), "open", args.blockade_range)


def _add_single_config_args(p: argparse.ArgumentParser) -> None:
    _add_lattice_args(p)
    p.add_argument("--lambda", dest="lam", default="inf", metavar="LAM",
                   help="coupling Poisson mean; 'inf' for the uniform limit")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--index", type=int, default=0, help="configuration index under the seed")
    p.add_argument("--hamiltonian", choices=("blockade", "longrange"), default="blockade")
    p.add_argument("--interaction", type=float, default=None, metavar="D",
                   help="nearest-neighbor interaction strength (longrange only)")
    p.add_argument("--backend", choices=("auto", "spectral", "krylov"), default="auto")


def _single_config_ham(args):
    lattice = _lattice_from_args(args)
    lam = runio._parse_lambda(args.lam)
    config = sample_configuration(lattice.n_sites, lam, args.seed, args.index)
    graph = build_blockade_graph(lattice)
    if args.hamiltonian == "blockade":
        if args.interaction is not None:
            raise ValueError("--interaction only applies to the longrange model")
        ham = BlockadeHamiltonian(enumerate_restricted(graph), graph, config)
    else:
        if lattice.kind != "chain":
            raise ValueError("the long-range model is defined on chains only")
        if args.interaction is None:
            raise ValueError("the longrange model needs --interaction")
        ham = LongRangeHamiltonian(enumerate_full(lattice.n_sites), config,
                                   args.interaction, lattice.boundary)
    meta = {"lattice": lattice, "lam": lam, "config": config}
    return ham, meta


def _emit_table(args, header: list[str], rows: list[list[str]], meta: dict) -> None:
    if args.out is None:
        print(",".join(header))
        for row in rows:
            print(",".join(row))
        return
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = runio.write_csv(path, header, rows)
    spec_dict = {
        "lattice": {
            "kind": meta["lattice"].kind,
            "sites": meta["lattice"].sites,
            "boundary": meta["lattice"].boundary,
            "blockade_range": meta["lattice"].blockade_range,
        },
        "lambda": "inf" if np.isinf(meta["lam"]) else meta["lam"],
        "index": meta["config"].index,
        "subcommand": args.command,
    }
    runio.write_provenance(path, data, spec_dict, meta["config"].master_seed, __version__)
    print(path)


def cmd_basis(args) -> int:
    lattice = _lattice_from_args(args)
    graph = build_blockade_graph(lattice)
    basis = enumerate_restricted(graph) if not args.full else enumerate_full(lattice.n_sites)
    print(basis.dim)
    if args.states:
        for line in basis.to_strings():
            print(line)
    return 0


def cmd_evolve(args) -> int:
    ham, meta = _single_config_ham(args)
    grid = TimeGrid(t_max=args.t_max, dt=args.dt)
    traj = propagate(ham, grid, backend=args.backend)
    pex = excitation_series(traj)
    header = ["t", "pex"]
    columns = [traj.times, pex]
    if args.per_site:
        occ = site_occupation_series(traj)
        header += [f"pe_{k}" for k in range(traj.basis.n_sites)]
        columns += [occ[:, k] for k in range(traj.basis.n_sites)]
    rows = [[runio.fmt(col[i]) for col in columns] for i in range(len(traj))]
    _emit_table(args, header, rows, meta)
    return 0


def cmd_spectrum(args) -> int:
    ham, meta = _single_config_ham(args)
    data = spectrum_overlap(ham)
    rows = [[runio.fmt(e), runio.fmt(w)] for e, w in zip(data.energies, data.overlaps)]
    _emit_table(args, ["energy", "overlap"], rows, meta)
    return 0


def cmd_run(args) -> int:
    if (args.preset is None) == (args.config is None):
        raise ValueError("run needs exactly one of --preset or --config")
    if args.preset is not None:
        cfg = runio.RunConfig(spec=ensemble.preset(args.preset), prefix=args.preset)
    else:
        cfg = runio.load_config(args.config)
    cfg = runio.apply_overrides(
        cfg,
        master_seed=args.seed,
        n_configs=args.n_configs,
        lambdas=args.lambdas,
        t_max=args.t_max,
        dt=args.dt,
        backend=args.backend,
        out_dir=args.out,
        workers=args.workers,
        prefix=args.prefix,
    )
    result = ensemble.run(cfg.spec, workers=cfg.workers)
    for path in runio.write_result(result, Path(cfg.out_dir), cfg.prefix):
        print(path)
    for combo in result.combos:
        if combo.failed:
            print(f"warning: {len(combo.failed)} configurations failed "
                  f"(lam={combo.lam}): indices {[i for i, _ in combo.failed]}",
                  file=sys.stderr)
    return 0


def cmd_preset_list(args) -> int:
    for name in ensemble.preset_names():
        spec = ensemble.preset(name)
        lat = spec.lattice
        geom = f"chain N={lat.sites} {lat.boundary}" if lat.kind == "chain" else f"grid {lat.sites[0]}x{lat.sites[1]}"
        lams = ",".join("inf" if np.isinf(x) else f"{x:g}" for x in spec.lambdas)
        print(f"{name:10s} {geom:24s} {spec.hamiltonian:9s} lambdas={lams} "
              f"n_configs={spec.n_configs} observables={','.join(spec.observables)}")
    return 0


def cmd_validate(args) -> int:
    return selfcheck.run_battery(max_n=args.max_n, seed=args.seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockadesim",
        description="Exact dynamics and two-site correlations for blockaded lattices with disordered drive",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", help="print the basis dimension (and optionally the states)")
    _add_lattice_args(p)
    p.add_argument("--full", action="store_true", help="use the unconstrained 2^N basis")
    p.add_argument("--states", action="store_true",
                   help="also print the states as binary strings, one per line, leftmost bit = site 0")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("evolve", help="single-configuration trajectory CSV")
    _add_single_config_args(p)
    p.add_argument("--t-max", type=float, default=25.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--per-site", action="store_true", help="include per-site excitation columns")
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("spectrum", help="eigenvalues and ground-state overlaps CSV")
    _add_single_config_args(p)
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("run", help="disorder-averaged experiment from a preset or config file")
    p.add_argument("--preset", default=None, help="preset name (see preset-list)")
    p.add_argument("--config", default=None, help="JSON run-configuration file")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the master seed")
    p.add_argument("--n-configs", type=int, default=None, help="override the ensemble size")
    p.add_argument("--lambdas", nargs="+", default=None, metavar="LAM",
                   help="override the coupling-mean sweep ('inf' allowed)")
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--backend", choices=("auto", "spectral", "krylov"), default=None)
    p.add_argument("--workers", type=int, default=None, help="process count (never affects results)")
    p.add_argument("--prefix", default=None, help="output file prefix (default: preset name or 'run')")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset-list", help="list experiment presets")
    p.set_defaults(func=cmd_preset_list)

    p = sub.add_parser("validate", help="run the built-in verification battery")
    p.add_argument("--max-n", type=int, default=10, help="largest chain checked")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
