"""Command-line interface.

Subcommands: generate (scenario dump), run (single grid point), sweep (full
grid to CSV), analyze (bound tables), topology (edge-list export).  Flags
mirror the configuration-file keys and override them.  Exit codes: 0 success,
2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .analysis import RicEnumerationError
from .config import experiment_from_values, parse_config_file
from .core import SingularSystemError
from .experiment import (
    ConfigError,
    CSV_COLUMNS,
    analyze_bounds,
    bound_table,
    csv_line,
    paper_examples,
    run_sweep,
    write_bound_csv,
    write_csv,
)
from .network import build_ring, build_watts_strogatz, write_edge_list
from .signals import ScenarioConfig, dump_scenario, gen_scenario, stream


def _smnr_arg(text: str) -> float | None:
    if text == "clean":
        return None
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a dB value or 'clean', got {text!r}") from exc


_SWEEP_FLAGS = (
    # (flag, config key, single-point only override)
    ("--n", "scenario.n"),
    ("--j", "scenario.j"),
    ("--i", "scenario.i"),
    ("--l", "scenario.l"),
    ("--kind", "scenario.kind"),
    ("--alphas", "sweep.alphas"),
    ("--smnr-db", "sweep.smnr_db"),
    ("--topology", "sweep.topology"),
    ("--degrees", "sweep.degrees"),
    ("--q", "sweep.q"),
    ("--p-rewire", "sweep.p_rewire"),
    ("--matrix-realizations", "sweep.matrix_realizations"),
    ("--data-realizations", "sweep.data_realizations"),
    ("--algorithms", "sweep.algorithms"),
    ("--seed", "run.seed"),
    ("--workers", "run.workers"),
    ("--max-outer", "run.max_outer"),
    ("--max-inner", "run.max_inner"),
)


def _add_sweep_flags(parser: argparse.ArgumentParser, single_point: bool) -> None:
    parser.add_argument("--config", help="configuration file (flags override it)")
    for flag, key in _SWEEP_FLAGS:
        if single_point and flag in ("--alphas", "--degrees"):
            continue
        parser.add_argument(flag, dest=key, metavar="V")
    if single_point:
        parser.add_argument("--alpha", dest="sweep.alphas", metavar="V")
        parser.add_argument("--degree", dest="sweep.degrees", metavar="V")
    parser.add_argument("--measure-runtime", action="store_true", default=None,
                        dest="run.measure_runtime")
    parser.add_argument("--output", dest="run.output", metavar="PATH")


def _gather_values(args: argparse.Namespace) -> dict[str, str]:
    values: dict[str, str] = {}
    if getattr(args, "config", None):
        values.update(parse_config_file(args.config))
    for key, val in vars(args).items():
        if "." in key and val is not None:
            values[key] = "1" if val is True else str(val)
    return values


def _sweep_table(rows) -> str:
    header = CSV_COLUMNS.split(",")
    cells = [header] + [csv_line(r).split(",") for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in cells
    )


def _cmd_generate(args) -> int:
    cfg = ScenarioConfig(
        N=args.n, M=args.m, J=args.j, I=args.i, L=args.l,
        smnr_db=args.smnr_db, signal_kind=args.kind, master_seed=args.seed,
    )
    dump_scenario(gen_scenario(cfg), args.out)
    print(f"wrote scenario to {args.out}")
    return 0


def _cmd_sweep(args, single_point: bool) -> int:
    values = _gather_values(args)
    cfg = experiment_from_values(values)
    if single_point:
        if len(cfg.alphas) != 1 or len(cfg.smnr_dbs) != 1:
            raise ConfigError("run takes exactly one alpha and one smnr value")
        if cfg.topology_kind == "ring" and len(cfg.degrees) != 1:
            raise ConfigError("run takes exactly one degree")
    rows = run_sweep(cfg)
    output = values.get("run.output")
    if output:
        write_csv(rows, output)
        print(f"wrote {len(rows)} rows to {output}")
    else:
        print(_sweep_table(rows))
    return 0


def _cmd_analyze(args) -> int:
    if args.preset:
        if args.preset != "paper-examples":
            raise ConfigError(f"unknown preset {args.preset!r}")
        rows = paper_examples()
    else:
        deltas = tuple(float(t) for t in (args.deltas or "").split())
        a_cos = tuple(float(t) for t in (args.a_co or "").split())
        rows = analyze_bounds(deltas, a_cos, args.c_variant)
    print(bound_table(rows))
    if args.csv:
        write_bound_csv(rows, args.csv)
        print(f"wrote {len(rows)} rows to {args.csv}")
    return 0


def _cmd_topology(args) -> int:
    if args.kind == "ring":
        topology = build_ring(args.nodes, args.degree)
    elif args.kind == "complete":
        topology = build_ring(args.nodes, args.nodes - 1)
    elif args.kind == "watts_strogatz":
        topology = build_watts_strogatz(args.nodes, args.q, args.p_rewire, stream(args.seed))
    else:
        raise ConfigError(f"unknown topology kind {args.kind!r}")
    write_edge_list(topology, args.out)
    print(f"wrote edge list to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dippsim",
        description="Distributed greedy-pursuit simulation and analysis toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a scenario and dump it as text")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--j", type=int, required=True)
    gen.add_argument("--i", type=int, required=True)
    gen.add_argument("--l", type=int, required=True)
    gen.add_argument("--smnr-db", type=_smnr_arg, default=None)
    gen.add_argument("--kind", default="gaussian", choices=("gaussian", "binary"))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    runp = sub.add_parser("run", help="run a single grid point")
    _add_sweep_flags(runp, single_point=True)

    sweep = sub.add_parser("sweep", help="run a full sweep and write the CSV")
    _add_sweep_flags(sweep, single_point=False)

    analyze = sub.add_parser("analyze", help="print theoretical bound tables")
    analyze.add_argument("--preset", help="named preset (paper-examples)")
    analyze.add_argument("--deltas", help="whitespace-separated delta_3T grid")
    analyze.add_argument("--a-co", help="whitespace-separated fusion-quality grid")
    analyze.add_argument("--c-variant", choices=("squared", "linear"))
    analyze.add_argument("--csv", help="also write rows to this CSV path")

    topo = sub.add_parser("topology", help="export a topology as an edge list")
    topo.add_argument("--kind", default="ring", choices=("ring", "complete", "watts_strogatz"))
    topo.add_argument("--nodes", type=int, required=True)
    topo.add_argument("--degree", type=int, default=1)
    topo.add_argument("--q", type=int, default=3)
    topo.add_argument("--p-rewire", type=float, default=0.3)
    topo.add_argument("--seed", type=int, default=0)
    topo.add_argument("--out", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "run":
            return _cmd_sweep(args, single_point=True)
        if args.command == "sweep":
            return _cmd_sweep(args, single_point=False)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "topology":
            return _cmd_topology(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except (SingularSystemError, RicEnumerationError, np.linalg.LinAlgError,
            FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
