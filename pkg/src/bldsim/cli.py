"""Command-line interface.

    bldsim simulate --config cfg.json [--algo rbld cbld] [--out dir] [--workers n]
    bldsim bounds --target t.txt | --consts c.json [--blocks b] [grids...]
    bldsim gen-target --dim d --seed s --out t.txt [--range lo hi] [--margin m]

The worker count for sweeps can also come from the BLDSIM_WORKERS
environment variable; per-run outputs never depend on it.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .blocks import make_partition
from .config import load_config
from .gaussian import gaussian_kl, generate_target
from .runner import bounds_report, run_experiment
from .targets_io import load_target, save_target
from .variation import AssumptionConstants, perturb_precision, quadratic_constants

_CONSTS_KEYS = (
    "gamma", "smoothness", "oracle_smoothness", "dissipativity",
    "dissipativity_offset", "oracle_dissipativity",
    "oracle_dissipativity_offset", "gap_slope", "gap_offset",
    "init_exp_moment", "d_max", "beta", "dim",
)


def _load_consts_file(path: str) -> AssumptionConstants:
    raw = json.loads(Path(path).read_text())
    missing = sorted(set(_CONSTS_KEYS) - set(raw))
    if missing:
        raise ValueError(f"constants file missing: {', '.join(missing)}")
    kwargs = {k: raw[k] for k in _CONSTS_KEYS}
    for k in ("d_max", "dim"):
        kwargs[k] = int(kwargs[k])
    return AssumptionConstants(**kwargs)


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    algos = tuple(args.algo) if args.algo else None
    manifest = run_experiment(cfg, args.out, algorithms=algos, workers=args.workers)
    print(f"wrote {manifest}")
    return 0


def _cmd_bounds(args) -> int:
    if (args.target is None) == (args.consts is None):
        print("bounds: exactly one of --target or --consts is required", file=sys.stderr)
        return 2
    if args.consts is not None:
        consts = _load_consts_file(args.consts)
        kl0 = args.kl0 if args.kl0 is not None else 1.0
    else:
        target = load_target(args.target)
        partition = make_partition(target.dim, args.blocks)
        perturbed = None
        if args.delta > 0.0:
            oracle, _, _ = perturb_precision(target, args.delta, seed=args.delta_seed)
            perturbed = oracle.matrix
        consts = quadratic_constants(
            target, perturbed, args.init_mean, args.init_var, partition
        )
        if args.kl0 is not None:
            kl0 = args.kl0
        else:
            kl0 = gaussian_kl(
                (
                    np.full(target.dim, args.init_mean),
                    args.init_var * np.eye(target.dim),
                ),
                target,
            )
    report = bounds_report(
        consts, args.blocks, args.lam_grid, args.k_grid, args.eps_grid, kl0
    )
    if args.out:
        Path(args.out).write_text(report)
        print(f"wrote {args.out}")
    else:
        print(report, end="")
    return 0


def _cmd_gen_target(args) -> int:
    target = generate_target(
        args.dim,
        entry_range=(args.range[0], args.range[1]),
        pd_margin=args.margin,
        seed=args.seed,
        beta=args.beta,
    )
    save_target(target, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bldsim",
        description="Block Langevin diffusion simulation and bound calculators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a sweep from a config file")
    sim.add_argument("--config", required=True)
    sim.add_argument(
        "--algo", nargs="+", choices=["rbld", "cbld", "rblmc", "cblmc"],
        help="restrict to these algorithms (default: all enabled in the config)",
    )
    sim.add_argument("--out", default="runs")
    sim.add_argument("--workers", type=int, default=None)
    sim.set_defaults(func=_cmd_simulate)

    bnd = sub.add_parser("bounds", help="evaluate every bound family on a grid")
    bnd.add_argument("--target", help="target file to derive constants from")
    bnd.add_argument("--consts", help="JSON file of explicit constants")
    bnd.add_argument("--blocks", type=int, default=1)
    bnd.add_argument("--delta", type=float, default=0.0)
    bnd.add_argument("--delta-seed", type=int, default=0)
    bnd.add_argument("--init-var", type=float, default=0.25)
    bnd.add_argument("--init-mean", type=float, default=0.0)
    bnd.add_argument("--kl0", type=float, default=None)
    bnd.add_argument("--lam-grid", type=float, nargs="+", default=[0.05, 0.1])
    bnd.add_argument("--k-grid", type=float, nargs="+", default=[0, 10, 100])
    bnd.add_argument("--eps-grid", type=float, nargs="+", default=[0.1, 0.01])
    bnd.add_argument("--out")
    bnd.set_defaults(func=_cmd_bounds)

    gen = sub.add_parser("gen-target", help="generate and save a random target")
    gen.add_argument("--dim", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--range", type=float, nargs=2, default=[-5.0, 5.0])
    gen.add_argument("--margin", type=float, default=1.2)
    gen.add_argument("--beta", type=float, default=1.0)
    gen.set_defaults(func=_cmd_gen_target)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
