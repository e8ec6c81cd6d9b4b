"""Experiment execution: sweeps, CSV traces, manifests, and bound reports.

Each (algorithm, block count, duration, perturbation, seed) combination is
one run producing one CSV.  The schema is pinned:

    run_id,algo,b,lambda,delta,seed,step_k,cycle,sim_time,device_time_s,kl,w2,kl_bound,diverged

Floats are written as shortest round-trip decimals and metric cells are
empty when unavailable, so identical configs reproduce byte-identical
files.  Runs are independent jobs: sweeps parallelize across processes
(BLDSIM_WORKERS) without touching per-run output, and BLAS threading is
pinned to one thread inside a job so bytes do not depend on host threading.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import bounds as bounds_mod
from .blocks import Schedule, make_partition
from .config import ExperimentConfig
from .dynamics import (
    Ensemble,
    IntegratorConfig,
    _split_duration,
    run_cbld,
    run_cblmc,
    run_rbld,
    run_rblmc,
)
from .gaussian import GaussianTarget, gaussian_kl, generate_target
from .metrics import probe
from .targets_io import load_target, save_target, target_checksum
from .variation import perturb_precision, quadratic_constants

__all__ = ["CSV_HEADER", "bounds_report", "run_experiment", "write_trace_csv"]

CSV_HEADER = (
    "run_id,algo,b,lambda,delta,seed,step_k,cycle,sim_time,device_time_s,"
    "kl,w2,kl_bound,diverged"
)

_WORKERS_ENV = "BLDSIM_WORKERS"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_trace_csv(path: Path, run_meta: dict, records) -> None:
    """Emit one run's records under the pinned schema."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for rec in records:
            writer.writerow(
                [
                    run_meta["run_id"],
                    run_meta["algo"],
                    _fmt(run_meta["b"]),
                    _fmt(run_meta["lambda"]),
                    _fmt(run_meta["delta"]),
                    _fmt(run_meta["seed"]),
                    _fmt(rec.step_k),
                    _fmt(rec.cycle),
                    _fmt(rec.sim_time),
                    _fmt(rec.device_time_s),
                    _fmt(rec.kl),
                    _fmt(rec.w2),
                    _fmt(rec.kl_bound),
                    _fmt(rec.diverged),
                ]
            )


def _run_id(algo: str, b: int, lam: float, delta: float, seed: int) -> str:
    return f"{algo}_b{b}_lam{lam!r}_delta{delta!r}_seed{seed}"


def _kl_bound_for(algo, consts, b, lam, step_k, kl0):
    """Theory column for unperturbed runs; None when no bound applies."""
    if algo == "rbld":
        return bounds_mod.rbld_kl_bound(consts, 1.0 / b, lam, step_k, kl0)
    if algo == "cbld":
        return bounds_mod.cbld_kl_bound(consts, lam, step_k // b, kl0)
    lams = [lam] * b
    dims = [-(-consts.dim // b)] * b
    ls = [consts.smoothness] * b
    try:
        if algo == "rblmc":
            return bounds_mod.rblmc_kl_bound(
                consts, ls, dims, lams, [1.0 / b] * b, step_k, kl0
            )
        return bounds_mod.cblmc_kl_bound(consts, ls, dims, lams, step_k // b, kl0)
    except ValueError:
        return None  # step size outside the regime the discrete bound covers


def _execute_job(job: dict) -> dict:
    """Run one sweep combination and write its CSV.  Top level for pickling."""
    cfg = ExperimentConfig(**job["config"])
    algo, b, lam = job["algo"], job["b"], job["lam"]
    delta, seed = job["delta"], job["seed"]
    out_dir = Path(job["out_dir"])

    with threadpool_limits(limits=1):
        target = load_target(job["target_path"])
        partition = make_partition(cfg.dim, b)
        if algo in ("rbld", "rblmc"):
            schedule = Schedule.uniform_random(b, lam)
        else:
            schedule = Schedule.round_robin(b, lam)
        em_step = cfg.em_step if cfg.em_step is not None else lam / 100.0
        integrator = IntegratorConfig(
            em_step=em_step, divergence_threshold=cfg.divergence_threshold
        )

        if delta > 0.0:
            drift, _, pd_flag = perturb_precision(target, delta, seed=seed)
            consts = None  # KL bounds cover the unperturbed dynamics only
        else:
            drift, pd_flag = target.gradient(), True
            consts = quadratic_constants(
                target, None, cfg.init_mean, cfg.init_var, partition
            )
        kl0 = gaussian_kl(
            (np.full(cfg.dim, cfg.init_mean), cfg.init_var * np.eye(cfg.dim)), target
        )

        ensemble = Ensemble.initialize(
            cfg.ensemble_size, cfg.dim, seed=seed, mean=cfg.init_mean, cov=cfg.init_var
        )
        probe_fn = lambda ens: probe(ens, target, num_blocks=b)
        if cfg.cadence_unit == "cycles":
            steps_per_block = (
                len(_split_duration(lam, em_step)) if algo in ("rbld", "cbld") else 1
            )
            cadence = cfg.probe_cadence * b * steps_per_block
        else:
            cadence = cfg.probe_cadence

        if algo == "rbld":
            records = run_rbld(
                drift, partition, schedule, cfg.beta, cfg.cycles * b, ensemble,
                integrator, probe_fn, cadence,
            )
        elif algo == "cbld":
            records = run_cbld(
                drift, partition, schedule, cfg.beta, cfg.cycles, ensemble,
                integrator, probe_fn, cadence,
            )
        elif algo == "rblmc":
            records = run_rblmc(
                drift, partition, schedule, cfg.beta, cfg.cycles * b, ensemble,
                probe_fn, cadence, smoothness=None if consts is None else [consts.smoothness] * b,
            )
        else:
            records = run_cblmc(
                drift, partition, schedule, cfg.beta, cfg.cycles, ensemble,
                probe_fn, cadence, smoothness=None if consts is None else [consts.smoothness] * b,
            )

        for rec in records:
            rec.device_time_s = rec.sim_time * cfg.device_scale
            if consts is not None and not rec.diverged:
                rec.kl_bound = _kl_bound_for(algo, consts, b, lam, rec.step_k, kl0)

        run_id = _run_id(algo, b, lam, delta, seed)
        csv_name = f"{run_id}.csv"
        meta = {
            "run_id": run_id,
            "algo": algo,
            "b": b,
            "lambda": lam,
            "delta": delta,
            "seed": seed,
        }
        write_trace_csv(out_dir / csv_name, meta, records)
    return {**meta, "csv": csv_name, "pd_flag": pd_flag, "diverged": ensemble.diverged}


def run_experiment(
    cfg: ExperimentConfig,
    out_dir: str | Path,
    algorithms: tuple[str, ...] | None = None,
    workers: int | None = None,
) -> Path:
    """Run the full sweep and write CSVs plus a manifest; returns the manifest path.

    ``algorithms`` restricts the config's algorithm list; ``workers``
    overrides the BLDSIM_WORKERS environment variable (default 1).  Job
    outputs are independent of the worker count.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    algos = tuple(algorithms) if algorithms else cfg.algorithms
    unknown = set(algos) - set(cfg.algorithms)
    if unknown:
        raise ValueError(f"algorithms not enabled in the config: {sorted(unknown)}")

    if cfg.target_file is not None:
        target_path = Path(cfg.target_file)
        target = load_target(target_path)
        if target.dim != cfg.dim:
            raise ValueError("target file dimension disagrees with the config")
    else:
        target = generate_target(
            cfg.dim,
            entry_range=cfg.entry_range,
            pd_margin=cfg.pd_margin,
            seed=cfg.target_seed,
            beta=cfg.beta,
        )
        target_path = out_dir / "target.txt"
        save_target(target, target_path)
    checksum = target_checksum(target_path)

    config_dict = cfg.canonical()
    config_hash = hashlib.sha256(
        json.dumps(config_dict, sort_keys=True).encode()
    ).hexdigest()

    jobs = [
        {
            "config": config_dict,
            "algo": algo,
            "b": b,
            "lam": lam,
            "delta": delta,
            "seed": seed,
            "out_dir": str(out_dir),
            "target_path": str(target_path),
        }
        for algo, b, lam, delta, seed in product(
            algos, cfg.block_counts, cfg.lams, cfg.deltas, cfg.seeds
        )
    ]

    if workers is None:
        workers = int(os.environ.get(_WORKERS_ENV, "1"))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_execute_job, jobs))
    else:
        results = [_execute_job(job) for job in jobs]

    results.sort(key=lambda r: r["run_id"])
    manifest = {
        "config_hash": config_hash,
        "config": config_dict,
        "target_checksum": checksum,
        "target_file": target_path.name if cfg.target_file is None else str(target_path),
        "runs": results,
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return manifest_path


def bounds_report(
    consts,
    num_blocks: int,
    lam_grid,
    k_grid,
    eps_grid,
    kl0: float,
) -> str:
    """Text report evaluating every bound family over the requested grids."""
    lines = []
    lines.append("assumption constants")
    for name in (
        "gamma", "smoothness", "oracle_smoothness", "dissipativity",
        "dissipativity_offset", "oracle_dissipativity",
        "oracle_dissipativity_offset", "gap_slope", "gap_offset",
        "init_exp_moment", "d_max", "beta", "dim",
    ):
        lines.append(f"  {name} = {getattr(consts, name)}")
    lines.append(f"  kl0 = {kl0}")

    try:
        bias = bounds_mod.bias_constants(consts)
        lines.append(
            f"variation bias constants: c0 = {bias.c0!r}  c1 = {bias.c1!r}  c2 = {bias.c2!r}"
        )
    except ValueError as exc:
        bias = None
        lines.append(f"variation bias constants unavailable: {exc}")

    lines.append("")
    lines.append("kl bounds (uniform schedule, b blocks)")
    lines.append("  lam        k     t=k*lam    plain-ld     randomized   cyclic")
    for lam in lam_grid:
        for k in k_grid:
            t = k * lam
            ld = bounds_mod.ld_kl_bound(consts, kl0, t)
            rb = bounds_mod.rbld_kl_bound(consts, 1.0 / num_blocks, lam, k, kl0)
            cb = bounds_mod.cbld_kl_bound(consts, lam, k / num_blocks, kl0)
            lines.append(
                f"  {lam:<9.4g} {k:<5g} {t:<10.4g} {ld:<12.6g} {rb:<12.6g} {cb:<12.6g}"
            )

    lines.append("")
    lines.append("discrete-sampler bounds (per-block smoothness = global)")
    dims = [-(-consts.dim // num_blocks)] * num_blocks
    ls = [consts.smoothness] * num_blocks
    pmf = [1.0 / num_blocks] * num_blocks
    for lam in lam_grid:
        for k in k_grid:
            lams = [lam] * num_blocks
            try:
                rb = bounds_mod.rblmc_kl_bound(consts, ls, dims, lams, pmf, k, kl0)
                cb = bounds_mod.cblmc_kl_bound(consts, ls, dims, lams, k / num_blocks, kl0)
                lines.append(f"  lam {lam:<9.4g} k {k:<5g} randomized {rb:<12.6g} cyclic {cb:<12.6g}")
            except ValueError as exc:
                lines.append(f"  lam {lam:<9.4g} k {k:<5g} outside regime: {exc}")

    if bias is not None:
        lines.append("")
        lines.append("wasserstein convergence bound (cycles k, uniform lam)")
        for lam in lam_grid:
            for k in k_grid:
                try:
                    w2 = bounds_mod.w2_convergence_bound(
                        consts, bias, lam, k, kl0, num_blocks=num_blocks
                    )
                    lines.append(f"  lam {lam:<9.4g} k {k:<5g} w2 <= {w2:<12.6g}")
                except ValueError as exc:
                    lines.append(f"  lam {lam:<9.4g} k {k:<5g} outside regime: {exc}")

        lines.append("")
        lines.append("accuracy schedules")
        lines.append("  eps        k*lam        lam_max      cycles       w2-bound     loose")
        for eps in eps_grid:
            try:
                sched = bounds_mod.epsilon_schedule(consts, kl0, eps)
                lines.append(
                    f"  {eps:<9.4g} {sched.total_block_time:<12.6g} "
                    f"{sched.lam_max:<12.6g} {sched.num_cycles:<12.6g} "
                    f"{sched.w2_bound:<12.6g} {sched.w2_bound_loose:<12.6g}"
                )
            except ValueError as exc:
                lines.append(f"  {eps:<9.4g} unavailable: {exc}")

    return "\n".join(lines) + "\n"
