"""Benchmark the compiled Euler-Maruyama kernel against the NumPy fallback.

Usage:
    python bench/benchmark_kernels.py [--n 10000] [--dim 50] [--blocks 5]
                                      [--steps 2000] [--repeats 3]

Reports inner steps per second for each available backend on the same
workload, plus the max state deviation between the two after a shared-noise
run (expected at rounding level).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from bldsim import Ensemble, backend, generate_target, make_partition
from bldsim import _kernels_np


def _kernel_pairs():
    pairs = [("numpy", _kernels_np)]
    if backend.HAVE_COMPILED:
        from bldsim import _kernels

        pairs.append(("compiled", _kernels))
    return pairs


def _run_once(kernel, n_particles, dim, num_blocks, steps, seed=0):
    target = generate_target(dim, seed=2)
    part = make_partition(dim, num_blocks)
    ens = Ensemble.initialize(n_particles, dim, seed=seed)
    step_arr = np.full(steps // num_blocks, 1e-4)
    start = time.perf_counter()
    for idx in part.blocks:
        mat = np.ascontiguousarray(target.precision[idx, :])
        offset = mat @ target.mean
        kernel.run_em_steps(
            ens.states, mat, offset, idx, step_arr, 1.0, 1e6, ens.noise.noise
        )
    elapsed = time.perf_counter() - start
    return elapsed, ens.states


def benchmark(n_particles=10_000, dim=50, num_blocks=5, steps=2000, repeats=3):
    rows = []
    states_by_backend = {}
    for name, kernel in _kernel_pairs():
        best = float("inf")
        for _ in range(repeats):
            elapsed, states = _run_once(kernel, n_particles, dim, num_blocks, steps)
            best = min(best, elapsed)
        states_by_backend[name] = states
        total_steps = (steps // num_blocks) * num_blocks
        rows.append(
            {
                "backend": name,
                "seconds": best,
                "steps_per_s": total_steps / best,
                "particle_steps_per_s": total_steps * n_particles / best,
            }
        )
    if len(states_by_backend) == 2:
        dev = float(
            np.abs(states_by_backend["numpy"] - states_by_backend["compiled"]).max()
        )
        for row in rows:
            row["max_state_deviation"] = dev
    return rows


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--dim", type=int, default=50)
    ap.add_argument("--blocks", type=int, default=5)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    rows = benchmark(args.n, args.dim, args.blocks, args.steps, args.repeats)
    print(f"{'backend':<10} {'seconds':>10} {'steps/s':>12} {'particle-steps/s':>18}")
    for row in rows:
        print(
            f"{row['backend']:<10} {row['seconds']:>10.4f} "
            f"{row['steps_per_s']:>12.1f} {row['particle_steps_per_s']:>18.3e}"
        )
    if "max_state_deviation" in rows[0]:
        print(f"max state deviation between backends: {rows[0]['max_state_deviation']:.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
