"""Exact Gaussian law of the block diffusion, for verification.

For a quadratic potential the block SDE is linear, so if the initial law is
Gaussian the law at every later time stays Gaussian and is fully described
by its mean and covariance.  During a block step with active-coordinate
mask U and drift matrix P (the target precision), these follow

    dm/dt = -U P (m - u)
    dC/dt = -U P C - C P U + (2/beta) U

which we integrate exactly over the step duration with the augmented-matrix
exponential (Van Loan construction).  This gives an independent oracle for
the empirical ensembles produced by the samplers.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .blocks import BlockPartition, Schedule
from .gaussian import GaussianTarget

__all__ = ["block_moment_step", "exact_gaussian_moments"]


def _propagator(precision, beta, idx, duration, dim):
    """(F, G) with m' = u + F (m - u) and C' = F C F' + G over one block step."""
    j = np.zeros((dim, dim))
    j[idx, :] = -precision[idx, :]
    q = np.zeros((dim, dim))
    q[idx, idx] = 2.0 / beta
    aug = np.zeros((2 * dim, 2 * dim))
    aug[:dim, :dim] = j
    aug[:dim, dim:] = q
    aug[dim:, dim:] = -j.T
    e = expm(aug * duration)
    f = e[:dim, :dim]
    gram = e[:dim, dim:] @ f.T
    return f, (gram + gram.T) / 2.0


def block_moment_step(
    target: GaussianTarget,
    block: np.ndarray,
    duration: float,
    mean: np.ndarray,
    cov: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Propagate (mean, cov) of the exact law through one block step."""
    idx = np.asarray(block, dtype=np.intp).ravel()
    f, g = _propagator(target.precision, target.beta, idx, float(duration), target.dim)
    new_mean = target.mean + f @ (np.asarray(mean, dtype=np.float64) - target.mean)
    c = np.asarray(cov, dtype=np.float64)
    new_cov = f @ c @ f.T + g
    return new_mean, (new_cov + new_cov.T) / 2.0


def exact_gaussian_moments(
    target: GaussianTarget,
    partition: BlockPartition,
    schedule: Schedule,
    mean0: np.ndarray,
    cov0: np.ndarray,
    num_block_steps: int,
    block_sequence: Sequence[int] | None = None,
    return_trajectory: bool = False,
):
    """Exact (mean, covariance) of the block diffusion after k block steps.

    The block visit order is the repeated cycle of a cyclic schedule, or an
    explicit ``block_sequence`` (e.g. a recorded randomized realization);
    durations always come from the schedule.  A randomized schedule without
    an explicit sequence is rejected, since its law is a mixture rather than
    a single Gaussian.  With ``return_trajectory`` the list of (mean, cov)
    at steps 0..k is returned instead of the final pair.
    """
    if block_sequence is None:
        if schedule.kind != "cyclic":
            raise ValueError(
                "exact moments need a cyclic schedule or an explicit block sequence"
            )
        reps = -(-num_block_steps // max(schedule.num_blocks, 1))
        sequence = (list(schedule.order) * (reps + 1))[:num_block_steps]
    else:
        sequence = [int(i) for i in block_sequence]
        if len(sequence) < num_block_steps:
            raise ValueError("block sequence shorter than the requested number of steps")
        sequence = sequence[:num_block_steps]

    mean = np.asarray(mean0, dtype=np.float64).copy()
    cov = np.asarray(cov0, dtype=np.float64).copy()
    trajectory = [(mean.copy(), cov.copy())]
    cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for i in sequence:
        if i not in cache:
            cache[i] = _propagator(
                target.precision,
                target.beta,
                partition.blocks[i],
                float(schedule.durations[i]),
                target.dim,
            )
        f, g = cache[i]
        mean = target.mean + f @ (mean - target.mean)
        cov = f @ cov @ f.T + g
        cov = (cov + cov.T) / 2.0
        if return_trajectory:
            trajectory.append((mean.copy(), cov.copy()))
    if return_trajectory:
        return trajectory
    return mean, cov
