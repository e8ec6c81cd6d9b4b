"""Ensemble statistics and trace probes.

A probe snapshots an ensemble into a TraceRecord: empirical Gaussian fit,
closed-form KL and Wasserstein distances to the target, and the clock /
step-counter stamps.  Reductions over particles rely on NumPy pairwise
summation, so the records do not depend on worker threading.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Ensemble
from .gaussian import GaussianEstimate, GaussianTarget, gaussian_kl, gaussian_w2

__all__ = ["TraceRecord", "estimate_gaussian", "probe"]


@dataclass
class TraceRecord:
    """One probe of a run: clock stamps plus the two distance metrics.

    ``kl``/``w2`` are None when the estimate was degenerate or the ensemble
    had diverged; ``kl_bound`` and ``device_time_s`` are stamped by the
    experiment harness at trace emission.
    """

    step_k: int
    cycle: float
    sim_time: float
    kl: float | None
    w2: float | None
    diverged: bool
    kl_bound: float | None = None
    device_time_s: float | None = None


def estimate_gaussian(ensemble: Ensemble | np.ndarray) -> GaussianEstimate:
    """Empirical mean and unbiased covariance of the particle cloud."""
    states = ensemble.states if isinstance(ensemble, Ensemble) else np.asarray(ensemble)
    n = states.shape[0]
    if n < 2:
        raise ValueError("need at least 2 particles to estimate a covariance")
    mean = states.mean(axis=0)
    centered = states - mean
    cov = centered.T @ centered / (n - 1)
    cov = (cov + cov.T) / 2.0
    return GaussianEstimate(mean=mean, covariance=cov, sample_count=n)


def probe(
    ensemble: Ensemble, target: GaussianTarget, num_blocks: int = 1
) -> TraceRecord:
    """Snapshot the ensemble's distance to the target.

    A diverged ensemble, or one whose empirical covariance is singular,
    yields a record with the metrics marked unavailable rather than an
    error, so traces always carry the divergence point.
    """
    record = TraceRecord(
        step_k=ensemble.block_steps,
        cycle=ensemble.block_steps / num_blocks,
        sim_time=ensemble.time,
        kl=None,
        w2=None,
        diverged=ensemble.diverged,
    )
    if ensemble.diverged:
        return record
    try:
        estimate = estimate_gaussian(ensemble)
        record.kl = gaussian_kl(estimate, target)
        record.w2 = gaussian_w2(estimate, target)
    except ValueError:
        record.kl = None
        record.w2 = None
    return record
