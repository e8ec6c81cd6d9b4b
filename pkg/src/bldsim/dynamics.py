"""Block Langevin dynamics: integrator, samplers, and ensemble state.

Four samplers operate on a particle ensemble:

    run_rbld   continuous-time block diffusion, randomized block choice
    run_cbld   continuous-time block diffusion, cyclic block order
    run_rblmc  discrete single-step variant, randomized block choice
    run_cblmc  discrete single-step variant, cyclic block order

The continuous-time dynamics within an active block B are

    dx = -U_B g(x) dt + U_B sqrt(2/beta) dW

integrated with Euler-Maruyama at an inner step ``em_step``; coordinates
outside the active block are left bitwise untouched.  The discrete variants
apply exactly one Euler-Maruyama step of size lambda_i per block visit.

Reproducibility contract: a run is fully determined by the ensemble seed,
the schedule, and the integrator config.  Each ensemble owns three Philox
(counter-based) substreams - initial states, block selection, and noise -
so randomized block choices never perturb the noise stream, and runs that
share a seed share noise values step for step.  Noise for an inner step is
drawn as one (n_particles, block_size) matrix whose row p is particle p's
substream; moment reductions use NumPy pairwise summation.  Results are
therefore independent of worker threading.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import backend
from .blocks import BlockPartition, Schedule

__all__ = [
    "Ensemble",
    "IntegratorConfig",
    "NoiseSource",
    "block_em_evolve",
    "run_cbld",
    "run_cblmc",
    "run_rbld",
    "run_rblmc",
]


class NoiseSource:
    """Philox-backed substreams for one ensemble: init, blocks, noise."""

    __slots__ = ("seed", "init", "blocks", "noise")

    def __init__(self, seed: int):
        root = np.random.SeedSequence(seed)
        init_ss, blocks_ss, noise_ss = root.spawn(3)
        self.seed = int(seed)
        self.init = np.random.Generator(np.random.Philox(init_ss))
        self.blocks = np.random.Generator(np.random.Philox(blocks_ss))
        self.noise = np.random.Generator(np.random.Philox(noise_ss))


@dataclass(frozen=True)
class IntegratorConfig:
    """Inner Euler-Maruyama step size and the divergence threshold.

    ``em_step`` must not exceed the shortest block duration (at least one
    inner step per block step); that is checked against the schedule when a
    run starts.  Divergence triggers on max |coordinate| > threshold or any
    non-finite coordinate.
    """

    em_step: float
    divergence_threshold: float = 1e6

    def __post_init__(self):
        if not self.em_step > 0.0:
            raise ValueError("em_step must be positive")
        if not self.divergence_threshold > 0.0:
            raise ValueError("divergence_threshold must be positive")


@dataclass
class Ensemble:
    """N particle states in R^d plus simulation clock and step counter."""

    states: np.ndarray
    noise: NoiseSource
    time: float = 0.0
    block_steps: int = 0
    diverged: bool = False

    @property
    def size(self) -> int:
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @classmethod
    def initialize(
        cls,
        size: int,
        dim: int,
        seed: int,
        mean: float | np.ndarray = 0.0,
        cov: float | np.ndarray = 0.25,
    ) -> "Ensemble":
        """Draw ``size`` particles from N(mean, cov).

        Scalars broadcast: ``mean`` to a constant vector, ``cov`` to an
        isotropic covariance cov * I.
        """
        if size < 1:
            raise ValueError("ensemble size must be positive")
        source = NoiseSource(seed)
        z = source.init.standard_normal((size, dim))
        cov = np.asarray(cov, dtype=np.float64)
        if cov.ndim == 0:
            states = z * np.sqrt(float(cov))
        else:
            states = z @ np.linalg.cholesky(cov).T
        states += np.asarray(mean, dtype=np.float64)
        return cls(states=np.ascontiguousarray(states, dtype=np.float64), noise=source)


def _split_duration(duration: float, h: float) -> np.ndarray:
    """Step sizes covering ``duration``: full steps of h plus a remainder."""
    if not duration > 0.0:
        raise ValueError("duration must be positive")
    n = int(np.floor(duration / h * (1.0 + 1e-12)))
    rem = duration - n * h
    if n == 0:
        return np.array([duration])
    if rem > 1e-9 * h:
        return np.concatenate([np.full(n, h), [rem]])
    return np.full(n, h)


def _drift_dispatch(drift, idx: np.ndarray):
    """Return (mat, offset) for affine drifts, or None for generic callables."""
    matrix = getattr(drift, "matrix", None)
    mean = getattr(drift, "mean", None)
    if matrix is None or mean is None:
        return None
    mat = np.ascontiguousarray(matrix[idx, :], dtype=np.float64)
    offset = mat @ np.asarray(mean, dtype=np.float64)
    return mat, offset


def _run_generic_steps(states, drift, idx, steps, inv_beta, threshold, rng) -> int:
    """Pure-Python EM loop for arbitrary gradient callables."""
    n, di = states.shape[0], idx.size
    for s, h in enumerate(steps):
        grad = np.asarray(drift(states), dtype=np.float64)
        if grad.shape != states.shape:
            raise ValueError("drift callable must map (n, d) states to (n, d) gradients")
        update = -h * grad[:, idx]
        scale = np.sqrt(2.0 * h * inv_beta)
        if scale > 0.0:
            update += scale * rng.standard_normal((n, di))
        states[:, idx] += update
        amax = float(np.abs(states[:, idx]).max())
        if not amax <= threshold:
            return s
    return len(steps)


def _evolve_block(ensemble, idx, steps, drift, beta, cfg) -> int:
    inv_beta = 0.0 if np.isinf(beta) else 1.0 / float(beta)
    dispatch = _drift_dispatch(drift, idx)
    if dispatch is not None:
        mat, offset = dispatch
        return backend.run_em_steps(
            ensemble.states, mat, offset, idx, steps, inv_beta,
            cfg.divergence_threshold, ensemble.noise.noise,
        )
    return _run_generic_steps(
        ensemble.states, drift, idx, steps, inv_beta,
        cfg.divergence_threshold, ensemble.noise.noise,
    )


def block_em_evolve(
    ensemble: Ensemble,
    block: np.ndarray,
    duration: float,
    drift: Callable[[np.ndarray], np.ndarray],
    beta: float,
    cfg: IntegratorConfig,
) -> Ensemble:
    """Evolve the block coordinates of every particle for ``duration``.

    Repeated Euler-Maruyama steps x <- x - h U g(x) + U sqrt(2h/beta) xi,
    with one shortened final step when em_step does not divide the duration.
    Coordinates outside the block are untouched.  On divergence the flag is
    set, the clock stops at the offending step, and the ensemble is returned.
    """
    if ensemble.diverged:
        raise ValueError("ensemble has diverged; build a fresh one to continue")
    if not beta > 0.0:
        raise ValueError("beta must be positive")
    idx = np.asarray(block, dtype=np.intp).ravel()
    steps = _split_duration(float(duration), cfg.em_step)
    done = _evolve_block(ensemble, idx, steps, drift, beta, cfg)
    if done < len(steps):
        ensemble.diverged = True
        ensemble.time += float(steps[: done + 1].sum())
    else:
        ensemble.time += float(duration)
    ensemble.block_steps += 1
    return ensemble


def _check_run_args(partition: BlockPartition, schedule: Schedule, kind: str) -> None:
    if schedule.kind != kind:
        raise ValueError(f"this sampler needs a {kind} schedule, got {schedule.kind}")
    if schedule.num_blocks != partition.num_blocks:
        raise ValueError("schedule and partition disagree on the number of blocks")


def _probe_now(trace, probe, ensemble):
    if probe is not None:
        trace.append(probe(ensemble))


def _run_block_diffusion(
    drift, partition, schedule, beta, block_sequence, ensemble, cfg, probe, probe_cadence
):
    """Shared driver: evolve blocks in the given order with cadence probes."""
    if cfg.em_step > schedule.lambda_min * (1.0 + 1e-12):
        raise ValueError("em_step must not exceed the shortest block duration")
    trace: list = []
    inner_count = 0
    _probe_now(trace, probe, ensemble)
    for i in block_sequence:
        idx = partition.blocks[i]
        duration = float(schedule.durations[i])
        steps = _split_duration(duration, cfg.em_step)
        t0 = ensemble.time
        pos = 0
        covered = 0.0
        while pos < len(steps):
            if probe is not None and probe_cadence is not None:
                to_probe = probe_cadence - inner_count % probe_cadence
                seg = steps[pos : pos + to_probe]
            else:
                seg = steps[pos:]
            done = _evolve_block(ensemble, idx, seg, drift, beta, cfg)
            inner_count += done
            pos += done
            covered += float(seg[:done].sum())
            if done < len(seg):
                ensemble.diverged = True
                ensemble.time = t0 + covered + float(seg[done])
                ensemble.block_steps += 1
                _probe_now(trace, probe, ensemble)
                return trace
            # finalize the step counter before a boundary-aligned probe fires
            if pos < len(steps):
                ensemble.time = t0 + covered
            else:
                ensemble.time = t0 + duration
                ensemble.block_steps += 1
            if (
                probe is not None
                and probe_cadence is not None
                and inner_count % probe_cadence == 0
            ):
                _probe_now(trace, probe, ensemble)
    return trace


def _run_per_particle_rbld(
    drift, partition, schedule, beta, num_steps, ensemble, cfg, probe, probe_cadence
):
    """Randomized selection with an independent block draw per particle.

    Every block step advances the shared clock by the common duration, but
    each particle evolves the block it drew.  Groups are processed in block
    order, each consuming its own noise slice, so runs stay reproducible.
    """
    lam = float(schedule.durations[0])
    if np.any(schedule.durations != lam):
        raise ValueError("per-particle selection requires a uniform block duration")
    if cfg.em_step > lam * (1.0 + 1e-12):
        raise ValueError("em_step must not exceed the shortest block duration")
    steps = _split_duration(lam, cfg.em_step)
    b = schedule.num_blocks
    trace: list = []
    inner_count = 0
    _probe_now(trace, probe, ensemble)
    for _ in range(int(num_steps)):
        draws = ensemble.noise.blocks.choice(b, size=ensemble.size, p=schedule.pmf)
        for i in range(b):
            rows = np.flatnonzero(draws == i)
            if rows.size == 0:
                continue
            sub = np.ascontiguousarray(ensemble.states[rows])
            group = Ensemble(states=sub, noise=ensemble.noise)
            done = _evolve_block(group, partition.blocks[i], steps, drift, beta, cfg)
            ensemble.states[rows] = sub
            if done < len(steps):
                ensemble.diverged = True
                break
        inner_count += len(steps)
        ensemble.time += lam
        ensemble.block_steps += 1
        if ensemble.diverged:
            _probe_now(trace, probe, ensemble)
            return trace
        if probe is not None and probe_cadence is not None and inner_count % probe_cadence == 0:
            _probe_now(trace, probe, ensemble)
    return trace


def run_rbld(
    drift,
    partition: BlockPartition,
    schedule: Schedule,
    beta: float,
    num_steps: int,
    ensemble: Ensemble,
    cfg: IntegratorConfig,
    probe=None,
    probe_cadence: int | None = None,
    draw_mode: str = "shared",
) -> list:
    """Randomized block diffusion for ``num_steps`` block steps.

    With ``draw_mode="shared"`` (default) one block index is drawn from the
    schedule pmf per step and shared by the whole ensemble; with
    ``"per-particle"`` every particle draws its own block each step, so the
    ensemble directly samples the selection-averaged law.  ``probe`` (if
    given) is called on the ensemble at the start and after every
    ``probe_cadence`` inner steps (block-step boundaries in per-particle
    mode); the collected records are returned.
    """
    _check_run_args(partition, schedule, "randomized")
    if draw_mode == "per-particle":
        return _run_per_particle_rbld(
            drift, partition, schedule, beta, num_steps, ensemble, cfg, probe, probe_cadence
        )
    if draw_mode != "shared":
        raise ValueError("draw_mode must be 'shared' or 'per-particle'")
    draws = ensemble.noise.blocks.choice(
        schedule.num_blocks, size=int(num_steps), p=schedule.pmf
    )
    return _run_block_diffusion(
        drift, partition, schedule, beta, draws.tolist(), ensemble, cfg, probe, probe_cadence
    )


def run_cbld(
    drift,
    partition: BlockPartition,
    schedule: Schedule,
    beta: float,
    num_cycles: int,
    ensemble: Ensemble,
    cfg: IntegratorConfig,
    probe=None,
    probe_cadence: int | None = None,
) -> list:
    """Cyclic block diffusion: ``num_cycles`` passes in schedule order."""
    _check_run_args(partition, schedule, "cyclic")
    sequence = list(schedule.order) * int(num_cycles)
    return _run_block_diffusion(
        drift, partition, schedule, beta, sequence, ensemble, cfg, probe, probe_cadence
    )


def _check_lmc_steps(schedule: Schedule, smoothness, phi_min: float) -> None:
    """Step-size precondition lambda_i <= sqrt(phi_min) / (4 L_i)."""
    if smoothness is None:
        warnings.warn(
            "no per-block smoothness constants supplied; step-size "
            "precondition is unchecked",
            stacklevel=3,
        )
        return
    lams = schedule.durations
    for i, (lam, li) in enumerate(zip(lams, smoothness)):
        limit = np.sqrt(phi_min) / (4.0 * float(li))
        if lam > limit * (1.0 + 1e-12):
            raise ValueError(
                f"block {i}: step {lam:.3g} exceeds the stability limit {limit:.3g}"
            )


def _run_block_lmc(drift, partition, schedule, beta, block_sequence, ensemble, probe, probe_cadence):
    """Shared discrete driver: one EM step of size lambda_i per block visit."""
    threshold_cfg = IntegratorConfig(em_step=schedule.lambda_min)
    trace: list = []
    _probe_now(trace, probe, ensemble)
    for count, i in enumerate(block_sequence, start=1):
        idx = partition.blocks[i]
        lam = float(schedule.durations[i])
        steps = np.array([lam])
        done = _evolve_block(ensemble, idx, steps, drift, beta, threshold_cfg)
        ensemble.block_steps += 1
        ensemble.time += lam
        if done < 1:
            ensemble.diverged = True
            _probe_now(trace, probe, ensemble)
            return trace
        if probe is not None and probe_cadence is not None and count % probe_cadence == 0:
            _probe_now(trace, probe, ensemble)
    return trace


def run_rblmc(
    drift,
    partition: BlockPartition,
    schedule: Schedule,
    beta: float,
    num_steps: int,
    ensemble: Ensemble,
    probe=None,
    probe_cadence: int | None = None,
    smoothness: Sequence[float] | None = None,
) -> list:
    """Discrete randomized block sampler: x <- x - lam_i U g(x) + U sqrt(2 lam_i / beta) xi.

    When per-block smoothness constants are supplied, the step sizes are
    validated against lambda_i <= sqrt(phi_min)/(4 L_i); otherwise a warning
    notes that they are unchecked.
    """
    _check_run_args(partition, schedule, "randomized")
    _check_lmc_steps(schedule, smoothness, schedule.phi_min)
    draws = ensemble.noise.blocks.choice(
        schedule.num_blocks, size=int(num_steps), p=schedule.pmf
    )
    return _run_block_lmc(
        drift, partition, schedule, beta, draws.tolist(), ensemble, probe, probe_cadence
    )


def run_cblmc(
    drift,
    partition: BlockPartition,
    schedule: Schedule,
    beta: float,
    num_cycles: int,
    ensemble: Ensemble,
    probe=None,
    probe_cadence: int | None = None,
    smoothness: Sequence[float] | None = None,
) -> list:
    """Discrete cyclic block sampler; visits blocks in schedule order.

    The step-size check treats visitation as uniform (phi_min = 1/b).
    """
    _check_run_args(partition, schedule, "cyclic")
    _check_lmc_steps(schedule, smoothness, 1.0 / schedule.num_blocks)
    sequence = list(schedule.order) * int(num_cycles)
    return _run_block_lmc(
        drift, partition, schedule, beta, sequence, ensemble, probe, probe_cadence
    )
