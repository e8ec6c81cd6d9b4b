"""Device-variation gradient oracles and the constants behind every bound.

A fixed multiplicative perturbation delta turns the ideal drift matrix P
into P_tilde = P o (1 + delta) (Hadamard product), modelling static analog
component variation.  The perturbed oracle g(x) = P_tilde (x - u) is biased
but time-invariant.  ``quadratic_constants`` extracts, for quadratic
potentials, every scalar the bound calculators consume: smoothness,
dissipativity, the log-Sobolev rate, the gradient-gap constants, and the
exponential moment of the initial law.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import BlockPartition
from .gaussian import AffineGradient, GaussianTarget

__all__ = ["AssumptionConstants", "PerturbationModel", "perturb_precision", "quadratic_constants"]


@dataclass(frozen=True)
class PerturbationModel:
    """Record of a drawn perturbation: the delta matrix and how it was made."""

    delta: np.ndarray
    strength: float
    seed: int
    symmetrized: bool

    def __post_init__(self):
        d = np.asarray(self.delta, dtype=np.float64).copy()
        d.setflags(write=False)
        object.__setattr__(self, "delta", d)


@dataclass(frozen=True)
class AssumptionConstants:
    """Scalar inputs to the bound calculators.

    Fields:
        gamma: log-Sobolev rate of the target (KL contracts at 2*gamma/beta).
        smoothness: Lipschitz constant of the ideal gradient.
        oracle_smoothness: Lipschitz constant of the perturbed oracle.
        dissipativity / dissipativity_offset: (m, c) with
            <grad f(x), x> >= m |x|^2 - c.
        oracle_dissipativity / oracle_dissipativity_offset: same for the
            perturbed oracle; None when no positive slope exists, in which
            case ``dissipative`` is False and the finite-variation bounds
            that need a confined oracle refuse to evaluate.
        gap_slope / gap_offset: (M, B) with
            |grad f(x) - oracle(x)|^2 <= M^2 |x - u|^2 + B^2.
        init_exp_moment: log E[exp |w|^2] under the initial law.
        d_max: largest block dimension of the partition in use.
        beta: inverse temperature.
        dim: problem dimension.
    """

    gamma: float
    smoothness: float
    oracle_smoothness: float
    dissipativity: float
    dissipativity_offset: float
    oracle_dissipativity: float | None
    oracle_dissipativity_offset: float | None
    gap_slope: float
    gap_offset: float
    init_exp_moment: float
    d_max: int
    beta: float
    dim: int

    @property
    def dissipative(self) -> bool:
        return self.oracle_dissipativity is not None


def perturb_precision(
    target: GaussianTarget,
    strength: float,
    seed: int,
    symmetrize: bool = True,
) -> tuple[AffineGradient, PerturbationModel, bool]:
    """Perturbed gradient oracle for the target's precision matrix.

    Draws delta with i.i.d. N(0, strength^2) entries (optionally symmetrized
    as (delta + delta')/2) and returns the oracle x -> (P o (1+delta))(x-u),
    the perturbation record, and a flag telling whether the perturbed matrix
    is still positive definite.  Loss of definiteness is reported, not
    raised: running such oracles is exactly how divergence is studied.
    """
    if strength < 0.0:
        raise ValueError("perturbation strength must be nonnegative")
    if strength > 0.0:
        rng = np.random.default_rng(seed)
        delta = rng.normal(0.0, strength, size=(target.dim, target.dim))
    else:
        delta = np.zeros((target.dim, target.dim))
    if symmetrize:
        delta = (delta + delta.T) / 2.0
    perturbed = target.precision * (1.0 + delta)
    sym_part = (perturbed + perturbed.T) / 2.0
    pd_flag = bool(np.linalg.eigvalsh(sym_part)[0] > 0.0)
    oracle = AffineGradient(perturbed, target.mean)
    model = PerturbationModel(
        delta=delta, strength=float(strength), seed=int(seed), symmetrized=bool(symmetrize)
    )
    return oracle, model, pd_flag


def _dissipativity(matrix: np.ndarray, mean: np.ndarray) -> tuple[float | None, float | None]:
    """Constants (m, c) with <M(x-u), x> >= m |x|^2 - c for all x, or None.

    For zero mean the sharp pair is (lambda_min, 0).  Otherwise we halve the
    slope and complete the square exactly:
        c = (M u)' (S - m I)^-1 (M u) / 4,   S = sym(M), m = lambda_min(S)/2.
    """
    sym = (matrix + matrix.T) / 2.0
    lam_min = float(np.linalg.eigvalsh(sym)[0])
    if lam_min <= 0.0:
        return None, None
    if not np.any(mean):
        return lam_min, 0.0
    m = lam_min / 2.0
    v = matrix @ mean
    c = float(v @ np.linalg.solve(sym - m * np.eye(sym.shape[0]), v)) / 4.0
    return m, c


def _gaussian_exp_moment(mean: np.ndarray, cov: np.ndarray) -> float:
    """log E[exp(|w|^2)] for w ~ N(mean, cov); finite iff eig(cov) < 1/2."""
    cov = np.asarray(cov, dtype=np.float64)
    vals = np.linalg.eigvalsh(cov)
    if vals[-1] >= 0.5:
        raise ValueError(
            "initial law too wide: exponential second moment diverges "
            "(covariance eigenvalue >= 1/2)"
        )
    core = np.eye(cov.shape[0]) - 2.0 * cov
    sign, logdet = np.linalg.slogdet(core)
    quad = float(mean @ np.linalg.solve(core, mean))
    return -0.5 * float(logdet) + quad


def quadratic_constants(
    target: GaussianTarget,
    perturbed_matrix: np.ndarray | None,
    init_mean: np.ndarray | float,
    init_cov: np.ndarray | float,
    partition: BlockPartition,
) -> AssumptionConstants:
    """Assumption constants for a quadratic potential and Gaussian initial law.

    With P the target precision and P_tilde the perturbed matrix (None means
    unperturbed): smoothness and dissipativity are the extreme eigenvalues
    of P, gamma is beta * lambda_min(P) (strong log-concavity of the
    target), the gap constants are the operator norm of P_tilde - P and the
    norm of (P_tilde - P) u, and init_exp_moment is the closed-form log
    exponential second moment of N(init_mean, init_cov).  Scalars broadcast:
    init_mean to a constant vector, init_cov to an isotropic covariance.
    """
    p = target.precision
    d = target.dim
    eigs = np.linalg.eigvalsh(p)
    smoothness = float(eigs[-1])
    gamma = target.beta * float(eigs[0])
    m, c = _dissipativity(p, target.mean)

    if perturbed_matrix is None:
        tilde = p
    else:
        tilde = np.asarray(perturbed_matrix, dtype=np.float64)
        if tilde.shape != p.shape:
            raise ValueError("perturbed matrix shape must match the precision")
    gap = tilde - p
    gap_slope = float(np.linalg.norm(gap, 2))
    gap_offset = float(np.linalg.norm(gap @ target.mean))
    oracle_smoothness = float(np.linalg.norm(tilde, 2))
    frak_m, frak_c = _dissipativity(tilde, target.mean)

    mean0 = np.broadcast_to(np.asarray(init_mean, dtype=np.float64), (d,))
    cov0 = np.asarray(init_cov, dtype=np.float64)
    if cov0.ndim == 0:
        cov0 = float(cov0) * np.eye(d)
    kappa0 = _gaussian_exp_moment(mean0, cov0)

    return AssumptionConstants(
        gamma=gamma,
        smoothness=smoothness,
        oracle_smoothness=oracle_smoothness,
        dissipativity=m if m is not None else 0.0,
        dissipativity_offset=c if c is not None else 0.0,
        oracle_dissipativity=frak_m,
        oracle_dissipativity_offset=frak_c,
        gap_slope=gap_slope,
        gap_offset=gap_offset,
        init_exp_moment=kappa0,
        d_max=partition.d_max,
        beta=target.beta,
        dim=d,
    )
