"""Closed-form convergence and bias guarantees as pure calculators.

Every function here is a total function of explicit scalar arguments (plus
an AssumptionConstants record), with no hidden state, so each one can be
golden-value tested by direct substitution.  The exponential-decay families
share a single convention: KL contracts at rate 2*gamma/beta per unit of
active diffusion time, and the discrete single-step samplers pay an extra
additive bias quadratic in their step sizes.  The finite-variation family
bounds the Wasserstein distance between ideal and perturbed runs through
the three derived constants (c0, c1, c2).

The discrete-sampler and finite-variation formulas are stated in the
unit-temperature normalization of their derivations; the continuous-time
families carry beta explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .variation import AssumptionConstants

__all__ = [
    "BiasConstants",
    "EpsilonSchedule",
    "FunctionGapBound",
    "bias_constants",
    "cbld_kl_bound",
    "cblmc_kl_bound",
    "epsilon_schedule",
    "function_gap_bound",
    "ld_kl_bound",
    "rbld_kl_bound",
    "rblmc_kl_bound",
    "w2_convergence_bound",
    "w2_variation_distance",
]


@dataclass(frozen=True)
class BiasConstants:
    """Coefficients of the finite-variation Wasserstein bias.

    With M, B the gradient-gap constants, kappa0 the initial exponential
    moment, c the dissipativity offset, and d_max the largest block size:

        c1 = M^2 beta kappa0 / 4 + beta B^2 / 4
        c2 = M^2 (d_max + beta c) / 4
        c0 = 12 + 8 (kappa0 + 2 c + d_max / beta)

    A perfect device (M = B = 0) gives c1 = c2 = 0.
    """

    c0: float
    c1: float
    c2: float

    @property
    def zero_bias(self) -> bool:
        return self.c1 == 0.0 and self.c2 == 0.0


@dataclass(frozen=True)
class EpsilonSchedule:
    """Step-count and step-size selections hitting a target accuracy eps.

    ``total_block_time`` is the product k * lambda of cycles and step
    duration; ``lam_max`` is the largest admissible step duration;
    ``num_cycles`` is their ratio.  ``w2_bound`` evaluates the convergence
    bound at exactly these selections (its ideal part equals eps / 2);
    ``w2_bound_loose`` is the looser split form obtained by pulling the two
    bias constants out of the shared square root, kept for reporting.
    """

    epsilon: float
    total_block_time: float
    lam_max: float
    num_cycles: float
    w2_bound: float
    w2_bound_loose: float


@dataclass(frozen=True)
class FunctionGapBound:
    """Expected-function-gap decomposition: empirical part + Gibbs part."""

    empirical_gap: float
    gibbs_gap: float
    total: float
    sigma2: float


def _check_nonneg(value: float, name: str) -> float:
    value = float(value)
    if value < 0.0:
        raise ValueError(f"{name} must be nonnegative")
    return value


def ld_kl_bound(consts: AssumptionConstants, kl0: float, t: float) -> float:
    """KL bound for plain (unpartitioned) diffusion at time t."""
    t = _check_nonneg(t, "t")
    kl0 = _check_nonneg(kl0, "kl0")
    return math.exp(-2.0 * consts.gamma / consts.beta * t) * kl0


def rbld_kl_bound(
    consts: AssumptionConstants, phi_min: float, lam_min: float, k: float, kl0: float
) -> float:
    """KL bound after k randomized block steps."""
    if not 0.0 < phi_min <= 1.0:
        raise ValueError("phi_min must lie in (0, 1]")
    if not lam_min > 0.0:
        raise ValueError("lam_min must be positive")
    k = _check_nonneg(k, "k")
    kl0 = _check_nonneg(kl0, "kl0")
    rate = 2.0 * consts.gamma / consts.beta * phi_min * lam_min
    return math.exp(-rate * k) * kl0


def cbld_kl_bound(
    consts: AssumptionConstants, lam_min: float, k_cycles: float, kl0: float
) -> float:
    """KL bound after k_cycles full cyclic passes (k_cycles * b block steps)."""
    if not lam_min > 0.0:
        raise ValueError("lam_min must be positive")
    k_cycles = _check_nonneg(k_cycles, "k_cycles")
    kl0 = _check_nonneg(kl0, "kl0")
    rate = 2.0 * consts.gamma / consts.beta * lam_min
    return math.exp(-rate * k_cycles) * kl0


def _per_block(values: Sequence[float], b: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size != b:
        raise ValueError(f"{name} must have one entry per block")
    return arr


def rblmc_kl_bound(
    consts: AssumptionConstants,
    smoothness: Sequence[float],
    block_dims: Sequence[int],
    lams: Sequence[float],
    pmf: Sequence[float],
    k: float,
    kl0: float,
) -> float:
    """KL bound for the discrete randomized sampler after k block steps.

    Requires lambda_i <= sqrt(phi_min) / (4 L_i) for every block; the bound
    is exp(-gamma phi_min lam_min k) kl0 plus the stationary bias
    4 / (gamma phi_min lam_min) * E_phi[d_i L_i^2 lambda_i^2].
    """
    pmf_arr = np.asarray(pmf, dtype=np.float64).ravel()
    b = pmf_arr.size
    ls = _per_block(smoothness, b, "smoothness")
    ds = _per_block(block_dims, b, "block_dims")
    lam = _per_block(lams, b, "lams")
    phi_min = float(pmf_arr.min())
    if not 0.0 < phi_min <= 1.0 or abs(float(pmf_arr.sum()) - 1.0) > 1e-12:
        raise ValueError("pmf must be strictly positive and sum to 1")
    limits = np.sqrt(phi_min) / (4.0 * ls)
    bad = np.nonzero(lam > limits * (1.0 + 1e-12))[0]
    if bad.size:
        i = int(bad[0])
        raise ValueError(
            f"block {i}: step {lam[i]:.3g} exceeds the stability limit {limits[i]:.3g}"
        )
    k = _check_nonneg(k, "k")
    kl0 = _check_nonneg(kl0, "kl0")
    lam_min = float(lam.min())
    decay = math.exp(-consts.gamma * phi_min * lam_min * k) * kl0
    bias = 4.0 / (consts.gamma * phi_min * lam_min) * float(
        np.sum(pmf_arr * ds * ls**2 * lam**2)
    )
    return decay + bias


def cblmc_kl_bound(
    consts: AssumptionConstants,
    smoothness: Sequence[float],
    block_dims: Sequence[int],
    lams: Sequence[float],
    k_cycles: float,
    kl0: float,
) -> float:
    """KL bound for the discrete cyclic sampler after k_cycles full passes.

    Requires lambda_i <= gamma / (4 L_i^2); the bound is
    exp(-gamma lam_min k b) kl0 + 4 / (gamma lam_min) * sum_i L_i^2 d_i lambda_i^2.
    """
    ls = np.asarray(smoothness, dtype=np.float64).ravel()
    b = ls.size
    ds = _per_block(block_dims, b, "block_dims")
    lam = _per_block(lams, b, "lams")
    limits = consts.gamma / (4.0 * ls**2)
    bad = np.nonzero(lam > limits * (1.0 + 1e-12))[0]
    if bad.size:
        i = int(bad[0])
        raise ValueError(
            f"block {i}: step {lam[i]:.3g} exceeds the stability limit {limits[i]:.3g}"
        )
    k_cycles = _check_nonneg(k_cycles, "k_cycles")
    kl0 = _check_nonneg(kl0, "kl0")
    lam_min = float(lam.min())
    decay = math.exp(-consts.gamma * lam_min * k_cycles * b) * kl0
    bias = 4.0 / (consts.gamma * lam_min) * float(np.sum(ls**2 * ds * lam**2))
    return decay + bias


def bias_constants(consts: AssumptionConstants) -> BiasConstants:
    """Derive (c0, c1, c2) from the assumption constants.

    Requires beta > 2 / m (the confinement condition behind the exponential
    moment growth bound).
    """
    if not consts.beta > 2.0 / consts.dissipativity:
        raise ValueError("requires beta > 2 / dissipativity slope")
    m2 = consts.gap_slope**2
    c1 = m2 * consts.beta * consts.init_exp_moment / 4.0 + consts.beta * consts.gap_offset**2 / 4.0
    c2 = m2 * (consts.d_max + consts.beta * consts.dissipativity_offset) / 4.0
    c0 = 12.0 + 8.0 * (
        consts.init_exp_moment
        + 2.0 * consts.dissipativity_offset
        + consts.d_max / consts.beta
    )
    return BiasConstants(c0=c0, c1=c1, c2=c2)


def w2_variation_distance(bias: BiasConstants, lam: float, k: float) -> float:
    """Wasserstein distance bound between perturbed and ideal runs.

    Evaluates sqrt(c0 [(c1 + sqrt(c1)) + (c2 + sqrt(c2)) sqrt(lam)]) * k * lam
    after k block steps of shared-schedule evolution.  A zero-bias device
    returns exactly 0 for any arguments; otherwise the derivation requires
    k * lam > 1.
    """
    if bias.zero_bias:
        return 0.0
    if not lam > 0.0:
        raise ValueError("lam must be positive")
    if not k * lam > 1.0:
        raise ValueError("requires k * lam > 1")
    inner = (bias.c1 + math.sqrt(bias.c1)) + (bias.c2 + math.sqrt(bias.c2)) * math.sqrt(lam)
    return math.sqrt(bias.c0 * inner) * k * lam


def w2_convergence_bound(
    consts: AssumptionConstants,
    bias: BiasConstants,
    lam: float,
    k_cycles: float,
    kl0: float,
    num_blocks: int = 1,
) -> float:
    """Total Wasserstein bound after k_cycles cycles at uniform step lam.

    Ideal part sqrt(2/gamma) exp(-gamma lam k / beta) sqrt(kl0) plus the
    variation distance accumulated over k * num_blocks block steps.
    """
    if not lam > 0.0:
        raise ValueError("lam must be positive")
    k_cycles = _check_nonneg(k_cycles, "k_cycles")
    kl0 = _check_nonneg(kl0, "kl0")
    ideal = math.sqrt(2.0 / consts.gamma) * math.exp(
        -consts.gamma / consts.beta * lam * k_cycles
    ) * math.sqrt(kl0)
    return ideal + w2_variation_distance(bias, lam, k_cycles * num_blocks)


def epsilon_schedule(
    consts: AssumptionConstants, kl0: float, eps: float
) -> EpsilonSchedule:
    """Select total block time and step duration for target accuracy eps.

    total time  k * lam = (beta / gamma) log(2 sqrt(2 kl0) / (eps sqrt(gamma)))
    step bound  lam    <= (eps gamma)^4 / (beta log(...))^4

    ``w2_bound`` plugs these selections back into the convergence bound
    (single-block form), making the ideal term exactly eps / 2;
    ``w2_bound_loose`` splits the bias square root term by term.
    """
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    if not kl0 > 0.0:
        raise ValueError("kl0 must be positive")
    log_arg = 2.0 * math.sqrt(2.0 * kl0) / (eps * math.sqrt(consts.gamma))
    if log_arg <= 1.0:
        raise ValueError("eps too large: the schedule degenerates (log argument <= 1)")
    log_term = math.log(log_arg)
    total = consts.beta / consts.gamma * log_term
    lam_max = (eps * consts.gamma) ** 4 / (consts.beta * log_term) ** 4
    num_cycles = total / lam_max
    bias = bias_constants(consts)
    w2 = w2_convergence_bound(consts, bias, lam_max, num_cycles, kl0, num_blocks=1)
    loose = eps / 2.0 + math.sqrt(bias.c0) * (
        math.sqrt(bias.c1 + math.sqrt(bias.c1)) * total
        + eps * math.sqrt(bias.c2 + math.sqrt(bias.c2))
    )
    return EpsilonSchedule(
        epsilon=float(eps),
        total_block_time=total,
        lam_max=lam_max,
        num_cycles=num_cycles,
        w2_bound=w2,
        w2_bound_loose=loose,
    )


def function_gap_bound(
    consts: AssumptionConstants, w2: float, sigma2: float | None = None
) -> FunctionGapBound:
    """Expected-function-gap bound from a Wasserstein distance.

    empirical_gap = (M sqrt(sigma2) + B) * w2 bounds the gap between the
    running law and the target expectation; gibbs_gap =
    (d / 2 beta) log((e L / m)(c beta / d + 1)) bounds the gap between the
    target expectation and the global minimum.  When ``sigma2`` is not
    supplied it is computed as
        kappa0 + max((c + d/beta)/m, (c_oracle + d/beta)/m_oracle),
    which requires the perturbed oracle to be dissipative.
    """
    if not consts.beta >= 2.0 / consts.dissipativity:
        raise ValueError("requires beta >= 2 / dissipativity slope")
    w2 = _check_nonneg(w2, "w2")
    d = float(consts.dim)
    if sigma2 is None:
        if not consts.dissipative:
            raise ValueError(
                "perturbed oracle is not dissipative: second moment bound unavailable"
            )
        ideal = (consts.dissipativity_offset + d / consts.beta) / consts.dissipativity
        oracle = (
            consts.oracle_dissipativity_offset + d / consts.beta
        ) / consts.oracle_dissipativity
        sigma2 = consts.init_exp_moment + max(ideal, oracle)
    sigma2 = _check_nonneg(sigma2, "sigma2")
    empirical = (consts.gap_slope * math.sqrt(sigma2) + consts.gap_offset) * w2
    gibbs = (
        d
        / (2.0 * consts.beta)
        * math.log(
            math.e
            * consts.smoothness
            / consts.dissipativity
            * (consts.dissipativity_offset * consts.beta / d + 1.0)
        )
    )
    return FunctionGapBound(
        empirical_gap=empirical, gibbs_gap=gibbs, total=empirical + gibbs, sigma2=sigma2
    )
