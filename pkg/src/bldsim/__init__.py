"""Block Langevin diffusion sampling toolkit.

Simulates continuous-time block Langevin dynamics (randomized and cyclic
block selection), their discrete single-step variants, and device-variation
effects on Gaussian sampling, with exact moment oracles, closed-form
KL / Wasserstein diagnostics, and calculators for every convergence and
bias guarantee the model admits.
"""

from .backend import BACKEND_NAME, HAVE_COMPILED
from .blocks import BlockPartition, Schedule, make_partition
from .bounds import (
    BiasConstants,
    EpsilonSchedule,
    FunctionGapBound,
    bias_constants,
    cbld_kl_bound,
    cblmc_kl_bound,
    epsilon_schedule,
    function_gap_bound,
    ld_kl_bound,
    rbld_kl_bound,
    rblmc_kl_bound,
    w2_convergence_bound,
    w2_variation_distance,
)
from .config import ExperimentConfig, load_config
from .dynamics import (
    Ensemble,
    IntegratorConfig,
    NoiseSource,
    block_em_evolve,
    run_cbld,
    run_cblmc,
    run_rbld,
    run_rblmc,
)
from .gaussian import (
    AffineGradient,
    GaussianEstimate,
    GaussianTarget,
    gaussian_kl,
    gaussian_w2,
    generate_target,
    psd_sqrt,
    spectrum,
)
from .metrics import TraceRecord, estimate_gaussian, probe
from .moments import block_moment_step, exact_gaussian_moments
from .runner import run_experiment
from .targets_io import load_target, save_target, target_checksum
from .variation import (
    AssumptionConstants,
    PerturbationModel,
    perturb_precision,
    quadratic_constants,
)

__version__ = "0.1.0"
