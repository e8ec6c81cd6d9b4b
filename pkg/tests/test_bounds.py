"""Golden substitution values and internal consistency of the calculators."""

import math

import numpy as np
import pytest

from bldsim import (
    AssumptionConstants,
    Schedule,
    bias_constants,
    cbld_kl_bound,
    cblmc_kl_bound,
    epsilon_schedule,
    exact_gaussian_moments,
    function_gap_bound,
    gaussian_kl,
    generate_target,
    ld_kl_bound,
    make_partition,
    rbld_kl_bound,
    rblmc_kl_bound,
    spectrum,
    w2_convergence_bound,
    w2_variation_distance,
)


def consts(**overrides) -> AssumptionConstants:
    base = dict(
        gamma=1.0,
        smoothness=1.0,
        oracle_smoothness=1.0,
        dissipativity=1.0,
        dissipativity_offset=0.0,
        oracle_dissipativity=1.0,
        oracle_dissipativity_offset=0.0,
        gap_slope=0.0,
        gap_offset=0.0,
        init_exp_moment=0.0,
        d_max=1,
        beta=1.0,
        dim=2,
    )
    base.update(overrides)
    return AssumptionConstants(**base)


def test_ld_bound_goldens():
    c = consts()
    assert ld_kl_bound(c, kl0=3.0, t=0.0) == 3.0
    assert ld_kl_bound(c, kl0=3.0, t=math.log(2.0) / 2.0) == pytest.approx(1.5, rel=1e-12)
    with pytest.raises(ValueError):
        ld_kl_bound(c, kl0=1.0, t=-0.1)


def test_rbld_bound_goldens():
    c = consts()
    assert rbld_kl_bound(c, 0.5, 0.2, 0, kl0=2.0) == 2.0
    expected = math.exp(-2.0) * 2.0
    assert rbld_kl_bound(c, 0.5, 0.2, 10, kl0=2.0) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        rbld_kl_bound(c, 0.0, 0.2, 1, 1.0)


def test_rbld_full_probability_reduces_to_ld():
    c = consts(gamma=0.7, beta=1.3)
    lam, k = 0.11, 17
    assert rbld_kl_bound(c, 1.0, lam, k, 2.5) == pytest.approx(
        ld_kl_bound(c, 2.5, lam * k), rel=1e-14
    )


def test_cbld_bound_goldens_and_exponent_algebra():
    c = consts(gamma=0.9, beta=1.1)
    assert cbld_kl_bound(c, 0.3, 0, kl0=4.0) == 4.0
    lam, k = 0.25, 12
    for b in (2, 4):
        assert cbld_kl_bound(c, lam, k, 1.7) == pytest.approx(
            rbld_kl_bound(c, 1.0 / b, lam, b * k, 1.7), rel=1e-13
        )


def test_rblmc_bound_golden_substitution():
    c = consts(gamma=1.0)
    value = rblmc_kl_bound(
        c, smoothness=[1.0], block_dims=[2], lams=[0.1], pmf=[1.0], k=100, kl0=1.0
    )
    assert value == pytest.approx(math.exp(-10.0) + 0.8, rel=1e-12)


def test_rblmc_bias_vanishes_linearly():
    c = consts()
    def bias_at(lam):
        return rblmc_kl_bound(
            c, [1.0], [2], [lam], [1.0], k=0, kl0=0.0
        )
    assert bias_at(1e-3) / bias_at(1e-4) == pytest.approx(10.0, rel=1e-9)


def test_rblmc_precondition_names_block():
    c = consts()
    with pytest.raises(ValueError, match="block 1"):
        rblmc_kl_bound(c, [1.0, 4.0], [1, 1], [0.1, 0.1], [0.5, 0.5], 1, 1.0)


def test_cblmc_bound_golden_substitution():
    c = consts(gamma=1.0)
    value = cblmc_kl_bound(c, smoothness=[1.0], block_dims=[2], lams=[0.1], k_cycles=100, kl0=1.0)
    assert value == pytest.approx(math.exp(-10.0) + 0.8, rel=1e-12)


def test_cblmc_precondition():
    c = consts(gamma=0.1)
    with pytest.raises(ValueError, match="block 0"):
        cblmc_kl_bound(c, [1.0], [1], [0.1], 1, 1.0)  # limit gamma/(4 L^2) = 0.025


def test_bias_constants_zero_gap():
    b = bias_constants(consts(beta=3.0))
    assert b.c1 == 0.0 and b.c2 == 0.0
    assert b.zero_bias


def test_bias_constants_golden():
    # kappa0 = 0, c = 0, d_max = beta gives c0 = 12 + 8 = 20.
    b = bias_constants(consts(beta=3.0, d_max=3))
    assert b.c0 == pytest.approx(20.0, rel=1e-12)


def test_bias_constants_formulas():
    c = consts(beta=3.0, gap_slope=0.5, gap_offset=0.1, init_exp_moment=0.3,
               dissipativity_offset=0.2, d_max=2)
    b = bias_constants(c)
    assert b.c1 == pytest.approx(0.25 * 3.0 * 0.3 / 4 + 3.0 * 0.01 / 4, rel=1e-12)
    assert b.c2 == pytest.approx(0.25 * (2 + 3.0 * 0.2) / 4, rel=1e-12)
    assert b.c0 == pytest.approx(12 + 8 * (0.3 + 0.4 + 2 / 3.0), rel=1e-12)


def test_bias_constants_need_confinement():
    with pytest.raises(ValueError, match="beta > 2"):
        bias_constants(consts(beta=1.0, dissipativity=1.0))


def test_w2_variation_zero_bias_and_linearity():
    from bldsim import BiasConstants

    zero = BiasConstants(c0=20.0, c1=0.0, c2=0.0)
    assert w2_variation_distance(zero, lam=0.1, k=0) == 0.0
    assert w2_variation_distance(zero, lam=0.1, k=100) == 0.0
    nonzero = BiasConstants(c0=20.0, c1=1.0, c2=2.0)
    one = w2_variation_distance(nonzero, lam=0.5, k=4)
    two = w2_variation_distance(nonzero, lam=0.5, k=8)
    assert two == pytest.approx(2.0 * one, rel=1e-14)
    with pytest.raises(ValueError, match="k \\* lam > 1"):
        w2_variation_distance(nonzero, lam=0.5, k=1)


def test_w2_variation_formula_direct():
    from bldsim import BiasConstants

    b = BiasConstants(c0=20.0, c1=1.0, c2=4.0)
    lam, k = 0.25, 20
    expected = math.sqrt(20.0 * ((1.0 + 1.0) + (4.0 + 2.0) * 0.5)) * k * lam
    assert w2_variation_distance(b, lam, k) == pytest.approx(expected, rel=1e-14)


def test_w2_convergence_goldens():
    c = consts(gamma=2.0, beta=3.0)
    bias = bias_constants(c)  # zero-gap device: pure exponential part
    start = w2_convergence_bound(c, bias, lam=0.1, k_cycles=0, kl0=4.5)
    assert start == pytest.approx(math.sqrt(2.0 * 4.5 / 2.0), rel=1e-12)
    late = w2_convergence_bound(c, bias, lam=0.1, k_cycles=1e6, kl0=4.5)
    assert late < 1e-30


def test_epsilon_schedule_log_arithmetic():
    c = consts(beta=3.0)
    a = epsilon_schedule(c, kl0=2.0, eps=0.1)
    b = epsilon_schedule(c, kl0=2.0, eps=0.05)
    assert b.total_block_time - a.total_block_time == pytest.approx(
        3.0 * math.log(2.0), rel=1e-12
    )


def test_epsilon_schedule_zero_bias_hits_half_eps():
    c = consts(beta=3.0)
    sched = epsilon_schedule(c, kl0=2.0, eps=0.1)
    assert sched.w2_bound == pytest.approx(0.05, rel=1e-12)
    assert sched.w2_bound_loose == pytest.approx(0.05, rel=1e-12)


def test_epsilon_schedule_crosscheck_against_convergence_bound():
    c = consts(
        beta=3.0, gap_slope=0.5, gap_offset=0.1, init_exp_moment=0.3,
        dissipativity_offset=0.2, d_max=2,
    )
    kl0, eps = 2.0, 0.05
    sched = epsilon_schedule(c, kl0, eps)
    # Independent re-evaluation of the convergence bound at the selections.
    bias = bias_constants(c)
    k = sched.total_block_time / sched.lam_max
    direct = w2_convergence_bound(c, bias, sched.lam_max, k, kl0, num_blocks=1)
    assert abs(direct - sched.w2_bound) < 1e-10
    # Manual formula rebuild, as a second route.
    ideal = math.sqrt(2.0 / c.gamma) * math.exp(
        -c.gamma / c.beta * sched.total_block_time
    ) * math.sqrt(kl0)
    inner = (bias.c1 + math.sqrt(bias.c1)) + (bias.c2 + math.sqrt(bias.c2)) * math.sqrt(
        sched.lam_max
    )
    manual = ideal + math.sqrt(bias.c0 * inner) * k * sched.lam_max
    assert abs(manual - sched.w2_bound) < 1e-10
    assert ideal == pytest.approx(eps / 2.0, rel=1e-12)
    assert sched.w2_bound <= sched.w2_bound_loose + 1e-12


def test_epsilon_schedule_rejects_huge_eps():
    with pytest.raises(ValueError, match="eps too large"):
        epsilon_schedule(consts(beta=3.0), kl0=0.01, eps=50.0)


def test_function_gap_zero_gap_device():
    g = function_gap_bound(consts(beta=2.5), w2=1.3, sigma2=4.0)
    assert g.empirical_gap == 0.0


def test_function_gap_isotropic_golden():
    # c = 0 and L = m collapse the log to 1: gibbs gap = d / (2 beta).
    c = consts(beta=2.0, dim=6)
    g = function_gap_bound(c, w2=0.0, sigma2=1.0)
    assert g.gibbs_gap == pytest.approx(6 / (2 * 2.0), rel=1e-12)
    assert g.total == g.gibbs_gap


def test_function_gap_dominates_exact_gaussian_gap():
    # Exact E_pi[f] - min f = d / (2 beta) for a quadratic potential.
    target = generate_target(2, seed=3)
    eigs = spectrum(target.precision)
    beta = 1.01 * max(1.0, 2.0 / float(eigs[0]))
    c = consts(
        beta=beta, dim=2, smoothness=float(eigs[-1]), dissipativity=float(eigs[0]),
        gamma=beta * float(eigs[0]),
    )
    g = function_gap_bound(c, w2=0.0, sigma2=1.0)
    assert g.gibbs_gap >= 2 / (2.0 * beta)


def test_function_gap_sigma2_computed():
    c = consts(beta=2.5, dim=4, init_exp_moment=0.7, dissipativity=2.0,
               oracle_dissipativity=1.0, dissipativity_offset=0.5,
               oracle_dissipativity_offset=0.25, gap_slope=0.3)
    g = function_gap_bound(c, w2=2.0)
    ideal = (0.5 + 4 / 2.5) / 2.0
    oracle = (0.25 + 4 / 2.5) / 1.0
    assert g.sigma2 == pytest.approx(0.7 + max(ideal, oracle), rel=1e-12)
    assert g.empirical_gap == pytest.approx((0.3 * math.sqrt(g.sigma2)) * 2.0, rel=1e-12)


def test_function_gap_needs_dissipative_oracle():
    c = consts(beta=2.5, oracle_dissipativity=None, oracle_dissipativity_offset=None)
    with pytest.raises(ValueError, match="not dissipative"):
        function_gap_bound(c, w2=1.0)
    # but an explicit sigma2 sidesteps the second-moment computation
    assert function_gap_bound(c, w2=1.0, sigma2=2.0).empirical_gap == 0.0


def test_function_gap_needs_confinement():
    with pytest.raises(ValueError, match="beta >= 2"):
        function_gap_bound(consts(beta=1.0, dissipativity=0.5), w2=0.0, sigma2=1.0)


def test_bounds_monotone_in_step_count():
    c = consts(gamma=0.8)
    ks = np.arange(0, 40)
    rb = [rbld_kl_bound(c, 0.25, 0.1, k, 5.0) for k in ks]
    assert np.all(np.diff(rb) <= 0)
    from bldsim import BiasConstants

    b = BiasConstants(c0=20.0, c1=0.5, c2=0.5)
    w2s = [w2_variation_distance(b, 0.5, k) for k in range(3, 40)]
    assert np.all(np.diff(w2s) >= 0)


def test_oracle_law_dominated_by_bounds_small_case():
    # Exact cyclic law at cycle boundaries vs both bound families.
    target = generate_target(3, seed=13)
    part = make_partition(3, 3)
    gamma = float(spectrum(target.precision)[0])
    lam = 0.1 / gamma
    sched = Schedule.round_robin(3, lam)
    c = consts(gamma=gamma, beta=1.0, dim=3)
    m0, c0 = np.zeros(3), 0.25 * np.eye(3)
    kl0 = gaussian_kl((m0, c0), target)
    traj = exact_gaussian_moments(target, part, sched, m0, c0, 3 * 30, return_trajectory=True)
    for cycle in range(1, 31):
        kl = gaussian_kl(traj[3 * cycle], target)
        assert kl <= cbld_kl_bound(c, lam, cycle, kl0)
        assert kl <= rbld_kl_bound(c, 1.0 / 3.0, lam, 3 * cycle, kl0)
