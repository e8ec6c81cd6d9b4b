"""Exact moment propagation against closed forms and theory rates."""

import numpy as np
import pytest

from bldsim import (
    GaussianTarget,
    Schedule,
    block_moment_step,
    exact_gaussian_moments,
    gaussian_kl,
    generate_target,
    make_partition,
    spectrum,
)


def test_stationary_law_is_fixed_point():
    target = generate_target(4, seed=1, beta=2.0)
    part = make_partition(4, 2)
    sched = Schedule.round_robin(2, 0.3)
    m0 = target.mean
    c0 = target.covariance()
    mean, cov = exact_gaussian_moments(target, part, sched, m0, c0, 7)
    np.testing.assert_allclose(mean, m0, atol=1e-12)
    np.testing.assert_allclose(cov, c0, atol=1e-12)


def test_scalar_ou_closed_form():
    target = GaussianTarget(precision=np.array([[1.0]]), mean=np.zeros(1))
    part = make_partition(1, 1)
    for t in (0.1, 0.5, 2.0):
        sched = Schedule.round_robin(1, t)
        mean, cov = exact_gaussian_moments(
            target, part, sched, np.array([1.0]), np.zeros((1, 1)), 1
        )
        assert mean[0] == pytest.approx(np.exp(-t), rel=1e-12)
        assert cov[0, 0] == pytest.approx(1.0 - np.exp(-2.0 * t), rel=1e-12)


def test_decoupled_coordinates_follow_their_own_ou():
    # Diagonal precision, one coordinate per block: during its block each
    # coordinate is a scalar OU process, frozen otherwise.
    a1, a2 = 2.0, 0.5
    target = GaussianTarget(precision=np.diag([a1, a2]), mean=np.zeros(2))
    part = make_partition(2, 2)
    lam = 0.4
    sched = Schedule.round_robin(2, lam)
    m0 = np.array([1.0, -2.0])
    c0 = np.diag([0.3, 0.1])
    traj = exact_gaussian_moments(target, part, sched, m0, c0, 2, return_trajectory=True)

    m1, c1 = traj[1]  # block 0 active
    assert m1[0] == pytest.approx(np.exp(-a1 * lam), rel=1e-12)
    assert m1[1] == -2.0
    assert c1[0, 0] == pytest.approx(
        0.3 * np.exp(-2 * a1 * lam) + (1 - np.exp(-2 * a1 * lam)) / a1, rel=1e-12
    )
    assert c1[1, 1] == 0.1

    m2, c2 = traj[2]  # block 1 active
    assert m2[0] == m1[0]
    assert m2[1] == pytest.approx(-2.0 * np.exp(-a2 * lam), rel=1e-12)
    assert c2[1, 1] == pytest.approx(
        0.1 * np.exp(-2 * a2 * lam) + (1 - np.exp(-2 * a2 * lam)) / a2, rel=1e-12
    )


def test_block_moment_step_matches_sequence_walk():
    target = generate_target(3, seed=3)
    part = make_partition(3, 2)
    sched = Schedule.round_robin(2, 0.2)
    m0 = np.array([1.0, 0.0, -1.0])
    c0 = 0.2 * np.eye(3)
    mean_a, cov_a = exact_gaussian_moments(target, part, sched, m0, c0, 1)
    mean_b, cov_b = block_moment_step(target, part.blocks[0], 0.2, m0, c0)
    np.testing.assert_allclose(mean_a, mean_b, atol=1e-14)
    np.testing.assert_allclose(cov_a, cov_b, atol=1e-14)


def test_explicit_block_sequence():
    target = generate_target(3, seed=5)
    part = make_partition(3, 2)
    sched = Schedule.round_robin(2, 0.1)
    by_cycle = exact_gaussian_moments(target, part, sched, np.zeros(3), 0.1 * np.eye(3), 4)
    by_sequence = exact_gaussian_moments(
        target, part, sched, np.zeros(3), 0.1 * np.eye(3), 4, block_sequence=[0, 1, 0, 1]
    )
    np.testing.assert_allclose(by_cycle[1], by_sequence[1], atol=1e-14)


def test_randomized_schedule_rejected_without_sequence():
    target = generate_target(2, seed=0)
    part = make_partition(2, 2)
    with pytest.raises(ValueError, match="cyclic schedule or an explicit"):
        exact_gaussian_moments(
            target, part, Schedule.uniform_random(2, 0.1), np.zeros(2), np.eye(2) * 0.1, 2
        )


def test_oracle_kl_non_increasing_over_block_steps():
    target = generate_target(4, seed=7)
    part = make_partition(4, 2)
    sched = Schedule.round_robin(2, 0.05)
    traj = exact_gaussian_moments(
        target, part, sched, np.zeros(4), 0.25 * np.eye(4), 30, return_trajectory=True
    )
    kls = [gaussian_kl((m, c), target) for m, c in traj]
    diffs = np.diff(kls)
    assert np.all(diffs <= 1e-12)


def test_full_block_kl_decay_rate_bound():
    # Single block: KL(t) <= exp(-2 gamma t / beta) KL(0) with
    # gamma = beta * lambda_min(P).
    target = generate_target(3, seed=11, beta=1.5)
    part = make_partition(3, 1)
    gamma = target.beta * spectrum(target.precision)[0]
    kl0 = gaussian_kl((np.zeros(3), 0.2 * np.eye(3)), target)
    for t in (0.05, 0.2, 0.8):
        sched = Schedule.round_robin(1, t)
        mean, cov = exact_gaussian_moments(
            target, part, sched, np.zeros(3), 0.2 * np.eye(3), 1
        )
        kl_t = gaussian_kl((mean, cov), target)
        assert kl_t <= np.exp(-2.0 * gamma / target.beta * t) * kl0 * (1 + 1e-10)
