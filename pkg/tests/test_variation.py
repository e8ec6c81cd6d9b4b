"""Perturbation oracles and assumption-constant extraction."""

import numpy as np
import pytest

from bldsim import (
    GaussianTarget,
    generate_target,
    make_partition,
    perturb_precision,
    quadratic_constants,
    spectrum,
)


def test_zero_perturbation_is_exact_gradient():
    target = generate_target(4, seed=1)
    oracle, model, pd_flag = perturb_precision(target, 0.0, seed=0)
    assert pd_flag
    assert np.array_equal(oracle.matrix, target.precision)
    assert np.array_equal(model.delta, np.zeros((4, 4)))
    x = np.random.default_rng(0).standard_normal((10, 4))
    np.testing.assert_array_equal(oracle(x), target.gradient()(x))


def test_strong_perturbation_breaks_definiteness_at_paper_scale():
    target = generate_target(50, entry_range=(-5, 5), seed=0)
    flags = []
    for seed in range(5):
        _, _, pd_flag = perturb_precision(target, 0.6, seed=seed)
        flags.append(pd_flag)
    assert not any(flags)


def test_symmetrize_flag():
    target = generate_target(3, seed=2)
    oracle, model, _ = perturb_precision(target, 0.1, seed=3, symmetrize=True)
    assert np.array_equal(model.delta, model.delta.T)
    assert np.array_equal(oracle.matrix, oracle.matrix.T)
    _, model_a, _ = perturb_precision(target, 0.1, seed=3, symmetrize=False)
    assert not np.array_equal(model_a.delta, model_a.delta.T)


def test_eigenvalue_shift_bounded_by_gap_norm():
    # Weyl: |eig_i(perturbed) - eig_i(ideal)| <= |perturbed - ideal|_2.
    target = generate_target(5, seed=4)
    oracle, _, _ = perturb_precision(target, 0.05, seed=7, symmetrize=True)
    gap_norm = np.linalg.norm(oracle.matrix - target.precision, 2)
    shift = np.abs(spectrum(oracle.matrix) - spectrum(target.precision)).max()
    assert shift <= gap_norm + 1e-12


def test_quadratic_constants_identity_golden():
    d = 6
    target = GaussianTarget(precision=np.eye(d), mean=np.zeros(d), beta=1.0)
    part = make_partition(d, 2)
    consts = quadratic_constants(target, None, 0.0, 0.25, part)
    assert consts.smoothness == pytest.approx(1.0, rel=1e-12)
    assert consts.dissipativity == pytest.approx(1.0, rel=1e-12)
    assert consts.gamma == pytest.approx(1.0, rel=1e-12)
    assert consts.gap_slope == 0.0
    assert consts.gap_offset == 0.0
    assert consts.dissipativity_offset == 0.0
    # log E exp|w|^2 for N(0, I/4): -(d/2) log(1 - 1/2).
    assert consts.init_exp_moment == pytest.approx(d / 2 * np.log(2.0), rel=1e-12)
    assert consts.d_max == 3
    assert consts.dim == d
    assert consts.dissipative


def test_exp_moment_matches_monte_carlo():
    rng = np.random.default_rng(8)
    mean = np.array([0.3, -0.2])
    cov = np.array([[0.2, 0.05], [0.05, 0.15]])
    target = GaussianTarget(precision=np.eye(2), mean=np.zeros(2))
    consts = quadratic_constants(target, None, mean, cov, make_partition(2, 1))
    w = rng.multivariate_normal(mean, cov, size=2_000_000)
    mc = np.log(np.mean(np.exp(np.sum(w**2, axis=1))))
    assert consts.init_exp_moment == pytest.approx(mc, abs=5e-3)


def test_exp_moment_divergence_rejected():
    target = generate_target(3, seed=0)
    with pytest.raises(ValueError, match="exponential second moment"):
        quadratic_constants(target, None, 0.0, 0.5, make_partition(3, 1))


def test_gap_certified_on_random_points():
    # |ideal(x) - oracle(x)|^2 <= M^2 |x - u|^2 + B^2 over 1e4 points.
    target = generate_target(6, seed=5)
    oracle, _, _ = perturb_precision(target, 0.2, seed=11)
    consts = quadratic_constants(
        target, oracle.matrix, 0.0, 0.2, make_partition(6, 3)
    )
    rng = np.random.default_rng(1)
    x = rng.standard_normal((10_000, 6)) * 3.0
    gap = target.gradient()(x) - oracle(x)
    lhs = np.sum(gap**2, axis=1)
    rhs = consts.gap_slope**2 * np.sum((x - target.mean) ** 2, axis=1) + consts.gap_offset**2
    assert np.all(lhs <= rhs * (1 + 1e-10))


def test_oracle_lipschitz_certified():
    target = generate_target(5, seed=6)
    oracle, _, _ = perturb_precision(target, 0.3, seed=13)
    consts = quadratic_constants(target, oracle.matrix, 0.0, 0.2, make_partition(5, 1))
    rng = np.random.default_rng(2)
    x = rng.standard_normal((5000, 5))
    y = rng.standard_normal((5000, 5))
    num = np.linalg.norm(oracle(x) - oracle(y), axis=1)
    den = np.linalg.norm(x - y, axis=1)
    assert np.all(num <= consts.oracle_smoothness * den * (1 + 1e-10))


def test_oracle_dissipativity_certified_zero_mean():
    target = generate_target(4, seed=9)
    oracle, _, pd_flag = perturb_precision(target, 0.1, seed=17)
    assert pd_flag
    consts = quadratic_constants(target, oracle.matrix, 0.0, 0.2, make_partition(4, 2))
    assert consts.dissipative
    rng = np.random.default_rng(3)
    x = rng.standard_normal((10_000, 4)) * 2.0
    inner = np.sum(oracle(x) * x, axis=1)
    rhs = consts.oracle_dissipativity * np.sum(x**2, axis=1) - consts.oracle_dissipativity_offset
    assert np.all(inner >= rhs - 1e-9)


def test_dissipativity_certified_nonzero_mean():
    target = GaussianTarget(
        precision=np.array([[2.0, 0.3], [0.3, 1.0]]), mean=np.array([1.0, -0.5])
    )
    consts = quadratic_constants(target, None, 0.0, 0.2, make_partition(2, 1))
    rng = np.random.default_rng(4)
    x = rng.standard_normal((20_000, 2)) * 5.0
    inner = np.sum(target.gradient()(x) * x, axis=1)
    rhs = consts.dissipativity * np.sum(x**2, axis=1) - consts.dissipativity_offset
    assert np.all(inner >= rhs - 1e-9)


def test_lost_definiteness_marks_not_dissipative():
    target = generate_target(3, seed=1)
    flipped = target.precision - 2.0 * spectrum(target.precision)[-1] * np.eye(3)
    consts = quadratic_constants(target, flipped, 0.0, 0.2, make_partition(3, 1))
    assert not consts.dissipative
    assert consts.oracle_dissipativity is None


def test_delta_zero_gap_constants_vanish():
    target = generate_target(4, seed=2)
    consts = quadratic_constants(
        target, target.precision.copy(), 0.0, 0.1, make_partition(4, 4)
    )
    assert consts.gap_slope == 0.0
    assert consts.gap_offset == 0.0
    assert consts.d_max == 1


def test_gap_offset_nonzero_mean():
    target = GaussianTarget(precision=np.eye(2), mean=np.array([2.0, 0.0]))
    tilde = np.array([[1.5, 0.0], [0.0, 1.0]])
    consts = quadratic_constants(target, tilde, 0.0, 0.1, make_partition(2, 1))
    assert consts.gap_slope == pytest.approx(0.5, rel=1e-12)
    assert consts.gap_offset == pytest.approx(1.0, rel=1e-12)  # |(tilde - I) u|
