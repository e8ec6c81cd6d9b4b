"""Gaussian targets and closed-form distribution distances.

Targets are Gibbs measures over R^d defined by a symmetric positive-definite
precision matrix P, a mean u, and an inverse temperature beta:

    pi(x) proportional to exp(-beta/2 * (x-u)' P (x-u))

i.e. the Gaussian N(u, (beta*P)^-1).  Because targets and ensemble estimates
are both Gaussian, KL divergence and 2-Wasserstein distance have exact
closed forms, which is what makes quantitative convergence tracking possible
in the first place.  Everything in this module is a pure function of its
inputs and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AffineGradient",
    "GaussianEstimate",
    "GaussianTarget",
    "gaussian_kl",
    "gaussian_w2",
    "generate_target",
    "psd_sqrt",
    "spectrum",
]

# Relative tolerance for "is this matrix symmetric" checks.
_SYM_RTOL = 1e-12
# Eigenvalues of a nominally-PSD matrix may undershoot zero by this much
# (relative to trace/d) before we call it indefinite.
_PSD_RTOL = 1e-10


def _as_square(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def _check_symmetric(m: np.ndarray, name: str = "matrix") -> None:
    scale = max(float(np.abs(m).max(initial=0.0)), 1.0)
    asym = float(np.abs(m - m.T).max(initial=0.0))
    if asym > _SYM_RTOL * scale:
        raise ValueError(f"{name} is not symmetric (relative asymmetry {asym / scale:.3g})")


def spectrum(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, sorted ascending."""
    m = _as_square(m)
    _check_symmetric(m)
    return np.linalg.eigvalsh(m)


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Symmetric square root of a symmetric PSD matrix.

    Uses an eigendecomposition; eigenvalues within -1e-10*(trace/d) of zero
    are clamped to zero so that empirical covariances with estimation noise
    still pass.  Raises ValueError for genuinely indefinite input.
    """
    m = _as_square(m)
    _check_symmetric(m)
    d = m.shape[0]
    vals, vecs = np.linalg.eigh(m)
    tol = _PSD_RTOL * max(float(np.trace(m)) / d, 0.0)
    if vals[0] < -tol:
        raise ValueError(f"matrix is not PSD (min eigenvalue {vals[0]:.3g})")
    root = vecs * np.sqrt(np.clip(vals, 0.0, None)) @ vecs.T
    return (root + root.T) / 2.0


class AffineGradient:
    """Gradient field x -> M (x - u) of the quadratic (x-u)' M (x-u) / 2.

    Instances are immutable and shared freely across particle workers.  The
    ``matrix``/``mean`` attributes let the integrator dispatch to the
    compiled kernel instead of calling back into Python per step.
    """

    __slots__ = ("matrix", "mean")

    def __init__(self, matrix: np.ndarray, mean: np.ndarray | None = None):
        matrix = _as_square(matrix, "gradient matrix")
        d = matrix.shape[0]
        if mean is None:
            mean = np.zeros(d)
        mean = np.asarray(mean, dtype=np.float64).reshape(d)
        matrix = matrix.copy()
        mean = mean.copy()
        matrix.setflags(write=False)
        mean.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "mean", mean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("AffineGradient is immutable")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            return self.matrix @ (x - self.mean)
        return (x - self.mean) @ self.matrix.T


@dataclass(frozen=True)
class GaussianTarget:
    """Target measure N(mean, (beta * precision)^-1).

    ``precision`` must be symmetric positive definite and ``beta`` positive;
    violations raise ValueError at construction.
    """

    precision: np.ndarray
    mean: np.ndarray
    beta: float = 1.0

    def __post_init__(self):
        p = _as_square(self.precision, "precision")
        _check_symmetric(p, "precision")
        if np.linalg.eigvalsh(p)[0] <= 0.0:
            raise ValueError("precision is not positive definite")
        if not self.beta > 0.0:
            raise ValueError("beta must be positive")
        u = np.asarray(self.mean, dtype=np.float64).reshape(p.shape[0])
        p = p.copy()
        u = u.copy()
        p.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "precision", p)
        object.__setattr__(self, "mean", u)
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def dim(self) -> int:
        return self.precision.shape[0]

    def covariance(self) -> np.ndarray:
        """Covariance (beta * precision)^-1 of the target measure."""
        cov = np.linalg.inv(self.beta * self.precision)
        return (cov + cov.T) / 2.0

    def gradient(self) -> AffineGradient:
        """Exact gradient oracle of the potential (x-u)' P (x-u) / 2."""
        return AffineGradient(self.precision, self.mean)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw n exact samples, shape (n, d)."""
        chol = np.linalg.cholesky(self.covariance())
        return self.mean + rng.standard_normal((n, self.dim)) @ chol.T


@dataclass(frozen=True)
class GaussianEstimate:
    """Empirical Gaussian fit: mean, unbiased covariance, sample count."""

    mean: np.ndarray
    covariance: np.ndarray
    sample_count: int = field(default=2)

    def __post_init__(self):
        c = _as_square(self.covariance, "covariance")
        _check_symmetric(c, "covariance")
        d = c.shape[0]
        tol = _PSD_RTOL * max(float(np.trace(c)) / d, 0.0)
        if np.linalg.eigvalsh(c)[0] < -tol:
            raise ValueError("covariance is not PSD within tolerance")
        if self.sample_count < 2:
            raise ValueError("sample_count must be at least 2")
        u = np.asarray(self.mean, dtype=np.float64).reshape(d)
        c = c.copy()
        u = u.copy()
        c.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "covariance", c)
        object.__setattr__(self, "mean", u)
        object.__setattr__(self, "sample_count", int(self.sample_count))

    @property
    def dim(self) -> int:
        return self.covariance.shape[0]


def _moments(g) -> tuple[np.ndarray, np.ndarray]:
    """Extract (mean, covariance) from a target, estimate, or plain pair."""
    if isinstance(g, GaussianTarget):
        return g.mean, g.covariance()
    if isinstance(g, GaussianEstimate):
        return g.mean, g.covariance
    mean, cov = g
    return np.asarray(mean, dtype=np.float64), _as_square(cov, "covariance")


def generate_target(
    dim: int,
    entry_range: tuple[float, float] = (-5.0, 5.0),
    pd_margin: float = 1.2,
    seed: int = 0,
    beta: float = 1.0,
) -> GaussianTarget:
    """Construct a random symmetric PD precision matrix of size ``dim``.

    Entries are drawn i.i.d. uniform over ``entry_range``, the matrix is
    symmetrized as (A + A')/2, and if the smallest eigenvalue lambda_min is
    not positive the diagonal is shifted by pd_margin * |lambda_min|.  The
    mean is zero.  Deterministic in ``seed``.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    lo, hi = float(entry_range[0]), float(entry_range[1])
    if not lo < hi:
        raise ValueError("entry_range must be a nonempty interval")
    if not pd_margin > 1.0:
        raise ValueError("pd_margin must exceed 1")
    rng = np.random.default_rng(seed)
    a = rng.uniform(lo, hi, size=(dim, dim))
    a = (a + a.T) / 2.0
    lam_min = float(np.linalg.eigvalsh(a)[0])
    if lam_min <= 0.0:
        a = a + pd_margin * abs(lam_min) * np.eye(dim)
    return GaussianTarget(precision=a, mean=np.zeros(dim), beta=beta)


def gaussian_kl(estimate, target: GaussianTarget) -> float:
    """KL divergence of a Gaussian estimate from a Gaussian target.

    Closed form
        KL = [log det(S_pi) - log det(S_t) - d + tr(S_pi^-1 S_t)
              + (u_t - u_pi)' S_pi^-1 (u_t - u_pi)] / 2
    where S_pi = (beta * precision)^-1 is the target covariance.  Dimension
    mismatch or a singular estimate covariance raises ValueError.
    """
    u_t, s_t = _moments(estimate)
    if not isinstance(target, GaussianTarget):
        raise TypeError("target must be a GaussianTarget")
    d = target.dim
    if u_t.shape != (d,) or s_t.shape != (d, d):
        raise ValueError(
            f"dimension mismatch: estimate is {s_t.shape[0]}-dimensional, target is {d}"
        )
    prec_pi = target.beta * target.precision
    # log det S_pi = -log det(beta P); both via Cholesky to stay in log space.
    chol_pi = np.linalg.cholesky(prec_pi)
    logdet_s_pi = -2.0 * float(np.sum(np.log(np.diag(chol_pi))))
    try:
        chol_t = np.linalg.cholesky(s_t)
    except np.linalg.LinAlgError as exc:
        raise ValueError("degenerate estimate: covariance is singular") from exc
    logdet_s_t = 2.0 * float(np.sum(np.log(np.diag(chol_t))))
    trace_term = float(np.sum(prec_pi * s_t))
    diff = u_t - target.mean
    quad = float(diff @ prec_pi @ diff)
    kl = 0.5 * (logdet_s_pi - logdet_s_t - d + trace_term + quad)
    # Exact zero for identical inputs can round to a tiny negative value.
    return max(kl, 0.0)


def gaussian_w2(a, b) -> float:
    """2-Wasserstein distance between two Gaussians (Bures form).

    W2^2 = |u_a - u_b|^2 + tr[S_a + S_b - 2 (S_b^1/2 S_a S_b^1/2)^1/2].
    Symmetric in its arguments; raises ValueError when either covariance
    fails the PSD tolerance.
    """
    u_a, s_a = _moments(a)
    u_b, s_b = _moments(b)
    if u_a.shape != u_b.shape:
        raise ValueError("dimension mismatch between the two Gaussians")
    root_b = psd_sqrt(s_b)
    cross = psd_sqrt(root_b @ s_a @ root_b)
    w2sq = float(np.sum((u_a - u_b) ** 2)) + float(np.trace(s_a + s_b - 2.0 * cross))
    return math.sqrt(max(w2sq, 0.0))
