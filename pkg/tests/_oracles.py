"""Independent oracles used by the tests.

These deliberately avoid the library's own code paths: the stationary law
of the discrete linear chains is computed from first principles as the
fixed point of the covariance recursion, via Kronecker products and a
discrete Lyapunov solve.
"""

import numpy as np
from scipy.linalg import solve_discrete_lyapunov


def block_mask(dim, idx):
    u = np.zeros((dim, dim))
    u[idx, idx] = 1.0
    return u


def rblmc_stationary_cov(precision, blocks, lams, pmf, beta=1.0):
    """Fixed point of C = E_i[(I - lam_i U_i P) C (.)' + 2 lam_i / beta U_i]."""
    d = precision.shape[0]
    eye = np.eye(d)
    a = np.zeros((d * d, d * d))
    q = np.zeros((d, d))
    for idx, lam, phi in zip(blocks, lams, pmf):
        u = block_mask(d, idx)
        m = eye - lam * u @ precision
        a += phi * np.kron(m, m)
        q += phi * (2.0 * lam / beta) * u
    c_vec = np.linalg.solve(np.eye(d * d) - a, q.reshape(-1))
    c = c_vec.reshape(d, d)
    return (c + c.T) / 2.0


def cblmc_stationary_cov(precision, blocks, lams, order, beta=1.0):
    """Stationary covariance of the deterministic one-cycle linear map."""
    d = precision.shape[0]
    eye = np.eye(d)
    cycle = eye
    q_cycle = np.zeros((d, d))
    for n in order:
        u = block_mask(d, blocks[n])
        m = eye - lams[n] * u @ precision
        q_cycle = m @ q_cycle @ m.T + (2.0 * lams[n] / beta) * u
        cycle = m @ cycle
    c = solve_discrete_lyapunov(cycle, q_cycle)
    return (c + c.T) / 2.0
