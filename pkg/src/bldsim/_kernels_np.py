"""NumPy fallback for the block Euler-Maruyama kernel.

Semantics are identical to the compiled extension in ``_kernels.pyx``: per
step, the in-block drift is evaluated from the full current state, then the
block coordinates receive the drift update plus scaled Gaussian noise in one
simultaneous write.  Noise is drawn once per step as an (n, d_i) matrix so
that both backends consume the generator stream identically.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def run_em_steps(states, mat, offset, idx, steps, inv_beta, threshold, rng):
    """Advance ``states`` in place through the given step sizes.

    Arguments:
        states: (n, d) float64, modified in place.
        mat: (d_i, d) rows of the drift matrix for the block coordinates.
        offset: (d_i,) precomputed mat @ mean.
        idx: (d_i,) block coordinate indices.
        steps: (s,) step sizes (the last may be a shortened remainder).
        inv_beta: 1/beta, or 0.0 to disable noise.
        threshold: divergence threshold on max |coordinate|.
        rng: numpy Generator supplying the noise stream.

    Returns the number of completed steps; a value smaller than len(steps)
    means the ensemble diverged on that step.
    """
    idx = np.asarray(idx)
    contiguous = idx.size == 1 or bool(np.all(np.diff(idx) == 1))
    lo, hi = int(idx[0]), int(idx[-1]) + 1
    n = states.shape[0]
    di = idx.size
    for s, h in enumerate(steps):
        grad = states @ mat.T
        grad -= offset
        scale = np.sqrt(2.0 * h * inv_beta)
        if scale > 0.0:
            grad *= -h
            grad += scale * rng.standard_normal((n, di))
        else:
            grad *= -h
        if contiguous:
            block = states[:, lo:hi]
            block += grad
        else:
            states[:, idx] += grad
            block = states[:, idx]
        amax = float(np.abs(block).max())
        if not amax <= threshold:
            return s
    return len(steps)
