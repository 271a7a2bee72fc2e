"""Pure-numpy reference implementation of the LTI stepping kernel.

Semantics are identical to the compiled gridloop._kernels extension; this
module is the import-time fallback and the ground truth the extension is
tested against.
"""

from __future__ import annotations

import numpy as np

# Input-combination rows are precomputed in blocks to keep memory bounded
# on long horizons (a 110 s run at dt = 1e-4 has ~1.1e6 steps).
_BLOCK = 8192


def run_lti(MA, G0, G1, U, x0, C, D, stride):
    """Run ``x[k+1] = MA x[k] + G0 u[k] + G1 u[k+1]``, recording outputs.

    Parameters
    ----------
    MA : (n, n) ndarray
    G0, G1 : (n, m) ndarray
    U : (K+1, m) ndarray
        Input samples on the step grid.
    x0 : (n,) ndarray
    C : (p, n) ndarray
    D : (p, m) ndarray
    stride : int
        Record ``y = C x + D u`` every ``stride`` steps (K must be a
        multiple of it).

    Returns
    -------
    Y : (K//stride + 1, p) ndarray
    x_final : (n,) ndarray
    bad_record : int
        -1 on success, else the index of the first recorded sample where
        the state was no longer finite (integration blow-up).
    """
    MA = np.ascontiguousarray(MA, dtype=float)
    U = np.ascontiguousarray(U, dtype=float)
    K = U.shape[0] - 1
    nrec = K // stride + 1
    Y = np.empty((nrec, C.shape[0]))
    x = np.array(x0, dtype=float, copy=True)
    Y[0] = C @ x + D @ U[0]

    G0T = np.ascontiguousarray(G0.T, dtype=float)
    G1T = np.ascontiguousarray(G1.T, dtype=float)
    j = 1
    for start in range(0, K, _BLOCK):
        stop = min(start + _BLOCK, K)
        G = U[start:stop] @ G0T + U[start + 1:stop + 1] @ G1T
        for k in range(start, stop):
            x = MA @ x + G[k - start]
            if (k + 1) % stride == 0:
                Y[j] = C @ x + D @ U[k + 1]
                if not np.isfinite(x.sum()):
                    return Y, x, j
                j += 1
    return Y, x, -1
