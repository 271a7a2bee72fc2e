"""Complex-step differentiation for device residual functions.

The residuals are written in plain analytic arithmetic (sums, products,
quotients, sin/cos, sqrt of positive arguments), so promoting one input
to ``x + ih`` and reading ``imag/h`` gives machine-precision derivatives
with no subtractive cancellation.  Tests cross-check against central
finite differences, which have independent error behavior.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

__all__ = ["jacobian_cs", "jacobian_fd"]

_STEP = 1e-30


def jacobian_cs(f: Callable[[np.ndarray], Sequence], x0: np.ndarray,
                h: float = _STEP) -> np.ndarray:
    """Jacobian of ``f`` at ``x0`` by complex-step differentiation."""
    x0 = np.asarray(x0, dtype=float)
    f0 = np.asarray(f(x0.astype(complex)))
    jac = np.empty((f0.size, x0.size))
    for k in range(x0.size):
        xp = x0.astype(complex)
        xp[k] += 1j * h
        jac[:, k] = np.asarray(f(xp)).imag / h
    return jac


def jacobian_fd(f: Callable[[np.ndarray], Sequence], x0: np.ndarray,
                h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian; independent oracle for the above."""
    x0 = np.asarray(x0, dtype=float)
    f0 = np.asarray(f(x0))
    jac = np.empty((f0.size, x0.size))
    for k in range(x0.size):
        xp = x0.copy()
        xm = x0.copy()
        xp[k] += h
        xm[k] -= h
        jac[:, k] = (np.asarray(f(xp)) - np.asarray(f(xm))) / (2.0 * h)
    return jac
