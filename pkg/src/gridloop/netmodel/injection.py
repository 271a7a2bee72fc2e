"""Step current injection caused by a topology change.

A switch event replaces the network matrix Y_B with Y_A while the node
voltages still sit at the pre-event values V₀; the mismatch appears as an
instantaneous injection ΔI_T = (Y_A − Y_B)·V₀, nonzero only at the
endpoints of changed lines.
"""

from __future__ import annotations

import numpy as np

from gridloop.netmodel.types import DeltaInjection

__all__ = ["delta_injection"]


def delta_injection(y_b: np.ndarray, y_a: np.ndarray, v0: np.ndarray,
                    description: str = "") -> DeltaInjection:
    """ΔI_T = (Y_A − Y_B)·V₀ on the stacked real form.

    ``v0`` may be the complex (N,) vector or the stacked real (2N,) vector;
    ``y_b``/``y_a`` are the 2N x 2N real block matrices.
    """
    if y_a.shape != y_b.shape:
        raise ValueError("Y_A and Y_B must have matching shapes")
    if np.iscomplexobj(v0):
        stacked = np.empty(2 * len(v0))
        stacked[0::2] = v0.real
        stacked[1::2] = v0.imag
        v0 = stacked
    if y_a.shape[0] != v0.shape[0]:
        raise ValueError("voltage vector does not match the matrices")
    return DeltaInjection(di_t=(y_a - y_b) @ v0, description=description)
