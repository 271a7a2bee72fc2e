"""Admittance-matrix assembly for a given switch state.

Sign convention: the diagonal block of node j is the *negated* sum of its
incident line admittances and the off-diagonal block jk is +y_jk, so that
``I = Y V`` yields the current each node draws from the network.  With no
shunt elements every block row sums to the zero block.
"""

from __future__ import annotations

import numpy as np

from gridloop.netmodel.types import NetworkTopology, SwitchState

__all__ = ["build_admittance", "complex_admittance", "to_real_blocks"]


def complex_admittance(topo: NetworkTopology, sw: SwitchState) -> np.ndarray:
    """N x N complex form of the network matrix (same sign convention)."""
    index = topo.node_index
    n = topo.n_nodes
    y = np.zeros((n, n), dtype=complex)
    for ln in topo.lines:
        if not sw.line_closed(ln):
            continue
        a, b = index[ln.from_node], index[ln.to_node]
        yl = ln.y.as_complex
        y[a, a] -= yl
        y[b, b] -= yl
        y[a, b] += yl
        y[b, a] += yl
    return y


def to_real_blocks(y: np.ndarray) -> np.ndarray:
    """Expand an N x N complex matrix into its 2N x 2N real block form."""
    n = y.shape[0]
    out = np.zeros((2 * n, 2 * n))
    out[0::2, 0::2] = y.real
    out[1::2, 1::2] = y.real
    out[0::2, 1::2] = -y.imag
    out[1::2, 0::2] = y.imag
    return out


def build_admittance(topo: NetworkTopology, sw: SwitchState) -> np.ndarray:
    """2N x 2N real block admittance matrix for one switch state.

    Open-switch lines contribute nothing; the result depends only on the
    switch state, so rebuilding with the same state reproduces the matrix
    exactly.
    """
    return to_real_blocks(complex_admittance(topo, sw))
