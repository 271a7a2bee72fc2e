"""Nonlinear dq power-flow solver for one switch state.

Newton–Raphson in polar form with ZIP voltage-dependent loads.  DG nodes
hold their scheduled active power and terminal-voltage magnitude; one DG
per energized island provides the angle reference and absorbs the power
imbalance.  Nodes with no path to any DG are de-energized (V = 0) and
excluded from the solve.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from gridloop.devices.params import LoadSpec
from gridloop.netmodel.admittance import complex_admittance
from gridloop.netmodel.types import (
    CapacityError,
    ConvergenceError,
    NetworkTopology,
    OperatingPoint,
    SwitchState,
)

__all__ = ["solve_operating_point", "energized_components", "total_load_at_nominal"]

_MAX_ITER = 50
_TOL = 1e-8


def energized_components(topo: NetworkTopology, sw: SwitchState
                         ) -> tuple[list[list[int]], list[int]]:
    """Split nodes into DG-reachable components and the de-energized rest."""
    index = topo.node_index
    n = topo.n_nodes
    adj: list[list[int]] = [[] for _ in range(n)]
    for ln in topo.lines:
        if sw.line_closed(ln):
            a, b = index[ln.from_node], index[ln.to_node]
            adj[a].append(b)
            adj[b].append(a)
    seen = np.full(n, -1)
    comps: list[list[int]] = []
    for start in range(n):
        if seen[start] >= 0:
            continue
        comp = [start]
        seen[start] = len(comps)
        stack = [start]
        while stack:
            for nb in adj[stack.pop()]:
                if seen[nb] < 0:
                    seen[nb] = len(comps)
                    comp.append(nb)
                    stack.append(nb)
        comps.append(sorted(comp))
    dg_nodes = {index[dg.node] for dg in topo.dgs}
    live = [c for c in comps if any(i in dg_nodes for i in c)]
    dead = sorted(i for c in comps if not any(j in dg_nodes for j in c) for i in c)
    return live, dead


class _NodeLoad:
    """Aggregate ZIP demand at one node: powers and slopes versus |V|."""

    def __init__(self, loads: Sequence[LoadSpec]):
        self.loads = list(loads)

    def eval(self, u: float) -> tuple[float, float, float, float]:
        p = q = dp = dq = 0.0
        for ld in self.loads:
            p += ld.p0 * (ld.z_p * u * u + ld.i_p * u + ld.p_p)
            q += ld.q0 * (ld.z_q * u * u + ld.i_q * u + ld.p_q)
            dp += ld.p0 * (2.0 * ld.z_p * u + ld.i_p)
            dq += ld.q0 * (2.0 * ld.z_q * u + ld.i_q)
        return p, q, dp, dq


def total_load_at_nominal(loads: Sequence[LoadSpec]) -> complex:
    """Total demand with every node at 1 pu voltage (ZIP sums are 1 there)."""
    return complex(sum(ld.p0 for ld in loads), sum(ld.q0 for ld in loads))


def _solve_component(nodes: list[int], y_std: np.ndarray,
                     node_loads: Mapping[int, _NodeLoad],
                     dg_p: Mapping[int, float], dg_v: Mapping[int, float],
                     slack: int, label: str) -> tuple[np.ndarray, float, int]:
    """Newton solve on one energized island; returns (V complex, residual, iters)."""
    n = len(nodes)
    pos = {g: i for i, g in enumerate(nodes)}
    y = y_std[np.ix_(nodes, nodes)]
    is_dg = np.zeros(n, dtype=bool)
    for g in dg_v:                       # every DG node, slack included
        is_dg[pos[g]] = True
    s = pos[slack]

    u = np.ones(n)
    for g, v in dg_v.items():
        u[pos[g]] = v
    th = np.zeros(n)

    p_idx = [i for i in range(n) if i != s]                 # P-mismatch rows
    q_idx = [i for i in range(n) if not is_dg[i]]           # Q rows / |V| unknowns
    n_p, n_q = len(p_idx), len(q_idx)

    def spec_terms(u_vec: np.ndarray):
        p_s = np.zeros(n)
        q_s = np.zeros(n)
        dp = np.zeros(n)
        dq = np.zeros(n)
        for g, i in pos.items():
            if g in node_loads:
                pl, ql, dpl, dql = node_loads[g].eval(u_vec[i])
                p_s[i] -= pl
                q_s[i] -= ql
                dp[i] -= dpl
                dq[i] -= dql
            if g in dg_p:
                p_s[i] += dg_p[g]
        return p_s, q_s, dp, dq

    for it in range(_MAX_ITER + 1):
        v = u * np.exp(1j * th)
        s_calc = v * np.conj(y @ v)
        p_spec, q_spec, dp_spec, dq_spec = spec_terms(u)
        mis_p = p_spec[p_idx] - s_calc.real[p_idx]
        mis_q = q_spec[q_idx] - s_calc.imag[q_idx]
        mismatch = max(
            float(np.max(np.abs(mis_p))) if n_p else 0.0,
            float(np.max(np.abs(mis_q))) if n_q else 0.0,
        )
        if mismatch < _TOL:
            return v, mismatch, it
        if it == _MAX_ITER:
            break

        # complex sensitivities of S_calc w.r.t. angles and magnitudes
        dv = np.diag(v)
        d_s_dth = 1j * (np.diag(s_calc) - dv @ np.conj(y) @ np.conj(dv))
        d_s_du = np.diag(s_calc / u) + dv @ np.conj(y) @ np.diag(np.exp(-1j * th))

        # Jacobian of (calc - spec); spec depends on |V| only (ZIP slopes)
        jac = np.zeros((n_p + n_q, n_p + n_q))
        jac[:n_p, :n_p] = d_s_dth.real[np.ix_(p_idx, p_idx)]
        jac[:n_p, n_p:] = d_s_du.real[np.ix_(p_idx, q_idx)] - np.diag(dp_spec)[np.ix_(p_idx, q_idx)]
        jac[n_p:, :n_p] = d_s_dth.imag[np.ix_(q_idx, p_idx)]
        jac[n_p:, n_p:] = d_s_du.imag[np.ix_(q_idx, q_idx)] - np.diag(dq_spec)[np.ix_(q_idx, q_idx)]

        rhs = np.concatenate([mis_p, mis_q])
        try:
            step = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(
                f"singular power-flow Jacobian in island {label} at iteration {it + 1}"
            ) from exc
        # damp oversized steps (keeps the Newton direction, guards flat starts)
        scale = 1.0
        if n_p:
            scale = max(scale, float(np.max(np.abs(step[:n_p]))) / 0.5)
        if n_q:
            scale = max(scale, float(np.max(np.abs(step[n_p:]))) / 0.1)
        step /= scale
        th[p_idx] += step[:n_p]
        u[q_idx] += step[n_p:]
        if np.any(u <= 0.0):
            raise ConvergenceError(
                f"voltage magnitude collapsed below zero in island {label} "
                f"at iteration {it + 1}")

    raise ConvergenceError(
        f"power flow did not converge in island {label} after {_MAX_ITER} "
        f"iterations (max mismatch {mismatch:.3e} pu)")


def solve_operating_point(topo: NetworkTopology, sw: SwitchState,
                          loads: Sequence[LoadSpec] | None = None,
                          dg_setpoints: Mapping[str, float] | None = None,
                          ) -> OperatingPoint:
    """Solve the nonlinear operating point for one switch configuration.

    Parameters
    ----------
    topo:
        Network description (nodes, lines, DG placements, loads).
    sw:
        Open/closed state for every switch.
    loads:
        Optional replacement load set; defaults to ``topo.loads``.  Loads at
        de-energized nodes draw nothing and are skipped.
    dg_setpoints:
        Optional per-DG scheduled active power overrides (pu on the system
        base), keyed by DG id.  Voltage setpoints always come from the specs.

    Returns
    -------
    OperatingPoint
        Node voltages (0 for de-energized nodes), drawn node currents
        ``Y_B @ V_0``, and per-DG injected currents and powers.
    """
    if loads is None:
        loads = topo.loads
    index = topo.node_index
    n = topo.n_nodes

    sched: dict[str, float] = {dg.dg_id: dg.p_sched for dg in topo.dgs}
    if dg_setpoints:
        unknown = set(dg_setpoints) - set(sched)
        if unknown:
            raise ValueError(f"setpoints for unknown DG ids: {sorted(unknown)}")
        sched.update(dg_setpoints)

    dg_at_node: dict[int, list] = {}
    for dg in topo.dgs:
        dg_at_node.setdefault(index[dg.node], []).append(dg)
    for i, dgs in dg_at_node.items():
        if len(dgs) > 1:
            ids = [d.dg_id for d in dgs]
            raise ValueError(f"multiple DGs at node {topo.nodes[i]!r}: {ids}")

    node_loads: dict[int, _NodeLoad] = {}
    for ld in loads:
        if ld.node not in index:
            raise ValueError(f"load references unknown node {ld.node!r}")
        node_loads.setdefault(index[ld.node], _NodeLoad([])).loads.append(ld)

    y_paper = complex_admittance(topo, sw)
    y_std = -y_paper
    live, dead = energized_components(topo, sw)

    v0 = np.zeros(n, dtype=complex)
    worst_residual = 0.0
    total_iters = 0
    for comp in live:
        comp_dgs = [dg_at_node[i][0] for i in comp if i in dg_at_node]
        label = f"{{{topo.nodes[comp[0]]}, ...}} ({len(comp)} nodes)"

        # feasibility gate: nominal demand must not exceed installed capacity
        p_demand = sum(ld.p0 for i in comp if i in node_loads
                       for ld in node_loads[i].loads)
        p_cap = sum(dg.s_rated_pu(topo.s_base) for dg in comp_dgs)
        if p_demand > p_cap:
            raise CapacityError(
                f"island {label} demands {p_demand:.3f} pu but its DGs are "
                f"rated for only {p_cap:.3f} pu")

        slack_dg = next((dg for dg in comp_dgs if dg.reference), comp_dgs[0])
        dg_p = {index[dg.node]: sched[dg.dg_id] for dg in comp_dgs
                if dg.dg_id != slack_dg.dg_id}
        dg_v = {index[dg.node]: dg.v_set for dg in comp_dgs}
        v_comp, res, iters = _solve_component(
            comp, y_std, node_loads, dg_p, dg_v, index[slack_dg.node], label)
        v0[comp] = v_comp
        worst_residual = max(worst_residual, res)
        total_iters += iters

    i0 = y_paper @ v0                     # drawn current at every node
    energized = np.ones(n, dtype=bool)
    energized[dead] = False

    i_dg0: dict[str, complex] = {}
    s_dg0: dict[str, complex] = {}
    for dg in topo.dgs:
        i = index[dg.node]
        i_load = 0j
        if i in node_loads and abs(v0[i]) > 0.0:
            u = abs(v0[i])
            pl, ql, _, _ = node_loads[i].eval(u)
            i_load = np.conj(complex(pl, ql) / v0[i])
        inj = i_load - i0[i]              # KCL: drawn = I_load - I_dg
        i_dg0[dg.dg_id] = complex(inj)
        s_dg0[dg.dg_id] = complex(v0[i] * np.conj(inj))

    return OperatingPoint(
        v0=v0, i0=i0, i_dg0=i_dg0, s_dg0=s_dg0, energized=energized,
        residual=worst_residual, iterations=total_iters)
