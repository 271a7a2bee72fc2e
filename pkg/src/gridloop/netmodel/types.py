"""Network domain types: admittances, topology, switch states, operating points.

The network lives in a synchronously rotating dq frame.  A complex phasor
``z = x + jy`` and its 2-vector form ``[x, y]`` are used interchangeably:
complex multiplication by an admittance ``y = G + jB`` is the 2x2 block
``[[G, -B], [B, G]]`` acting on the stacked vector.  Node ``j`` of an
N-node network owns rows ``2j`` (d) and ``2j + 1`` (q) of any stacked
quantity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Mapping

import numpy as np

from gridloop.devices.params import IgParams, LoadSpec, SgParams

__all__ = [
    "AdmittanceBlock",
    "Line",
    "DgSpec",
    "NetworkTopology",
    "SwitchState",
    "OperatingPoint",
    "DeltaInjection",
    "PowerFlowError",
    "ConvergenceError",
    "CapacityError",
]


class PowerFlowError(RuntimeError):
    """Base class for operating-point solver failures."""


class ConvergenceError(PowerFlowError):
    """Newton iteration did not reach the residual tolerance."""


class CapacityError(PowerFlowError):
    """Connected generation cannot cover the connected demand."""


@dataclass(frozen=True)
class AdmittanceBlock:
    """Series admittance of one line, ``y = g + jb`` in pu.

    Rendered as the 2x2 scaled-rotation block [[g, -b], [b, g]], which
    commutes with frame rotations.
    """

    g: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.g) and math.isfinite(self.b)):
            raise ValueError("admittance entries must be finite")

    @classmethod
    def from_impedance(cls, r_ohm: float, x_ohm: float, z_base_ohm: float) -> "AdmittanceBlock":
        """Convert a series impedance in ohms to a pu admittance block."""
        z = complex(r_ohm, x_ohm) / z_base_ohm
        if z == 0:
            raise ValueError("line impedance must be nonzero")
        y = 1.0 / z
        return cls(g=y.real, b=y.imag)

    @property
    def as_complex(self) -> complex:
        return complex(self.g, self.b)

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.g, -self.b], [self.b, self.g]])


@dataclass(frozen=True)
class Line:
    """One branch; ``switch_id`` marks it switchable."""

    from_node: str
    to_node: str
    y: AdmittanceBlock
    switch_id: str | None = None

    def __post_init__(self):
        if self.from_node == self.to_node:
            raise ValueError(f"self-loop at node {self.from_node!r}")


@dataclass(frozen=True)
class DgSpec:
    """A DG unit attached to one node, with its device parameters and
    the fleet-share coefficients used by the frequency-regulation loops."""

    dg_id: str
    node: str
    kind: Literal["sg", "ig"]
    params: SgParams | IgParams
    p_sched: float = 0.0            # scheduled active power, pu on system base
    v_set: float = 1.0              # terminal voltage setpoint, pu
    reference: bool = False         # angle reference / slack unit
    alpha: float = 0.0              # SG secondary participation share
    beta: float = 0.0               # IG secondary low-frequency share
    gamma: float = 0.0              # IG secondary high-frequency share

    def __post_init__(self):
        if self.kind == "sg" and not isinstance(self.params, SgParams):
            raise TypeError(f"{self.dg_id}: sg unit needs SgParams")
        if self.kind == "ig" and not isinstance(self.params, IgParams):
            raise TypeError(f"{self.dg_id}: ig unit needs IgParams")
        if self.v_set <= 0:
            raise ValueError(f"{self.dg_id}: voltage setpoint must be positive")

    def s_rated_pu(self, s_base: float) -> float:
        """Apparent-power rating in pu of the given system base."""
        return self.params.s_rated / s_base


@dataclass(frozen=True)
class NetworkTopology:
    """Immutable network description: nodes, lines, bases, attachments."""

    nodes: tuple[str, ...]
    lines: tuple[Line, ...]
    s_base: float = 1.0e6           # VA
    v_base: float = 4800.0          # V line-to-line
    f_0: float = 60.0               # Hz
    dgs: tuple[DgSpec, ...] = ()
    loads: tuple[LoadSpec, ...] = ()
    initial_switches: Mapping[str, str] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("node names must be unique")
        known = set(self.nodes)
        switch_ids: list[str] = []
        for ln in self.lines:
            if ln.from_node not in known or ln.to_node not in known:
                raise ValueError(f"line {ln.from_node}-{ln.to_node} references unknown node")
            if ln.switch_id is not None:
                switch_ids.append(ln.switch_id)
        if len(set(switch_ids)) != len(switch_ids):
            raise ValueError("switch ids must be unique")
        for dg in self.dgs:
            if dg.node not in known:
                raise ValueError(f"DG {dg.dg_id} at unknown node {dg.node!r}")
        if len({dg.dg_id for dg in self.dgs}) != len(self.dgs):
            raise ValueError("DG ids must be unique")
        for ld in self.loads:
            if ld.node not in known:
                raise ValueError(f"load at unknown node {ld.node!r}")
        extra = set(self.initial_switches) - set(switch_ids)
        if extra:
            raise ValueError(f"initial state for unknown switches: {sorted(extra)}")
        if not self._connected_all_closed():
            raise ValueError("network must be connected when all switches are closed")

    def _connected_all_closed(self) -> bool:
        if not self.nodes:
            return True
        index = {n: i for i, n in enumerate(self.nodes)}
        adj: list[list[int]] = [[] for _ in self.nodes]
        for ln in self.lines:
            a, b = index[ln.from_node], index[ln.to_node]
            adj[a].append(b)
            adj[b].append(a)
        seen = {0}
        stack = [0]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == len(self.nodes)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def node_index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.nodes)}

    @property
    def switch_ids(self) -> tuple[str, ...]:
        return tuple(ln.switch_id for ln in self.lines if ln.switch_id is not None)

    @property
    def z_base_ohm(self) -> float:
        return self.v_base**2 / self.s_base

    def initial_state(self) -> "SwitchState":
        """Switch state declared by the fixture (missing ids default closed)."""
        return SwitchState.from_topology(self, self.initial_switches)

    def sg_specs(self) -> tuple[DgSpec, ...]:
        return tuple(d for d in self.dgs if d.kind == "sg")

    def ig_specs(self) -> tuple[DgSpec, ...]:
        return tuple(d for d in self.dgs if d.kind == "ig")

    def loads_at(self, node: str) -> tuple[LoadSpec, ...]:
        return tuple(ld for ld in self.loads if ld.node == node)


@dataclass(frozen=True)
class SwitchState:
    """Open/closed assignment covering every switchable line exactly once."""

    states: tuple[tuple[str, str], ...]   # sorted (switch_id, "open"|"closed")

    @classmethod
    def from_topology(cls, topo: NetworkTopology,
                      states: Mapping[str, str] | None = None) -> "SwitchState":
        states = dict(states or {})
        assignment: dict[str, str] = {}
        for sid in topo.switch_ids:
            val = states.pop(sid, "closed")
            if val not in ("open", "closed"):
                raise ValueError(f"switch {sid}: state must be 'open' or 'closed', got {val!r}")
            assignment[sid] = val
        if states:
            raise ValueError(f"states given for unknown switches: {sorted(states)}")
        return cls(states=tuple(sorted(assignment.items())))

    @property
    def as_dict(self) -> dict[str, str]:
        return dict(self.states)

    def is_closed(self, switch_id: str) -> bool:
        try:
            return self.as_dict[switch_id] == "closed"
        except KeyError:
            raise KeyError(f"unknown switch {switch_id!r}") from None

    def with_changes(self, **changes: str) -> "SwitchState":
        d = self.as_dict
        for sid, val in changes.items():
            if sid not in d:
                raise KeyError(f"unknown switch {sid!r}")
            if val not in ("open", "closed"):
                raise ValueError(f"switch {sid}: state must be 'open' or 'closed'")
            d[sid] = val
        return SwitchState(states=tuple(sorted(d.items())))

    def toggled(self, switch_id: str) -> "SwitchState":
        return self.with_changes(**{switch_id: "open" if self.is_closed(switch_id) else "closed"})

    def line_closed(self, line: Line) -> bool:
        """A line conducts unless it carries an open switch."""
        return line.switch_id is None or self.is_closed(line.switch_id)


@dataclass(frozen=True)
class OperatingPoint:
    """Steady-state solution on one topology/switch state.

    ``v0`` holds the complex node voltages (zero on de-energized islands);
    ``i0 = Y_B v0`` is the net current *drawn* from the network at each
    node; ``i_dg0`` maps DG ids to their injected current; ``s_dg0`` to
    their solved complex power (pu on system base).
    """

    v0: np.ndarray                   # complex (N,)
    i0: np.ndarray                   # complex (N,)
    i_dg0: Mapping[str, complex]
    s_dg0: Mapping[str, complex]
    energized: np.ndarray            # bool (N,)
    residual: float
    iterations: int

    @staticmethod
    def stack(z: np.ndarray) -> np.ndarray:
        """Interleave a complex (N,) vector into the real (2N,) dq form."""
        out = np.empty(2 * len(z))
        out[0::2] = z.real
        out[1::2] = z.imag
        return out

    @property
    def v0_stacked(self) -> np.ndarray:
        return self.stack(self.v0)

    @property
    def i0_stacked(self) -> np.ndarray:
        return self.stack(self.i0)


@dataclass(frozen=True)
class DeltaInjection:
    """Step current injection ``dI_T = (Y_A − Y_B) V₀`` caused by a switch event."""

    di_t: np.ndarray                 # real stacked (2N,)
    description: str = ""

    @property
    def nonzero_nodes(self) -> tuple[int, ...]:
        blocks = self.di_t.reshape(-1, 2)
        return tuple(int(i) for i in np.nonzero(np.abs(blocks).sum(axis=1) > 1e-14)[0])

    def scaled(self, factor: float) -> "DeltaInjection":
        return DeltaInjection(di_t=self.di_t * factor, description=self.description)
