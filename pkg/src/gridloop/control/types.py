"""Frequency-regulation configuration and fleet participation shares."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple


@dataclass(frozen=True)
class FleetShares:
    """Participation factors of the secondary/feedforward dispatch.

    alpha: per-SG low-frequency shares; beta: per-IG low-frequency
    shares; gamma: per-IG high-frequency shares.  sum(alpha)+sum(beta)
    must equal 1 and sum(gamma) must equal 1 (the dispatch covers the
    whole demand variation exactly).
    """

    alpha: Tuple[float, ...]
    beta: Tuple[float, ...]
    gamma: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))
        if len(self.beta) != len(self.gamma):
            raise ValueError("beta and gamma must have one entry per IG")
        s = sum(self.alpha) + sum(self.beta)
        if abs(s - 1.0) > 1e-12:
            raise ValueError(f"sum(alpha) + sum(beta) = {s!r}, expected 1")
        sg = sum(self.gamma)
        if abs(sg - 1.0) > 1e-12:
            raise ValueError(f"sum(gamma) = {sg!r}, expected 1")


@dataclass(frozen=True)
class FrConfig:
    """Gains and time constants of the frequency-regulation loops.

    m_g/n_i are per-unit droops (one per SG / per IG); k_ire/t_fi the
    df/dt-emulation gain and measurement filter per IG; P_f/I_f the
    shared secondary PI; T_L/T_H the dispatch split filters (T_H << T_L
    is the design assumption and T_H < T_L is enforced); T_S the
    secondary dispatch period used only by the sampled-SFC simulation
    mode.  M and D describe the lumped single-bus plant (total inertia
    and load damping).
    """

    t_l: float = 0.58
    t_h: float = 0.01
    t_s: float = 0.50
    p_f: float = 1.0
    i_f: float = 2.0
    m_total: float = 2.0
    d_total: float = 0.1
    m_g: Tuple[float, ...] = (0.40,)
    n_i: Tuple[float, ...] = (0.10,)
    k_ire: Tuple[float, ...] = (5.0,)
    t_fi: Tuple[float, ...] = (0.05,)

    def __post_init__(self):
        object.__setattr__(self, "m_g", tuple(float(v) for v in self.m_g))
        object.__setattr__(self, "n_i", tuple(float(v) for v in self.n_i))
        object.__setattr__(self, "k_ire", tuple(float(v) for v in self.k_ire))
        object.__setattr__(self, "t_fi", tuple(float(v) for v in self.t_fi))
        for name in ("t_l", "t_h", "t_s", "p_f", "i_f", "m_total", "d_total"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.t_h >= self.t_l:
            raise ValueError("T_H must be below T_L (dispatch-split assumption)")
        if not (len(self.n_i) == len(self.k_ire) == len(self.t_fi)):
            raise ValueError("n_i, k_ire, t_fi must have one entry per IG")
        if any(v <= 0 for v in self.m_g + self.n_i + self.t_fi):
            raise ValueError("droops and filter constants must be positive")
        if any(v < 0 for v in self.k_ire):
            raise ValueError("k_ire must be nonnegative")
