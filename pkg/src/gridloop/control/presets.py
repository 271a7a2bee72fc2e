"""Lumped single-bus presets for the frequency-loop analysis.

The fleet (four SGs at 0.42 MVA, four IGs at 0.31 MVA) is represented by
one equivalent SG and one equivalent IG: the scalar responses t_g/v_i
keep their device-level shapes, the participation shares collapse to
alpha = 0.6, beta = 0.4, gamma = 1.0, and the single-unit inertia,
damping, droops, and df/dt gain stand in for the groups.
"""

from __future__ import annotations

from typing import List, Tuple

from gridloop.control.types import FleetShares, FrConfig
from gridloop.devices.params import IgParams, SgParams, nominal_ig, nominal_sg
from gridloop.devices.scalar_tfs import governor_tf, inverter_tf
from gridloop.tfcore import RationalTF

__all__ = [
    "aggregate_cfg",
    "aggregate_shares",
    "aggregate_plants",
    "aggregate_device_params",
]


def aggregate_cfg(**overrides) -> FrConfig:
    """Single-bus loop configuration (one equivalent SG + one IG).

    The secondary PI pair (20, 30) puts the feedback-only resonance near
    2 rad/s — a clear interior peak for the delay-margin analysis —
    instead of the overdamped response the slow defaults would give.
    """
    base = dict(
        t_l=0.58,
        t_h=0.01,
        t_s=0.50,
        p_f=20.0,
        i_f=30.0,
        m_total=2.0,
        d_total=0.1,
        m_g=(0.40,),
        n_i=(0.10,),
        k_ire=(5.0,),
        t_fi=(0.05,),
    )
    base.update(overrides)
    return FrConfig(**base)


def aggregate_shares() -> FleetShares:
    return FleetShares(alpha=(0.6,), beta=(0.4,), gamma=(1.0,))


def aggregate_device_params() -> Tuple[List[SgParams], List[IgParams]]:
    return [nominal_sg()], [nominal_ig()]


def aggregate_plants() -> Tuple[List[RationalTF], List[RationalTF]]:
    sgs, igs = aggregate_device_params()
    return [governor_tf(p) for p in sgs], [inverter_tf(p) for p in igs]
