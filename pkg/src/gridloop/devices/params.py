"""Device parameter records and the nominal study-fleet values.

All reactances and gains are per-unit on the device's own rating unless
noted; time constants in seconds.  The nominal_* constructors return the
parameter sets used throughout the bundled fixtures and analysis presets.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SgParams:
    """Synchronous generator with governor, exciter, and speed droop."""

    s_rated: float = 0.42e6          # VA
    m_inertia: float = 2.0           # s (on own rating)
    x_d: float = 2.24
    x_d_t: float = 0.17              # transient
    x_d_st: float = 0.12             # subtransient
    x_q: float = 1.02
    x_q_t: float = 0.15
    x_q_st: float = 0.13
    r_s: float = 0.04
    x_l: float = 0.08                # stator leakage (bounds the subtransient)
    t_d0_t: float = 4.49             # d-axis open-circuit transient, s
    t_d0_st: float = 0.0681
    t_q0_t: float = 0.85
    t_q0_st: float = 0.034
    t_a: float = 0.02                # exciter lag
    k_a: float = 200.0               # exciter gain
    t1: float = 0.16                 # governor/prime-mover stages
    t2: float = 0.03
    t3: float = 0.017
    t4: float = 0.13
    t5: float = 0.08
    t6: float = 0.031
    droop_m: float = 0.40            # pu freq / pu power
    r_f: float = 0.05                # valve rate limit, pu/s (nonlinear; unused in
                                     # the linearized blocks, kept for completeness)

    def __post_init__(self):
        if not (self.x_d > self.x_d_t > self.x_d_st > 0):
            raise ValueError("require x_d > x_d' > x_d'' > 0")
        if not (self.x_q >= self.x_q_t > self.x_q_st > 0):
            raise ValueError("require x_q >= x_q' > x_q'' > 0")
        if not (self.x_d_st > self.x_l > 0):
            raise ValueError("leakage must satisfy 0 < x_l < x_d''")
        for name in ("t_d0_t", "t_d0_st", "t_q0_t", "t_q0_st", "t_a",
                     "t1", "t2", "t3", "t4", "t5", "t6"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.droop_m <= 0 or self.m_inertia <= 0 or self.s_rated <= 0:
            raise ValueError("rating, inertia, and droop must be positive")


@dataclass(frozen=True)
class IgParams:
    """Inverter-interfaced generator with current/power control loops."""

    s_rated: float = 0.31e6          # VA
    v_dc: float = 380.0              # V
    r_f: float = 1.22                # filter resistance, ohm
    l_f: float = 0.05                # filter inductance, H
    p_i: float = 20.0                # current-loop proportional gain
    i_i: float = 30.0                # current-loop integral gain
    t_e: float = 0.03                # power-tracking lag, s
    t_f: float = 0.05                # frequency-measurement filter, s
    droop_n: float = 0.10            # pu freq / pu power
    k_ire: float = 5.0               # inertia-emulation gain on df/dt

    def __post_init__(self):
        for name in ("s_rated", "v_dc", "r_f", "l_f", "p_i", "i_i",
                     "t_e", "t_f", "droop_n"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.k_ire < 0:
            raise ValueError("k_ire must be nonnegative")


@dataclass(frozen=True)
class LoadSpec:
    """Static ZIP load at one node.

    z_p/i_p/p_p are the constant-impedance/current/power shares of the
    active power (must sum to 1); the *_q triple likewise for reactive
    power.  ``damping`` is the aggregate frequency sensitivity used only
    by the lumped single-bus model.
    """

    node: str
    p0: float                        # pu on system base
    q0: float
    z_p: float = 1.4
    i_p: float = -2.0
    p_p: float = 1.6
    z_q: float = 1.4
    i_q: float = -2.0
    p_q: float = 1.6
    damping: float = 0.0

    def __post_init__(self):
        if abs(self.z_p + self.i_p + self.p_p - 1.0) > 1e-9:
            raise ValueError("active ZIP coefficients must sum to 1")
        if abs(self.z_q + self.i_q + self.p_q - 1.0) > 1e-9:
            raise ValueError("reactive ZIP coefficients must sum to 1")


def nominal_sg(**overrides) -> SgParams:
    """Study-fleet synchronous generator parameters."""
    return SgParams(**overrides)


def nominal_ig(**overrides) -> IgParams:
    """Study-fleet inverter generator parameters."""
    return IgParams(**overrides)


def nominal_zip() -> tuple[float, float, float]:
    """Study ZIP coefficient triple (impedance, current, power shares)."""
    return (1.4, -2.0, 1.6)
