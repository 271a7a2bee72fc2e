"""Linearized device blocks around a solved operating point.

Each block is an exact Jacobian (complex-step differentiation) of a
nonlinear device model written in analytic real arithmetic:

* synchronous generator — two-axis machine with subtransient saliency
  (6 machine states), first-order high-gain exciter, and the two-stage
  governor realized in controllable-canonical form (4 states);
* inverter generator — RL output filter with decoupled current PI
  (4 states), first-order power-tracking lag, proportional
  reactive/voltage control, and a first-order frequency-measurement
  state;
* static ZIP load — 2×2 current/voltage Jacobian.

Interface convention: inputs are the terminal dq voltage deviation
(system pu, network frame), a power reference deviation ΔFR (system pu,
unit DC power gain), and — for inverters — the measured frequency
deviation (pu), wired to the system frequency during assembly.  Output
is the injected dq current deviation in system pu.  Primary-frequency
droop and inertia-emulation loops are *not* inside the blocks; the
blocks expose the gains (``pfc_gain``, ``ire_gain``) for the external
frequency-regulation layer to close.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from gridloop.devices._linearize import jacobian_cs
from gridloop.devices.params import IgParams, LoadSpec, SgParams
from gridloop.devices.scalar_tfs import governor_tf
from gridloop.tfcore import tf_to_ss

__all__ = ["DgBlock", "sg_block", "ig_block", "load_block"]

# invented proportional gain for the inverter reactive/voltage channel (the
# source material sizes only the current loop).  Proportional rather than
# integral action: an integrator on terminal voltage has a zero eigenvalue
# in the isolated block (the loop closes only through the network), and
# paralleled integrators fight over the same bus voltage.
_KPV = 2.0

_STAB_TOL = 1e-9


@dataclass(frozen=True)
class DgBlock:
    """One DG unit linearized at its operating point.

    dx/dt = a·x + b_v·ΔV + b_fr·ΔFR + b_fm·Δf_meas,  ΔI = c_i·x + d_v·ΔV.

    Besides the current output, two scalar power rows are exposed (system
    pu): ``c_pe``/``d_pe`` give the converted electrical power (air-gap for
    machines, terminal for inverters) and ``c_pm`` the mechanical/tracked
    power — the quantities the frequency-regulation layer meters.
    """

    dg_id: str
    node: str
    kind: str                      # "sg" | "ig"
    a: np.ndarray                  # (n, n)
    b_v: np.ndarray                # (n, 2)
    b_fr: np.ndarray               # (n,)
    b_fm: np.ndarray               # (n,)  zeros for SG units
    c_i: np.ndarray                # (2, n) injected dq current, system pu
    d_v: np.ndarray                # (2, 2)
    c_pe: np.ndarray               # (n,)  electrical power row, system pu
    d_pe: np.ndarray               # (2,)  its ΔV feedthrough
    c_pm: np.ndarray               # (n,)  mechanical/tracked power row
    state_labels: tuple[str, ...]
    freq_state: int                # index of the frequency-labeled state
    rotation: np.ndarray           # (n,) generator of uniform phasor rotation
    x0: np.ndarray                 # (n,) equilibrium state, device units
    v0: complex                    # terminal voltage, system pu
    i0: complex                    # injected current, system pu
    inertia_sys: float             # rotor inertia on the system base (0 for IG)
    pfc_gain: float                # droop feedback gain, system pu power/pu freq
    ire_gain: float                # inertia-emulation gain, system pu (0 for SG)
    params: SgParams | IgParams

    @property
    def n_states(self) -> int:
        return self.a.shape[0]

    def __post_init__(self):
        n = self.a.shape[0]
        if len(self.state_labels) != n:
            raise ValueError("one label per state required")
        if not 0 <= self.freq_state < n:
            raise ValueError("frequency state index out of range")


def _split(jac: np.ndarray, n: int):
    """Split a stacked [residual; outputs] Jacobian over [x; u]."""
    return jac[:n, :n], jac[:n, n:], jac[n:, :n], jac[n:, n:]


def _build(f: Callable, x0: np.ndarray, n_in: int, n: int):
    z0 = np.concatenate([x0, np.zeros(n_in)])
    resid = np.asarray(f(z0.astype(complex)))[:n]
    worst = float(np.max(np.abs(resid)))
    if worst > 1e-9:
        raise ValueError(
            f"operating point is not an equilibrium (residual {worst:.2e})")
    return _split(jacobian_cs(f, z0), n)


def _check_stable(a: np.ndarray, who: str) -> None:
    lam = np.linalg.eigvals(a)
    worst = float(lam.real.max())
    if worst >= _STAB_TOL:
        raise ValueError(
            f"{who}: isolated block unstable (max Re eigenvalue {worst:.3e}); "
            "linearization point is not a valid equilibrium")


# ---------------------------------------------------------------------------
# synchronous generator

_SG_LABELS = ("delta", "delta_omega", "eq_t", "psi_1d", "ed_t", "psi_2q",
              "e_fd", "gov_1", "gov_2", "gov_3", "gov_4")


def _sg_model(p: SgParams, v0: complex, i0: complex, *,
              s_base: float, f_0: float):
    """Nonlinear residual/output function and equilibrium state for one SG.

    Returns ``(fun, x0)`` where ``fun`` maps the stacked vector
    ``[x (11); ΔV_d, ΔV_q, ΔFR]`` to ``[ẋ (11); ΔI_d, ΔI_q, P_e, P_m]``
    in analytic real arithmetic (complex-step safe).
    """
    ratio = p.s_rated / s_base
    w_s = 2.0 * math.pi * f_0
    i_dev = i0 / ratio                     # device-pu injected current

    # classical two-axis initialization
    delta0 = cmath.phase(v0 + complex(p.r_s, p.x_q) * i_dev)
    rot = cmath.exp(-1j * (delta0 - math.pi / 2.0))
    vdq = v0 * rot
    idq = i_dev * rot
    v_d0, v_q0 = vdq.real, vdq.imag
    i_d0, i_q0 = idq.real, idq.imag

    g_d1 = (p.x_d_st - p.x_l) / (p.x_d_t - p.x_l)
    g_d2 = (p.x_d_t - p.x_d_st) / (p.x_d_t - p.x_l) ** 2
    g_q1 = (p.x_q_st - p.x_l) / (p.x_q_t - p.x_l)
    g_q2 = (p.x_q_t - p.x_q_st) / (p.x_q_t - p.x_l) ** 2

    psi_d0 = v_q0 + p.r_s * i_q0 + p.x_d_st * i_d0
    psi_q0 = -(v_d0 + p.r_s * i_d0 - p.x_q_st * i_q0)
    eq_t0 = psi_d0 + (1.0 - g_d1) * (p.x_d_t - p.x_l) * i_d0
    psi_1d0 = eq_t0 - (p.x_d_t - p.x_l) * i_d0
    ed_t0 = -psi_q0 - (1.0 - g_q1) * (p.x_q_t - p.x_l) * i_q0
    psi_2q0 = -ed_t0 - (p.x_q_t - p.x_l) * i_q0
    e_fd0 = eq_t0 + (p.x_d - p.x_d_t) * i_d0
    v_ref = abs(v0) + e_fd0 / p.k_a
    t_e0 = psi_d0 * i_q0 - psi_q0 * i_d0
    p_m0 = t_e0

    gov = tf_to_ss(governor_tf(p))
    a_g, b_g, c_g = gov.A, gov.B[:, 0], gov.C[0, :]

    det = p.r_s * p.r_s + p.x_d_st * p.x_q_st
    v0d, v0q = v0.real, v0.imag

    def fun(z):
        (delta, domega, eq_t, psi_1d, ed_t, psi_2q, e_fd) = z[:7]
        xg = z[7:11]
        dvd, dvq, dfr = z[11:14]
        v_n_d = v0d + dvd
        v_n_q = v0q + dvq
        th = delta - math.pi / 2.0
        c, s = np.cos(th), np.sin(th)
        v_d = v_n_d * c + v_n_q * s        # rotate network -> machine frame
        v_q = -v_n_d * s + v_n_q * c
        psi_d = g_d1 * eq_t + (1.0 - g_d1) * psi_1d
        psi_q = -g_q1 * ed_t + (1.0 - g_q1) * psi_2q
        rhs_d = v_d + psi_q
        rhs_q = v_q - psi_d
        i_d = (-p.r_s * rhs_d - p.x_q_st * rhs_q) / det
        i_q = (p.x_d_st * rhs_d - p.r_s * rhs_q) / det
        t_e = psi_d * i_q - psi_q * i_d
        p_m = p_m0 + c_g @ xg
        t_m = p_m / (1.0 + domega)
        v_t = np.sqrt(v_n_d * v_n_d + v_n_q * v_n_q)

        f = np.empty(15, dtype=z.dtype)
        f[0] = w_s * domega
        f[1] = (t_m - t_e) / p.m_inertia
        f[2] = (-eq_t - (p.x_d - p.x_d_t)
                * (i_d - g_d2 * (psi_1d + (p.x_d_t - p.x_l) * i_d - eq_t))
                + e_fd) / p.t_d0_t
        f[3] = (-psi_1d + eq_t - (p.x_d_t - p.x_l) * i_d) / p.t_d0_st
        f[4] = (-ed_t + (p.x_q - p.x_q_t)
                * (i_q - g_q2 * (psi_2q + (p.x_q_t - p.x_l) * i_q + ed_t))) / p.t_q0_t
        f[5] = (-psi_2q - ed_t - (p.x_q_t - p.x_l) * i_q) / p.t_q0_st
        f[6] = (-e_fd + p.k_a * (v_ref - v_t)) / p.t_a
        f[7:11] = a_g @ xg + b_g * (dfr / ratio)
        # injected current back in the network frame, system pu
        f[11] = ratio * (i_d * c - i_q * s)
        f[12] = ratio * (i_d * s + i_q * c)
        f[13] = ratio * t_e * (1.0 + domega)   # air-gap electrical power
        f[14] = ratio * p_m                    # mechanical power
        return f

    x0 = np.array([delta0, 0.0, eq_t0, psi_1d0, ed_t0, psi_2q0, e_fd0,
                   0.0, 0.0, 0.0, 0.0])
    return fun, x0


def sg_block(p: SgParams, v0: complex, i0: complex, *,
             s_base: float = 1e6, f_0: float = 60.0,
             dg_id: str = "", node: str = "") -> DgBlock:
    """Linearize one synchronous generator at terminal voltage ``v0``
    (system pu, network frame) injecting current ``i0`` (system pu)."""
    if abs(v0) < 1e-6:
        raise ValueError(f"SG {dg_id or node}: terminal is de-energized")
    ratio = p.s_rated / s_base
    n = 11
    fun, x0 = _sg_model(p, v0, i0, s_base=s_base, f_0=f_0)
    a, b, c, d = _build(fun, x0, 3, n)
    _check_stable(a, f"SG {dg_id or node}")

    rotation = np.zeros(n)
    rotation[0] = 1.0
    return DgBlock(
        dg_id=dg_id, node=node, kind="sg",
        a=a, b_v=b[:, :2], b_fr=b[:, 2], b_fm=np.zeros(n),
        c_i=c[:2], d_v=d[:2, :2],
        c_pe=c[2], d_pe=d[2, :2], c_pm=c[3],
        state_labels=_SG_LABELS, freq_state=1,
        rotation=rotation, x0=x0, v0=v0, i0=i0,
        inertia_sys=p.m_inertia * ratio,
        pfc_gain=ratio / p.droop_m, ire_gain=0.0,
        params=p)


# ---------------------------------------------------------------------------
# inverter generator

_IG_LABELS = ("i_d", "i_q", "eta_d", "eta_q", "p_track", "freq_meas")


def _ig_model(p: IgParams, v0: complex, i0: complex, *,
              s_base: float, v_base: float, f_0: float):
    """Nonlinear residual/output function and equilibrium state for one IG.

    Returns ``(fun, x0)``; ``fun`` maps ``[x (6); ΔV_d, ΔV_q, ΔFR, Δf_m]``
    to ``[ẋ (6); ΔI_d, ΔI_q, P_e, P_m]``.
    """
    ratio = p.s_rated / s_base
    w_s = 2.0 * math.pi * f_0
    z_base_dev = v_base * v_base / p.s_rated
    r_f = p.r_f / z_base_dev
    x_f = w_s * p.l_f / z_base_dev
    k_p = p.p_i / z_base_dev
    k_i = p.i_i / z_base_dev

    i_dev = i0 / ratio
    s0_dev = v0 * i_dev.conjugate()
    p0_dev, q0_dev = s0_dev.real, s0_dev.imag
    v_set = abs(v0)
    i_d0, i_q0 = i_dev.real, i_dev.imag
    eta0 = r_f * np.array([i_d0, i_q0])
    v0d, v0q = v0.real, v0.imag

    def fun(z):
        i_d, i_q, eta_d, eta_q, p_t, x_fm = z[:6]
        dvd, dvq, dfr, dfm = z[6:10]
        v_d = v0d + dvd
        v_q = v0q + dvq
        u2 = v_d * v_d + v_q * v_q
        v_t = np.sqrt(u2)
        q_star = q0_dev + _KPV * (v_set - v_t)
        ref_d = (p_t * v_d + q_star * v_q) / u2
        ref_q = (p_t * v_q - q_star * v_d) / u2
        f = np.empty(10, dtype=z.dtype)
        f[0] = (w_s / x_f) * (-r_f * i_d + k_p * (ref_d - i_d) + eta_d)
        f[1] = (w_s / x_f) * (-r_f * i_q + k_p * (ref_q - i_q) + eta_q)
        f[2] = k_i * (ref_d - i_d)
        f[3] = k_i * (ref_q - i_q)
        f[4] = (p0_dev + dfr / ratio - p_t) / p.t_e
        f[5] = (dfm - x_fm) / p.t_f
        f[6] = ratio * i_d
        f[7] = ratio * i_q
        f[8] = ratio * (v_d * i_d + v_q * i_q)   # delivered electrical power
        f[9] = ratio * p_t                       # tracked power command
        return f

    x0 = np.array([i_d0, i_q0, eta0[0], eta0[1], p0_dev, 0.0])
    return fun, x0


def ig_block(p: IgParams, v0: complex, i0: complex, *,
             s_base: float = 1e6, v_base: float = 4800.0, f_0: float = 60.0,
             dg_id: str = "", node: str = "") -> DgBlock:
    """Linearize one inverter generator at terminal voltage ``v0``
    (system pu) injecting current ``i0`` (system pu).

    ``v_base`` (volts) sets the device impedance base that converts the
    ohmic filter values and SI current-loop gains into per unit.
    """
    if abs(v0) < 1e-6:
        raise ValueError(f"IG {dg_id or node}: terminal is de-energized")
    ratio = p.s_rated / s_base
    n = 6
    fun, x0 = _ig_model(p, v0, i0, s_base=s_base, v_base=v_base, f_0=f_0)
    a, b, c, d = _build(fun, x0, 4, n)
    _check_stable(a, f"IG {dg_id or node}")

    rotation = np.zeros(n)
    rotation[0], rotation[1] = -x0[1], x0[0]        # J @ i0
    rotation[2], rotation[3] = -x0[3], x0[2]        # J @ eta0
    return DgBlock(
        dg_id=dg_id, node=node, kind="ig",
        a=a, b_v=b[:, :2], b_fr=b[:, 2], b_fm=b[:, 3],
        c_i=c[:2], d_v=d[:2, :2],
        c_pe=c[2], d_pe=d[2, :2], c_pm=c[3],
        state_labels=_IG_LABELS, freq_state=5,
        rotation=rotation, x0=x0, v0=v0, i0=i0,
        inertia_sys=0.0,
        pfc_gain=ratio / p.droop_n, ire_gain=ratio * p.k_ire,
        params=p)


# ---------------------------------------------------------------------------
# ZIP load

def load_block(ld: LoadSpec, v0: complex) -> np.ndarray:
    """2×2 Jacobian of the drawn ZIP current against terminal voltage.

    De-energized nodes (|v0| = 0) contribute a zero block.
    """
    if abs(v0) < 1e-9:
        return np.zeros((2, 2))
    v0d, v0q = v0.real, v0.imag

    def fun(dv):
        v_d = v0d + dv[0]
        v_q = v0q + dv[1]
        u2 = v_d * v_d + v_q * v_q
        u = np.sqrt(u2)
        p_l = ld.p0 * (ld.z_p * u2 + ld.i_p * u + ld.p_p)
        q_l = ld.q0 * (ld.z_q * u2 + ld.i_q * u + ld.p_q)
        return np.array([(p_l * v_d + q_l * v_q) / u2,
                         (p_l * v_q - q_l * v_d) / u2])

    return jacobian_cs(fun, np.zeros(2))
