"""Feedback-path transfer functions and the closed frequency loop.

The lumped plant is 1/(sM + D); each SG contributes a feedback path
l_g(s) (droop + its share of the secondary PI) through its prime-mover
response t_g(s), and each IG a path q_i(s) (droop + df/dt emulation +
its share of the secondary PI, with the high-frequency portion routed
through the T_L/T_H dispatch split) through its power-tracking response
v_i(s).

The feedforward-assisted loop multiplies the disturbance by
1 - X(s) e^{-s dt_d}, where X collects the feedforward paths; with exact
plant knowledge and no delay X reduces to the dispatch coverage
W(s) = (s(T_L+T_H) + 1) / ((sT_L+1)(sT_H+1)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from gridloop.control.ffc import ControllerSet
from gridloop.control.types import FleetShares, FrConfig
from gridloop.tfcore import (
    RationalTF,
    h2_quadrature,
    hinf_peak,
    simulate_lti,
    sys_norms,
    tf_to_ss,
)

__all__ = [
    "feedback_tfs",
    "sfc_pi_tf",
    "coverage_tf",
    "conventional_loop",
    "closed_loop",
    "ClosedLoop",
]


def sfc_pi_tf(cfg: FrConfig) -> RationalTF:
    """Secondary PI through the slow dispatch filter:
    (s P_f + I_f) / (s (s T_L + 1))."""
    return RationalTF([cfg.i_f, cfg.p_f], [0.0, 1.0, cfg.t_l])


def _hf_share_tf(beta: float, gamma: float, cfg: FrConfig) -> RationalTF:
    """beta + s T_L gamma / (s T_H + 1) as one rational."""
    return RationalTF(
        [beta, beta * cfg.t_h + cfg.t_l * gamma], [1.0, cfg.t_h]
    )


def feedback_tfs(
    cfg: FrConfig, shares: FleetShares
) -> Tuple[List[RationalTF], List[RationalTF]]:
    """Per-unit feedback paths (l_g per SG, q_i per IG)."""
    if len(shares.alpha) != len(cfg.m_g):
        raise ValueError("one alpha and one droop m_g required per SG")
    if len(shares.beta) != len(cfg.n_i):
        raise ValueError("one beta/gamma and one droop n_i required per IG")
    pi = sfc_pi_tf(cfg)
    l_list = [
        RationalTF.constant(1.0 / m) + pi.scale(a)
        for a, m in zip(shares.alpha, cfg.m_g)
    ]
    q_list = []
    for beta, gamma, n, k, t_f in zip(
        shares.beta, shares.gamma, cfg.n_i, cfg.k_ire, cfg.t_fi
    ):
        ire = RationalTF([0.0, k], [1.0, t_f])  # s K / (s T_f + 1)
        q = RationalTF.constant(1.0 / n) + ire + _hf_share_tf(beta, gamma, cfg) * pi
        q_list.append(q)
    return l_list, q_list


def coverage_tf(cfg: FrConfig) -> RationalTF:
    """Nominal feedforward coverage W(s) = (s(T_L+T_H)+1)/((sT_L+1)(sT_H+1))."""
    return RationalTF(
        [1.0, cfg.t_l + cfg.t_h],
        [1.0, cfg.t_l + cfg.t_h, cfg.t_l * cfg.t_h],
    )


def conventional_loop(
    cfg: FrConfig,
    shares: FleetShares,
    t_list: Sequence[RationalTF],
    v_list: Sequence[RationalTF],
) -> RationalTF:
    """Feedback-only disturbance response
    G_conv(s) = -(sM + D + sum t_g l_g + sum v_i q_i)^{-1}."""
    l_list, q_list = feedback_tfs(cfg, shares)
    if len(t_list) != len(l_list) or len(v_list) != len(q_list):
        raise ValueError("plant lists must align with the share lists")
    acc = RationalTF([cfg.d_total, cfg.m_total], [1.0])
    for t, l in zip(t_list, l_list):
        acc = acc + t * l
    for v, q in zip(v_list, q_list):
        acc = acc + v * q
    return RationalTF.constant(-1.0) / acc


@dataclass(frozen=True)
class ClosedLoop:
    """Disturbance-to-frequency response, possibly with a pure delay.

    The response is g_conv(s) * (1 - ff_path(s) e^{-s delay}); ff_path
    is identically zero in the feedback-only mode.  With delay == 0 the
    loop is rational (``to_rational``); otherwise only pointwise
    evaluation and shifted-input simulation are exact.
    """

    g_conv: RationalTF
    ff_path: RationalTF
    delay: float
    mode: str
    stable: bool

    def eval_many(self, omegas: np.ndarray) -> np.ndarray:
        """Complex response on a frequency grid (rad/s)."""
        omegas = np.asarray(omegas, dtype=float)
        s = 1j * omegas
        if self.ff_path.is_zero:
            return self.g_conv.eval_many(s)
        if self.delay == 0.0:
            # evaluating 1 - ff pointwise cancels catastrophically at low
            # frequency (ff -> 1 there); the rational form subtracts the
            # coefficients instead and keeps full precision.
            return self.to_rational().eval_many(s)
        shift = np.exp(-s * self.delay)
        return self.g_conv.eval_many(s) * (
            1.0 - self.ff_path.eval_many(s) * shift
        )

    def response_callable(self) -> Callable[[np.ndarray], np.ndarray]:
        return self.eval_many

    def to_rational(self) -> RationalTF:
        """Exact rational form (only without delay)."""
        if self.delay != 0.0 and not self.ff_path.is_zero:
            raise ValueError("delayed loop is not rational; evaluate pointwise")
        return self.g_conv * (RationalTF.one() - self.ff_path)

    def norms(self) -> dict:
        """H2/Hinf of the loop; quadrature/grid-scan when delayed."""
        if self.delay == 0.0 or self.ff_path.is_zero:
            return sys_norms(tf_to_ss(self.to_rational()))
        fn = self.eval_many
        hinf, w_at = hinf_peak(fn)
        return {
            "h2": h2_quadrature(fn),
            "hinf": hinf,
            "hinf_omega": w_at,
            "hinf_rel_tol": 1e-4,
        }

    def simulate_step(
        self, dt: float, horizon: float, magnitude: float = 1.0, **kw
    ):
        """Step-disturbance response with the delay as an exact input shift."""
        steps = int(round(horizon / dt))
        t = np.arange(steps + 1) * dt
        u = np.full((steps + 1, 1), magnitude)
        base = simulate_lti(tf_to_ss(self.g_conv), u, dt, **kw)
        if self.ff_path.is_zero:
            return base.t, base.y[:, 0]
        shift = int(round(self.delay / dt))
        u_ff = np.zeros_like(u)
        if shift < len(u_ff):
            u_ff[shift:] = magnitude
        ff = simulate_lti(tf_to_ss(self.g_conv * self.ff_path), u_ff, dt, **kw)
        return t, base.y[:, 0] - ff.y[:, 0]


def _loop_is_stable(g_conv: RationalTF, ff_path: RationalTF) -> bool:
    margin = 1e-9
    if np.any(g_conv.poles().real >= margin):
        return False
    if not ff_path.is_zero and ff_path.den.degree > 0:
        if np.any(ff_path.poles().real >= margin):
            return False
    return True


def closed_loop(
    cfg: FrConfig,
    shares: FleetShares,
    t_list: Sequence[RationalTF],
    v_list: Sequence[RationalTF],
    controllers: Optional[ControllerSet] = None,
    mode: str = "conventional",
    delay: float = 0.0,
) -> ClosedLoop:
    """Disturbance-to-frequency closed loop.

    mode="conventional": feedback only.  mode="proposed": feedforward
    paths from ``controllers`` (built on the estimated plants) act on
    the true plants t_list/v_list, optionally after a pure delay.
    mode="ideal": exact unfiltered inversion of the true plants — the
    response cancels identically (the algebra collapses to the zero TF).

    An unstable result is returned with ``stable=False``, never raised.
    """
    if delay < 0:
        raise ValueError("delay must be nonnegative")
    g_conv = conventional_loop(cfg, shares, t_list, v_list)

    if mode == "conventional":
        ff = RationalTF.zero()
    elif mode == "proposed":
        if controllers is None:
            raise ValueError("proposed mode requires a ControllerSet")
        if len(controllers.s_g) != len(t_list) or len(controllers.h_i) != len(v_list):
            raise ValueError("controller set does not match the plant lists")
        # Accumulate sum(t_g S_g) + sum(v_i H_i) in ratio form: each term
        # is (plant / estimate) times its dispatch share, with the common
        # slow filter and the disturbance model factored out.  When the
        # estimates match the plants each ratio cancels exactly, so the
        # nominal path equals the dispatch coverage W(s) to machine
        # precision instead of drowning the tiny 1 - W residual at low
        # frequency in coefficient round-off.
        ff = RationalTF.zero()
        for t, t_hat, a in zip(t_list, controllers.t_hat, shares.alpha):
            ff = ff + (t / t_hat).scale(a)
        for v, v_hat, b, g in zip(
            v_list, controllers.v_hat, shares.beta, shares.gamma
        ):
            ff = ff + _hf_share_tf(b, g, cfg) * (v / v_hat)
        ff = ff * RationalTF([1.0], [1.0, cfg.t_l]) * controllers.p
    elif mode == "ideal":
        ff = RationalTF.zero()
        for t, a in zip(t_list, shares.alpha):
            ff = ff + (t / t).scale(a)
        for v, b in zip(v_list, shares.beta):
            ff = ff + (v / v).scale(b)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    return ClosedLoop(
        g_conv=g_conv,
        ff_path=ff,
        delay=float(delay),
        mode=mode,
        stable=_loop_is_stable(g_conv, ff),
    )
