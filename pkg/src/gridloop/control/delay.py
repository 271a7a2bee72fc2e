"""Activation-delay analysis of the feedforward-assisted loop.

A delay dt_d between the switching event and the feedforward action
turns the disturbance multiplier into 1 - X(s) e^{-s dt_d}.  With exact
plant knowledge X is the dispatch coverage W ~= 1 below the fast-filter
corner, so the multiplier magnitude is approximately the exact delay
factor |1 - e^{-j w dt_d}| = 2|sin(w dt_d / 2)|, which admits the
rational fit |dt_d s / ((dt_d^2/12) s^2 + (dt_d/2) s + 1)| (a Pade-type
approximation, within 5% for w dt_d <= 1).

``envelope_norms`` measures the residual loop |G_conv| * factor over the
design band; ``max_delay`` finds the largest dt_d for which the delayed
assist still attenuates the feedback-only resonance peak rather than
amplifying it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from gridloop.control.ffc import ControllerSet, ffc_synthesize
from gridloop.control.loop import closed_loop, conventional_loop
from gridloop.control.types import FleetShares, FrConfig
from gridloop.tfcore import (
    RationalTF,
    default_grid,
    h2_quadrature,
    hinf_peak,
    sys_norms,
    tf_to_ss,
)

__all__ = [
    "delay_factor_exact",
    "delay_factor_rational",
    "DelayEnvelope",
    "delay_envelope",
    "envelope_norms",
    "max_delay",
    "MAX_DELAY_CAP",
]

MAX_DELAY_CAP = 8.0  # s; search ceiling before declaring "never violated"


def delay_factor_exact(omegas: np.ndarray, dt_d: float) -> np.ndarray:
    """|1 - e^{-j w dt_d}| = 2 |sin(w dt_d / 2)|."""
    omegas = np.asarray(omegas, dtype=float)
    return np.abs(1.0 - np.exp(-1j * omegas * dt_d))


def delay_factor_rational(omegas: np.ndarray, dt_d: float) -> np.ndarray:
    """Second-order rational fit of the delay factor."""
    omegas = np.asarray(omegas, dtype=float)
    s = 1j * omegas
    return np.abs(dt_d * s / ((dt_d**2 / 12.0) * s**2 + (dt_d / 2.0) * s + 1.0))


@dataclass(frozen=True)
class DelayEnvelope:
    """Exact and rational-fit magnitude envelopes of the delayed loop."""

    omegas: np.ndarray
    factor_exact: np.ndarray      # |1 - e^{-jw dt_d}|
    factor_approx: np.ndarray     # rational fit of the same
    envelope_exact: np.ndarray    # |G_conv| * factor_exact
    envelope_approx: np.ndarray   # |G_conv| * factor_approx
    dt_d: float


def delay_envelope(
    cfg: FrConfig,
    shares: FleetShares,
    t_list: Sequence[RationalTF],
    v_list: Sequence[RationalTF],
    dt_d: float,
    omegas: Optional[np.ndarray] = None,
) -> DelayEnvelope:
    """Magnitude envelope |G_conv|*|1 - e^{-s dt_d}| and its rational fit."""
    if dt_d < 0:
        raise ValueError("dt_d must be nonnegative")
    if omegas is None:
        omegas = default_grid()
    g_conv = conventional_loop(cfg, shares, t_list, v_list)
    mag = np.abs(g_conv.eval_many(1j * omegas))
    fe = delay_factor_exact(omegas, dt_d)
    fa = delay_factor_rational(omegas, dt_d)
    return DelayEnvelope(
        omegas=omegas,
        factor_exact=fe,
        factor_approx=fa,
        envelope_exact=mag * fe,
        envelope_approx=mag * fa,
        dt_d=dt_d,
    )


def envelope_norms(
    cfg: FrConfig,
    shares: FleetShares,
    t_list: Sequence[RationalTF],
    v_list: Sequence[RationalTF],
    dt_d: float,
    band_hi: Optional[float] = None,
) -> dict:
    """Band-limited H2/Hinf norms of the envelope |G_conv| * rational fit.

    The rational delay factor (and the coverage-is-unity reading behind
    it) is only meaningful below the fast-filter corner, so the band
    defaults to w <= 0.1 / T_H.  Feedback-only norms over the same band
    are returned alongside for comparison (keys ``conv_h2``/``conv_hinf``).
    """
    if dt_d < 0:
        raise ValueError("dt_d must be nonnegative")
    if band_hi is None:
        band_hi = 0.1 / cfg.t_h
    g_conv = conventional_loop(cfg, shares, t_list, v_list)

    def conv_fn(w: np.ndarray) -> np.ndarray:
        return g_conv.eval_many(1j * np.asarray(w, dtype=float))

    def env_fn(w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return conv_fn(w) * delay_factor_rational(w, dt_d)

    h2 = h2_quadrature(env_fn, lo=1e-5, hi=band_hi, tail=False)
    hinf, w_at = hinf_peak(env_fn, lo=1e-3, hi=band_hi)
    conv_h2 = h2_quadrature(conv_fn, lo=1e-5, hi=band_hi, tail=False)
    conv_hinf, _ = hinf_peak(conv_fn, lo=1e-3, hi=band_hi)
    return {
        "h2": h2,
        "hinf": hinf,
        "hinf_omega": w_at,
        "conv_h2": conv_h2,
        "conv_hinf": conv_hinf,
        "band_hi": band_hi,
    }


def max_delay(
    cfg: FrConfig,
    shares: FleetShares,
    t_list: Sequence[RationalTF],
    v_list: Sequence[RationalTF],
    controllers: Optional[ControllerSet] = None,
    tol: float = 1e-3,
) -> float:
    """Largest activation delay that still attenuates the loop resonance.

    The feedback-only loop |G_conv| peaks at some resonance w_r; the
    delayed feedforward multiplies the disturbance there by
    1 - X(j w_r) e^{-j w_r dt_d}.  This returns the largest dt_d keeping
    that multiplier's magnitude at or below one — i.e. the assist, however
    late, still does not amplify the very peak it is meant to cancel.
    Found by doubling + bisection to ``tol`` seconds.

    Returns inf (with a warning) when no delay up to MAX_DELAY_CAP
    violates the condition — e.g. when the feedforward path is zero.
    """
    if controllers is None:
        controllers = ffc_synthesize(1.0, t_list, v_list, cfg, shares)
    conv = conventional_loop(cfg, shares, t_list, v_list)
    w_r = sys_norms(tf_to_ss(conv))["hinf_omega"]
    if not np.isfinite(w_r) or w_r <= 0.0:
        raise ValueError(
            "feedback-only loop has no interior resonance peak; "
            "delay margin is undefined"
        )
    cl = closed_loop(cfg, shares, t_list, v_list, controllers, mode="proposed")
    x_r = cl.ff_path.eval_many(np.array([1j * w_r]))[0]

    def excess(dt_d: float) -> float:
        return float(np.abs(1.0 - x_r * np.exp(-1j * w_r * dt_d))) - 1.0

    hi = 0.25
    while excess(hi) <= 0.0:
        hi *= 2.0
        if hi > MAX_DELAY_CAP:
            warnings.warn(
                "delayed feedforward never amplifies the resonance peak "
                f"for delays up to {MAX_DELAY_CAP} s; returning inf",
                stacklevel=2,
            )
            return float("inf")
    lo = 0.0 if hi == 0.25 else hi / 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
