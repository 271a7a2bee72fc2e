"""Feedforward compensator synthesis by filtered plant inversion.

Each SG receives S_g(s) = alpha_g p(s) / ((sT_L+1) t_g(s)) and each IG
H_i(s) = (beta_i + s T_L gamma_i/(s T_H+1)) p(s) / ((sT_L+1) v_i(s)),
where p(s) maps the switching event to the disturbance seen by the
frequency loop (p = 1 in the lumped analysis).  Inverting the plant
introduces excess zeros — one per unit of the plant's relative degree —
so the implementable realization appends that many fast poles at 1/T_r,
T_r = T_H/10 (k = 2 for the governor response, k = 1 for the
power-tracking lag, regardless of how p(s) is realized).  In the band
where the feedforward acts (omega <= 1/T_H) the appended poles change
the magnitude by under 1%.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from gridloop.control.types import FleetShares, FrConfig
from gridloop.tfcore import Polynomial, RationalTF, StateSpace, tf_to_ss

__all__ = [
    "ControllerSet",
    "ffc_synthesize",
    "NonMinimumPhaseError",
    "controllers_to_json",
    "controllers_from_json",
]

REG_POLE_RATIO = 10.0  # T_r = T_H / REG_POLE_RATIO


class NonMinimumPhaseError(ValueError):
    """Exact inversion refused: the plant has right-half-plane zeros."""

    def __init__(self, label: str, zeros: np.ndarray):
        self.label = label
        self.zeros = zeros
        zs = ", ".join(f"{z:.6g}" for z in zeros)
        super().__init__(
            f"{label} has right-half-plane zero(s) at {zs}; "
            f"exact inversion would be unstable"
        )


@dataclass(frozen=True)
class ControllerSet:
    """Feedforward compensators plus their implementable realizations.

    s_g/h_i are the exact synthesis results (improper entries flagged in
    s_g_improper/h_i_improper); s_g_reg/h_i_reg carry the appended fast
    poles and realize as the state-space blocks s_g_impl/h_i_impl.
    t_hat/v_hat are the plant estimates the synthesis used, and delay is
    the activation delay the set is annotated with.
    """

    s_g: Tuple[RationalTF, ...]
    h_i: Tuple[RationalTF, ...]
    s_g_reg: Tuple[RationalTF, ...]
    h_i_reg: Tuple[RationalTF, ...]
    s_g_impl: Tuple[StateSpace, ...]
    h_i_impl: Tuple[StateSpace, ...]
    s_g_improper: Tuple[bool, ...]
    h_i_improper: Tuple[bool, ...]
    t_hat: Tuple[RationalTF, ...]
    v_hat: Tuple[RationalTF, ...]
    p: RationalTF = RationalTF.one()
    delay: float = 0.0
    t_r: float = 0.0


def _require_minimum_phase(g: RationalTF, label: str) -> None:
    zs = g.zeros()
    bad = zs[zs.real >= 0] if zs.size else zs
    if bad.size:
        raise NonMinimumPhaseError(label, bad)


def _plant_relative_degree(g: RationalTF) -> int:
    """Pole excess of the plant = excess zeros its inversion introduces."""
    return max(0, g.den.degree - g.num.degree)


def _regularize(g: RationalTF, t_r: float, k: int) -> RationalTF:
    """Append k fast poles at 1/t_r, burying the inversion's excess zeros."""
    reg = g
    for _ in range(k):
        reg = reg * RationalTF([1.0], [1.0, t_r])
    return reg


def ffc_synthesize(
    p: Union[RationalTF, float],
    t_list: Sequence[RationalTF],
    v_list: Sequence[RationalTF],
    cfg: FrConfig,
    shares: FleetShares,
    delay: float = 0.0,
) -> ControllerSet:
    """Build the per-unit feedforward compensators.

    t_list/v_list are the plant models available to the designer (the
    estimates); pass the perturbed models here to study parameter
    errors.  p is the event-to-disturbance map (scalar for the lumped
    analysis).
    """
    if np.isscalar(p):
        p = RationalTF.constant(float(p))
    if len(t_list) != len(shares.alpha):
        raise ValueError("one t_g per alpha share required")
    if len(v_list) != len(shares.beta):
        raise ValueError("one v_i per beta/gamma share required")
    t_r = cfg.t_h / REG_POLE_RATIO
    slow = RationalTF([1.0], [1.0, cfg.t_l])  # 1/(sT_L+1)

    s_g, s_reg, s_impl, s_improper = [], [], [], []
    for idx, (t_hat, a) in enumerate(zip(t_list, shares.alpha)):
        _require_minimum_phase(t_hat, f"t_g[{idx}]")
        s = (p / t_hat) * slow.scale(a)
        reg = _regularize(s, t_r, _plant_relative_degree(t_hat))
        s_g.append(s)
        s_reg.append(reg)
        s_impl.append(tf_to_ss(reg))
        s_improper.append(s.num.degree > s.den.degree)

    h_i, h_reg, h_impl, h_improper = [], [], [], []
    for idx, (v_hat, b, g) in enumerate(zip(v_list, shares.beta, shares.gamma)):
        _require_minimum_phase(v_hat, f"v_i[{idx}]")
        share = RationalTF(
            [b, b * cfg.t_h + cfg.t_l * g], [1.0, cfg.t_h]
        )  # beta + sT_L gamma/(sT_H+1)
        h = (p / v_hat) * slow * share
        reg = _regularize(h, t_r, _plant_relative_degree(v_hat))
        h_i.append(h)
        h_reg.append(reg)
        h_impl.append(tf_to_ss(reg))
        h_improper.append(h.num.degree > h.den.degree)

    return ControllerSet(
        s_g=tuple(s_g),
        h_i=tuple(h_i),
        s_g_reg=tuple(s_reg),
        h_i_reg=tuple(h_reg),
        s_g_impl=tuple(s_impl),
        h_i_impl=tuple(h_impl),
        s_g_improper=tuple(s_improper),
        h_i_improper=tuple(h_improper),
        t_hat=tuple(t_list),
        v_hat=tuple(v_list),
        p=p,
        delay=float(delay),
        t_r=t_r,
    )


def _tf_payload(g: RationalTF) -> dict:
    return {"num": list(g.num.coeffs), "den": list(g.den.coeffs)}


def _tf_from_payload(d: dict) -> RationalTF:
    return RationalTF(Polynomial(d["num"]), Polynomial(d["den"]))


def controllers_to_json(cs: ControllerSet, indent: Optional[int] = 2) -> str:
    """Audit/export dump: every TF as ascending coefficient lists."""
    payload = {
        "s_g": [_tf_payload(g) for g in cs.s_g],
        "h_i": [_tf_payload(g) for g in cs.h_i],
        "s_g_reg": [_tf_payload(g) for g in cs.s_g_reg],
        "h_i_reg": [_tf_payload(g) for g in cs.h_i_reg],
        "s_g_improper": list(cs.s_g_improper),
        "h_i_improper": list(cs.h_i_improper),
        "t_hat": [_tf_payload(g) for g in cs.t_hat],
        "v_hat": [_tf_payload(g) for g in cs.v_hat],
        "p": _tf_payload(cs.p),
        "delay": cs.delay,
        "t_r": cs.t_r,
    }
    return json.dumps(payload, indent=indent)


def controllers_from_json(text: str) -> ControllerSet:
    """Rebuild a ControllerSet from its JSON dump (realizations re-derived)."""
    d = json.loads(text)
    s_reg = tuple(_tf_from_payload(x) for x in d["s_g_reg"])
    h_reg = tuple(_tf_from_payload(x) for x in d["h_i_reg"])
    return ControllerSet(
        s_g=tuple(_tf_from_payload(x) for x in d["s_g"]),
        h_i=tuple(_tf_from_payload(x) for x in d["h_i"]),
        s_g_reg=s_reg,
        h_i_reg=h_reg,
        s_g_impl=tuple(tf_to_ss(g) for g in s_reg),
        h_i_impl=tuple(tf_to_ss(g) for g in h_reg),
        s_g_improper=tuple(bool(b) for b in d["s_g_improper"]),
        h_i_improper=tuple(bool(b) for b in d["h_i_improper"]),
        t_hat=tuple(_tf_from_payload(x) for x in d["t_hat"]),
        v_hat=tuple(_tf_from_payload(x) for x in d["v_hat"]),
        p=_tf_from_payload(d["p"]),
        delay=float(d["delay"]),
        t_r=float(d["t_r"]),
    )
