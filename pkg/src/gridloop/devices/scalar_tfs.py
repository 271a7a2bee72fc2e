"""Scalar device response transfer functions.

t_g(s): commanded power reference -> mechanical power of the SG prime
mover (two lead-lag stages); v_i(s): power command -> electrical output
of the IG power-tracking loop (first-order lag).  Both have unity DC
gain.
"""

from __future__ import annotations

from gridloop.devices.params import IgParams, SgParams
from gridloop.tfcore import Polynomial, RationalTF


def governor_tf(p: SgParams) -> RationalTF:
    """Prime-mover/governor response
    (sT3+1)(sT4+1) / ((s^2 T1 T2 + s T1 + 1)(sT5+1)(sT6+1))."""
    num = Polynomial([1.0, p.t3]) * Polynomial([1.0, p.t4])
    den = (
        Polynomial([1.0, p.t1, p.t1 * p.t2])
        * Polynomial([1.0, p.t5])
        * Polynomial([1.0, p.t6])
    )
    return RationalTF(num, den)


def inverter_tf(p: IgParams) -> RationalTF:
    """Power-tracking lag 1/(s T_E + 1)."""
    return RationalTF([1.0], [1.0, p.t_e])
