"""Activation-delay factors, band norms, and the delay margin.

Hand oracles:
  * |1 - e^{-j w d}| at w = 1, d = 0.2 equals 2 sin(0.1) = 0.19866.../
    0.19966... — complex arithmetic by hand.
  * the margin itself: at the feedback-only resonance w_r the delayed
    multiplier is 1 - X e^{-j w_r d} with X = |X|e^{j phi}; crossing
    |.| = 1 solves cos(w_r d - phi) = |X|/2, i.e.
    d = (arccos(|X|/2) + phi)/w_r, computed here without the bisection.
"""

import dataclasses
import warnings

import numpy as np
import pytest

from gridloop.control import (
    closed_loop,
    conventional_loop,
    delay_envelope,
    delay_factor_exact,
    delay_factor_rational,
    envelope_norms,
    ffc_synthesize,
    max_delay,
)
from gridloop.control.presets import (
    aggregate_cfg,
    aggregate_plants,
    aggregate_shares,
)
from gridloop.tfcore import RationalTF, sys_norms, tf_to_ss

DELAYS = (0.01, 0.05, 0.20, 0.50)


def _nominal():
    return aggregate_cfg(), aggregate_shares(), *aggregate_plants()


def test_zero_delay_factor_vanishes():
    w = np.logspace(-2, 3, 50)
    assert np.all(delay_factor_exact(w, 0.0) == 0.0)
    assert np.all(delay_factor_rational(w, 0.0) == 0.0)


def test_exact_factor_hand_value():
    got = delay_factor_exact(np.array([1.0]), 0.2)[0]
    assert got == pytest.approx(2.0 * np.sin(0.1), rel=1e-12)


def test_rational_fit_within_five_percent_below_unit_phase():
    d = 0.35
    w = np.linspace(1e-3, 1.0 / d, 400)
    exact = delay_factor_exact(w, d)
    approx = delay_factor_rational(w, d)
    assert np.max(np.abs(approx - exact) / exact) < 0.05


def test_envelope_is_conventional_magnitude_times_factor():
    cfg, shares, t_list, v_list = _nominal()
    w = np.logspace(-2, 2, 60)
    env = delay_envelope(cfg, shares, t_list, v_list, 0.1, omegas=w)
    mag = np.abs(
        conventional_loop(cfg, shares, t_list, v_list).eval_many(1j * w)
    )
    np.testing.assert_allclose(env.envelope_exact, mag * env.factor_exact)
    np.testing.assert_allclose(env.envelope_approx, mag * env.factor_approx)
    assert env.dt_d == 0.1
    with pytest.raises(ValueError):
        delay_envelope(cfg, shares, t_list, v_list, -0.1)


def test_band_norms_ordering_and_monotonicity():
    cfg, shares, t_list, v_list = _nominal()
    results = [
        envelope_norms(cfg, shares, t_list, v_list, d) for d in DELAYS
    ]
    conv_h2 = results[0]["conv_h2"]
    conv_hinf = results[0]["conv_hinf"]
    # a late assist still beats feedback alone for delays up to 0.2 s
    for res in results[:3]:
        assert res["h2"] < conv_h2
        assert res["hinf"] < conv_hinf
    h2s = [r["h2"] for r in results]
    hinfs = [r["hinf"] for r in results]
    assert all(a <= b for a, b in zip(h2s, h2s[1:]))
    assert all(a <= b for a, b in zip(hinfs, hinfs[1:]))
    assert results[0]["band_hi"] == pytest.approx(0.1 / cfg.t_h)


def test_max_delay_matches_arccos_form():
    cfg, shares, t_list, v_list = _nominal()
    d = max_delay(cfg, shares, t_list, v_list)
    conv = conventional_loop(cfg, shares, t_list, v_list)
    w_r = sys_norms(tf_to_ss(conv))["hinf_omega"]
    controllers = ffc_synthesize(1.0, t_list, v_list, cfg, shares)
    cl = closed_loop(
        cfg, shares, t_list, v_list, controllers, mode="proposed"
    )
    x = cl.ff_path.eval_many(np.array([1j * w_r]))[0]
    want = (np.arccos(np.abs(x) / 2.0) + np.angle(x)) / w_r
    assert d == pytest.approx(want, abs=2e-3)


def test_max_delay_half_second_scale():
    cfg, shares, t_list, v_list = _nominal()
    d = max_delay(cfg, shares, t_list, v_list)
    assert 0.4 < d < 0.6


def test_max_delay_without_feedforward_is_unbounded():
    cfg, shares, t_list, v_list = _nominal()
    controllers = ffc_synthesize(1.0, t_list, v_list, cfg, shares)
    disabled = dataclasses.replace(controllers, p=RationalTF.zero())
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        d = max_delay(cfg, shares, t_list, v_list, controllers=disabled)
    assert d == np.inf
    assert any("never amplifies" in str(r.message) for r in rec)
