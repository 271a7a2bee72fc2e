"""Feedback paths and closed loops against hand-written complex algebra.

Oracles here avoid the library's rational arithmetic on purpose: each
expected response is assembled from raw complex numbers at sampled
frequencies, so a coefficient-handling bug in the TF algebra cannot
cancel itself out of the comparison.
"""

import numpy as np
import pytest

from gridloop.control import (
    FleetShares,
    closed_loop,
    conventional_loop,
    coverage_tf,
    feedback_tfs,
    ffc_synthesize,
    sfc_pi_tf,
)
from gridloop.control.presets import (
    aggregate_cfg,
    aggregate_plants,
    aggregate_shares,
)
from gridloop.tfcore import sys_norms, tf_to_ss

W_GRID = np.logspace(-3, 3, 200)


def _nominal():
    cfg = aggregate_cfg()
    shares = aggregate_shares()
    t_list, v_list = aggregate_plants()
    return cfg, shares, t_list, v_list


def _hand_paths(cfg, shares, w):
    """l_g / q_i assembled from scalars only."""
    s = 1j * w
    pi = (s * cfg.p_f + cfg.i_f) / (s * (s * cfg.t_l + 1.0))
    l_list = [
        1.0 / m + a * pi for a, m in zip(shares.alpha, cfg.m_g)
    ]
    q_list = []
    for beta, gamma, n, k, t_f in zip(
        shares.beta, shares.gamma, cfg.n_i, cfg.k_ire, cfg.t_fi
    ):
        ire = s * k / (s * t_f + 1.0)
        hf = beta + s * cfg.t_l * gamma / (s * cfg.t_h + 1.0)
        q_list.append(1.0 / n + ire + hf * pi)
    return l_list, q_list


def test_droop_only_sg_path():
    cfg = aggregate_cfg(n_i=(0.1, 0.1), k_ire=(5.0, 5.0), t_fi=(0.05, 0.05))
    shares = FleetShares(alpha=(0.0,), beta=(0.5, 0.5), gamma=(0.5, 0.5))
    l_list, _ = feedback_tfs(cfg, shares)
    got = l_list[0].eval_many(1j * W_GRID)
    np.testing.assert_allclose(got, np.full_like(got, 1.0 / cfg.m_g[0]))


def test_feedback_paths_match_hand_algebra():
    cfg, shares, _, _ = _nominal()
    l_list, q_list = feedback_tfs(cfg, shares)
    want_l, want_q = _hand_paths(cfg, shares, W_GRID)
    np.testing.assert_allclose(
        l_list[0].eval_many(1j * W_GRID), want_l[0], rtol=1e-10
    )
    np.testing.assert_allclose(
        q_list[0].eval_many(1j * W_GRID), want_q[0], rtol=1e-10
    )


def test_sfc_pi_low_frequency_is_integral():
    cfg = aggregate_cfg()
    w = 1e-6
    got = sfc_pi_tf(cfg).eval_many(np.array([1j * w]))[0]
    assert got == pytest.approx(cfg.i_f / (1j * w), rel=1e-4)


def test_conventional_loop_matches_manual_assembly():
    cfg, shares, t_list, v_list = _nominal()
    g = conventional_loop(cfg, shares, t_list, v_list)
    s = 1j * W_GRID
    l_list, q_list = _hand_paths(cfg, shares, W_GRID)
    acc = s * cfg.m_total + cfg.d_total
    for t, l in zip(t_list, l_list):
        acc = acc + t.eval_many(s) * l
    for v, q in zip(v_list, q_list):
        acc = acc + v.eval_many(s) * q
    np.testing.assert_allclose(g.eval_many(s), -1.0 / acc, rtol=1e-9)


def test_zero_steady_state_frequency_error():
    cfg, shares, t_list, v_list = _nominal()
    for mode in ("conventional", "proposed"):
        controllers = None
        if mode == "proposed":
            controllers = ffc_synthesize(1.0, t_list, v_list, cfg, shares)
        cl = closed_loop(cfg, shares, t_list, v_list, controllers, mode=mode)
        assert cl.stable
        assert abs(cl.eval_many(np.array([1e-6]))[0]) < 1e-4


def test_proposed_nominal_identity():
    # with exact plant knowledge the assisted loop must equal
    # G_conv * s^2 T_L T_H / ((sT_L+1)(sT_H+1)) to near machine precision
    cfg, shares, t_list, v_list = _nominal()
    controllers = ffc_synthesize(1.0, t_list, v_list, cfg, shares)
    cl = closed_loop(cfg, shares, t_list, v_list, controllers, mode="proposed")
    s = 1j * W_GRID
    residual = (s * cfg.t_l) * (s * cfg.t_h) / (
        (s * cfg.t_l + 1.0) * (s * cfg.t_h + 1.0)
    )
    want = cl.g_conv.eval_many(s) * residual
    got = cl.eval_many(W_GRID)
    assert np.max(np.abs(got - want) / np.abs(want)) < 1e-9


def test_nominal_ff_path_is_coverage_filter():
    cfg, shares, t_list, v_list = _nominal()
    controllers = ffc_synthesize(1.0, t_list, v_list, cfg, shares)
    cl = closed_loop(cfg, shares, t_list, v_list, controllers, mode="proposed")
    got = cl.ff_path.eval_many(1j * W_GRID)
    want = coverage_tf(cfg).eval_many(1j * W_GRID)
    np.testing.assert_allclose(got, want, rtol=1e-10)


def test_ideal_mode_cancels_exactly():
    cfg, shares, t_list, v_list = _nominal()
    cl = closed_loop(cfg, shares, t_list, v_list, mode="ideal")
    assert cl.to_rational().is_zero
    t, y = cl.simulate_step(dt=2e-4, horizon=5.0)
    assert np.max(np.abs(y)) < 1e-8


def test_closed_loop_norms_agree_with_state_space():
    cfg, shares, t_list, v_list = _nominal()
    cl = closed_loop(cfg, shares, t_list, v_list, mode="conventional")
    n = cl.norms()
    want = sys_norms(tf_to_ss(cl.g_conv))
    assert n["h2"] == pytest.approx(want["h2"], rel=1e-10)
    assert n["hinf"] == pytest.approx(want["hinf"], rel=1e-10)


def test_delayed_loop_refuses_rational_form():
    cfg, shares, t_list, v_list = _nominal()
    controllers = ffc_synthesize(1.0, t_list, v_list, cfg, shares)
    cl = closed_loop(
        cfg, shares, t_list, v_list, controllers, mode="proposed", delay=0.1
    )
    with pytest.raises(ValueError):
        cl.to_rational()


def test_delayed_step_matches_feedback_only_before_activation():
    cfg, shares, t_list, v_list = _nominal()
    controllers = ffc_synthesize(1.0, t_list, v_list, cfg, shares)
    delay = 0.2
    dt = 2e-4
    cl = closed_loop(
        cfg, shares, t_list, v_list, controllers, mode="proposed", delay=delay
    )
    conv = closed_loop(cfg, shares, t_list, v_list, mode="conventional")
    t, y = cl.simulate_step(dt=dt, horizon=1.0)
    _, y_conv = conv.simulate_step(dt=dt, horizon=1.0)
    before = t < delay
    np.testing.assert_allclose(y[before], y_conv[before], atol=1e-12)
    # after activation the assist must bite: the tail deviates
    assert np.max(np.abs(y[~before] - y_conv[~before])) > 1e-4


def test_unstable_gains_flagged_not_raised():
    cfg = aggregate_cfg(p_f=500.0, i_f=2000.0)
    shares = aggregate_shares()
    t_list, v_list = aggregate_plants()
    cl = closed_loop(cfg, shares, t_list, v_list, mode="conventional")
    assert not cl.stable


def test_unknown_mode_rejected():
    cfg, shares, t_list, v_list = _nominal()
    with pytest.raises(ValueError):
        closed_loop(cfg, shares, t_list, v_list, mode="bogus")
    with pytest.raises(ValueError):
        closed_loop(cfg, shares, t_list, v_list, mode="proposed")  # no set
    with pytest.raises(ValueError):
        closed_loop(
            cfg, shares, t_list, v_list, mode="conventional", delay=-0.1
        )
