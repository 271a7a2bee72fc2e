"""Plant-error robustness of the feedforward-assisted loop.

The single-cell oracle rebuilds the assisted/feedback-only ratio from
raw complex arithmetic — the estimate divides the true response inside
|1 - (sum of dispatch-weighted plant/estimate ratios)/(sT_L+1)| — so the
library's synthesis + loop plumbing is cross-checked end to end at one
grid cell.
"""

import dataclasses

import numpy as np
import pytest

from gridloop.control import error_robustness, perturbed_estimates
from gridloop.control.presets import (
    aggregate_cfg,
    aggregate_device_params,
    aggregate_shares,
)
from gridloop.control.robustness import DESIGN_BAND_FACTOR
from gridloop.devices.scalar_tfs import governor_tf, inverter_tf


def test_perturbed_estimates_scale_the_right_constants():
    sg_params, ig_params = aggregate_device_params()
    t_hat, v_hat = perturbed_estimates(sg_params, ig_params, 0.5, -0.25)
    want_t = governor_tf(
        dataclasses.replace(sg_params[0], t1=sg_params[0].t1 * 1.5)
    )
    want_v = inverter_tf(
        dataclasses.replace(ig_params[0], t_e=ig_params[0].t_e * 0.75)
    )
    w = np.logspace(-2, 2, 50)
    np.testing.assert_allclose(
        t_hat[0].eval_many(1j * w), want_t.eval_many(1j * w), rtol=1e-12
    )
    np.testing.assert_allclose(
        v_hat[0].eval_many(1j * w), want_v.eval_many(1j * w), rtol=1e-12
    )
    with pytest.raises(ValueError):
        perturbed_estimates(sg_params, ig_params, -1.0, 0.0)


def test_single_cell_hand_ratio():
    cfg = aggregate_cfg()
    shares = aggregate_shares()
    sg_params, ig_params = aggregate_device_params()
    e_g = 0.5
    w = np.array([0.7])
    report = error_robustness(
        cfg,
        shares,
        sg_params,
        ig_params,
        e_g_grid=np.array([e_g]),
        e_i_grid=np.array([0.0]),
        omegas=w,
        include_delay_limit=False,
    )
    s = 1j * w[0]
    t = governor_tf(sg_params[0]).eval_many(np.array([s]))[0]
    t_hat = governor_tf(
        dataclasses.replace(sg_params[0], t1=sg_params[0].t1 * (1 + e_g))
    ).eval_many(np.array([s]))[0]
    v_ratio = 1.0  # e_i = 0: estimate equals the plant
    a, b, g = shares.alpha[0], shares.beta[0], shares.gamma[0]
    hf = b + s * cfg.t_l * g / (s * cfg.t_h + 1.0)
    x_err = (a * (t / t_hat) + hf * v_ratio) / (s * cfg.t_l + 1.0)
    assert report.max_ratio[0, 0] == pytest.approx(abs(1.0 - x_err), rel=1e-9)


def test_nominal_cell_stays_below_unity():
    cfg = aggregate_cfg()
    shares = aggregate_shares()
    sg_params, ig_params = aggregate_device_params()
    report = error_robustness(
        cfg,
        shares,
        sg_params,
        ig_params,
        e_g_grid=np.array([0.0]),
        e_i_grid=np.array([0.0]),
        include_delay_limit=False,
    )
    assert 0.0 < report.max_ratio[0, 0] < 1.0


def test_default_grid_all_cells_contained():
    cfg = aggregate_cfg()
    shares = aggregate_shares()
    sg_params, ig_params = aggregate_device_params()
    report = error_robustness(cfg, shares, sg_params, ig_params)
    assert report.max_ratio.shape == (9, 9)
    assert report.e_g_grid[0] == -0.8 and report.e_g_grid[-1] == 0.8
    assert report.all_within_unity()
    assert report.cond_low.all()
    assert report.cond_high.all()
    assert report.ratio_band_hi == pytest.approx(DESIGN_BAND_FACTOR / cfg.t_h)
    # the delay margin rides along for reporting
    assert 0.4 < report.dt_d_max < 0.6
