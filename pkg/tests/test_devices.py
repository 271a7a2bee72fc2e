"""Device blocks: linearized generators, inverters, and ZIP loads.

Oracles: closed-form Jacobians (pure-impedance and constant-power load
laws worked by hand), central finite differences of the nonlinear model
functions as an independent check on the complex-step linearization,
governor/inverter transfer-function step responses for input-output
conformance, and the rotational-equivariance identities every block must
satisfy (a uniform rotation of all phasors and rotor angles maps
equilibria to equilibria).
"""

import math

import numpy as np
import pytest

from gridloop.devices import (
    DgBlock,
    governor_tf,
    ig_block,
    inverter_tf,
    load_block,
    nominal_ig,
    nominal_sg,
    sg_block,
)
from gridloop.devices._linearize import jacobian_cs, jacobian_fd
from gridloop.devices.blocks import _ig_model, _sg_model
from gridloop.devices.params import LoadSpec
from gridloop.netmodel import builtin_fixture_path, load_fixture, solve_operating_point
from gridloop.tfcore import StateSpace, simulate_lti, tf_to_ss

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


@pytest.fixture(scope="module")
def fixture_blocks():
    """All eight study-fleet blocks linearized at the normal operating point."""
    fx = load_fixture(builtin_fixture_path())
    topo = fx.topology
    op = solve_operating_point(topo, topo.initial_state())
    blocks = []
    for dg in topo.dgs:
        k = topo.node_index[dg.node]
        v0, i0 = op.v0[k], op.i_dg0[dg.dg_id]
        if dg.kind == "sg":
            blk = sg_block(dg.params, v0, i0, s_base=topo.s_base,
                           f_0=topo.f_0, dg_id=dg.dg_id, node=dg.node)
        else:
            blk = ig_block(dg.params, v0, i0, s_base=topo.s_base,
                           v_base=topo.v_base, f_0=topo.f_0,
                           dg_id=dg.dg_id, node=dg.node)
        blocks.append(blk)
    return topo, op, blocks


def dc_gain(blk: DgBlock, row: np.ndarray) -> float:
    """Steady-state response of an output row to a unit ΔFR step."""
    return float(row @ np.linalg.solve(blk.a, -blk.b_fr))


def block_sim_system(blk: DgBlock, c_row: np.ndarray) -> StateSpace:
    """Scalar-output system driven by ΔFR only (terminal voltage held)."""
    return StateSpace(blk.a, blk.b_fr[:, None], c_row[None, :],
                      np.zeros((1, 1)))


# ---------------------------------------------------------------------------
# scalar transfer functions


class TestScalarTfs:
    def test_governor_dc_gain_one(self):
        tg = governor_tf(nominal_sg())
        assert tg(0.0) == pytest.approx(1.0, abs=1e-12)

    def test_governor_poles_left_half_plane(self):
        tg = governor_tf(nominal_sg())
        assert max(r.real for r in tg.poles()) < 0

    def test_governor_relative_degree_two(self):
        tg = governor_tf(nominal_sg())
        assert tg.relative_degree == 2
        w = 1e4
        assert abs(tg(1j * w)) < 1e-4

    def test_inverter_dc_and_corner(self):
        p = nominal_ig()
        vi = inverter_tf(p)
        assert vi(0.0) == pytest.approx(1.0, abs=1e-12)
        assert abs(vi(1j / p.t_e)) == pytest.approx(1 / math.sqrt(2), rel=1e-12)

    def test_inverter_step_time_constant(self):
        p = nominal_ig()
        sys = tf_to_ss(inverter_tf(p))
        res = simulate_lti(sys, lambda t: np.ones_like(t), dt=1e-4,
                           horizon=5 * p.t_e)
        k = int(round(p.t_e / 1e-4))
        assert res.y[k, 0] == pytest.approx(1 - math.exp(-1), rel=1e-4)
        assert res.y[-1, 0] == pytest.approx(1 - math.exp(-5), rel=1e-4)


# ---------------------------------------------------------------------------
# synchronous generator blocks


class TestSgBlock:
    def test_fixture_blocks_stable(self, fixture_blocks):
        _, _, blocks = fixture_blocks
        for blk in blocks:
            if blk.kind != "sg":
                continue
            assert np.linalg.eigvals(blk.a).real.max() < -1e-3, blk.dg_id

    def test_dc_power_gain_is_unity(self, fixture_blocks):
        """A unit ΔFR must deliver 1 pu of power at steady state (2%)."""
        _, _, blocks = fixture_blocks
        for blk in blocks:
            if blk.kind != "sg":
                continue
            assert dc_gain(blk, blk.c_pm) == pytest.approx(1.0, rel=0.02)
            assert dc_gain(blk, blk.c_pe) == pytest.approx(1.0, rel=0.02)

    def test_fr_step_tracks_governor_tf(self, fixture_blocks):
        """The mechanical-power path reproduces the governor transfer
        function exactly: no feedback reaches the governor states."""
        _, _, blocks = fixture_blocks
        blk = next(b for b in blocks if b.kind == "sg")
        dt, horizon = 1e-4, 8.0
        res = simulate_lti(block_sim_system(blk, blk.c_pm),
                           lambda t: np.ones_like(t), dt=dt, horizon=horizon,
                           stride=100)
        ref = simulate_lti(tf_to_ss(governor_tf(blk.params)),
                           lambda t: np.ones_like(t), dt=dt, horizon=horizon,
                           stride=100)
        np.testing.assert_allclose(res.y[:, 0], ref.y[:, 0], atol=1e-9)

    def test_fr_step_airgap_power_settles_to_one(self, fixture_blocks):
        _, _, blocks = fixture_blocks
        blk = next(b for b in blocks if b.kind == "sg")
        res = simulate_lti(block_sim_system(blk, blk.c_pe),
                           lambda t: np.ones_like(t), dt=1e-4, horizon=40.0,
                           stride=1000)
        assert res.y[-1, 0] == pytest.approx(1.0, rel=0.02)

    def test_zero_input_stays_at_zero(self, fixture_blocks):
        _, _, blocks = fixture_blocks
        blk = next(b for b in blocks if b.kind == "sg")
        res = simulate_lti(block_sim_system(blk, blk.c_pe), None,
                           dt=1e-4, horizon=1.0)
        np.testing.assert_allclose(res.y, 0.0, atol=1e-15)

    def test_complex_step_matches_central_differences(self, fixture_blocks):
        topo, op, blocks = fixture_blocks
        blk = next(b for b in blocks if b.kind == "sg")
        fun, x0 = _sg_model(blk.params, blk.v0, blk.i0,
                            s_base=topo.s_base, f_0=topo.f_0)
        z0 = np.concatenate([x0, np.zeros(3)])
        jc = jacobian_cs(fun, z0)
        jf = jacobian_fd(fun, z0, h=1e-6)
        scale = np.abs(jc).max()
        np.testing.assert_allclose(jf, jc, atol=1e-5 * scale)

    def test_linearization_matches_block_matrices(self, fixture_blocks):
        topo, _, blocks = fixture_blocks
        blk = next(b for b in blocks if b.kind == "sg")
        fun, x0 = _sg_model(blk.params, blk.v0, blk.i0,
                            s_base=topo.s_base, f_0=topo.f_0)
        jac = jacobian_cs(fun, np.concatenate([x0, np.zeros(3)]))
        n = blk.n_states
        np.testing.assert_allclose(jac[:n, :n], blk.a, atol=1e-13)
        np.testing.assert_allclose(jac[:n, n:n + 2], blk.b_v, atol=1e-13)
        np.testing.assert_allclose(jac[:n, n + 2], blk.b_fr, atol=1e-13)
        np.testing.assert_allclose(jac[n:n + 2, :n], blk.c_i, atol=1e-13)

    def test_rotational_equivariance(self, fixture_blocks):
        """A uniform rotation of every phasor and the rotor angle maps the
        equilibrium family onto itself: A·r + B_v·(J·V₀) = 0, the current
        output co-rotates (C·r + D_v·J·V₀ = J·I₀), and power is invariant."""
        _, _, blocks = fixture_blocks
        for blk in blocks:
            dv = J2 @ np.array([blk.v0.real, blk.v0.imag])
            di = J2 @ np.array([blk.i0.real, blk.i0.imag])
            np.testing.assert_allclose(
                blk.a @ blk.rotation + blk.b_v @ dv, 0.0, atol=1e-10,
                err_msg=blk.dg_id)
            np.testing.assert_allclose(
                blk.c_i @ blk.rotation + blk.d_v @ dv, di, atol=1e-10,
                err_msg=blk.dg_id)
            assert abs(blk.c_pe @ blk.rotation + blk.d_pe @ dv) < 1e-10

    def test_exactly_one_frequency_state(self, fixture_blocks):
        _, _, blocks = fixture_blocks
        freq_names = {"delta_omega", "freq_meas"}
        for blk in blocks:
            hits = [i for i, lab in enumerate(blk.state_labels)
                    if lab in freq_names]
            assert hits == [blk.freq_state], blk.dg_id

    def test_gain_bookkeeping(self, fixture_blocks):
        topo, _, blocks = fixture_blocks
        for blk in blocks:
            ratio = blk.params.s_rated / topo.s_base
            if blk.kind == "sg":
                assert blk.inertia_sys == pytest.approx(
                    blk.params.m_inertia * ratio)
                assert blk.pfc_gain == pytest.approx(ratio / blk.params.droop_m)
                assert blk.ire_gain == 0.0
                assert not blk.b_fm.any()
            else:
                assert blk.inertia_sys == 0.0
                assert blk.pfc_gain == pytest.approx(ratio / blk.params.droop_n)
                assert blk.ire_gain == pytest.approx(ratio * blk.params.k_ire)

    def test_deenergized_terminal_rejected(self):
        with pytest.raises(ValueError, match="de-energized"):
            sg_block(nominal_sg(), 0.0 + 0.0j, 0.0 + 0.0j)

    def test_unstable_operating_point_rejected(self):
        # a strongly under-excited (leading power factor) point puts the
        # rotor-angle mode in the right half plane; the factory must refuse it
        with pytest.raises(ValueError, match="unstable|equilibrium"):
            sg_block(nominal_sg(), 1.0 + 0.0j, 0.3 + 1.2j, s_base=0.42e6)


# ---------------------------------------------------------------------------
# inverter generator blocks


class TestIgBlock:
    def test_fixture_blocks_stable(self, fixture_blocks):
        _, _, blocks = fixture_blocks
        for blk in blocks:
            if blk.kind != "ig":
                continue
            assert np.linalg.eigvals(blk.a).real.max() < -1e-3, blk.dg_id

    def test_dc_power_gain_is_unity(self, fixture_blocks):
        _, _, blocks = fixture_blocks
        for blk in blocks:
            if blk.kind != "ig":
                continue
            assert dc_gain(blk, blk.c_pm) == pytest.approx(1.0, rel=0.02)
            assert dc_gain(blk, blk.c_pe) == pytest.approx(1.0, rel=0.02)

    def test_fr_step_settles_with_tracking_time_constant(self, fixture_blocks):
        """ΔFR step: the tracked power reference rises as 1 − e^{−t/T_E},
        and delivered electrical power settles to the same level once the
        current loop has caught up."""
        _, _, blocks = fixture_blocks
        blk = next(b for b in blocks if b.kind == "ig")
        t_e = blk.params.t_e
        dt = 2e-5
        res = simulate_lti(block_sim_system(blk, blk.c_pm),
                           lambda t: np.ones_like(t), dt=dt, horizon=6 * t_e)
        k = int(round(t_e / dt))
        assert res.y[k, 0] == pytest.approx(1 - math.exp(-1), rel=5e-3)
        assert res.y[-1, 0] == pytest.approx(1.0, rel=5e-3)
        # delivered power lags behind the reference (slower current-loop
        # integrator) but reaches the same steady level
        res_e = simulate_lti(block_sim_system(blk, blk.c_pe),
                             lambda t: np.ones_like(t), dt=1e-4, horizon=6.0)
        k_e = int(round(t_e / 1e-4))
        assert res_e.y[k_e, 0] < 1 - math.exp(-1)
        assert res_e.y[-1, 0] == pytest.approx(1.0, rel=5e-3)

    def test_frequency_measurement_lag(self, fixture_blocks):
        """The labeled frequency state follows its input through a
        first-order lag with time constant T_f."""
        _, _, blocks = fixture_blocks
        blk = next(b for b in blocks if b.kind == "ig")
        t_f = blk.params.t_f
        pick = np.zeros(blk.n_states)
        pick[blk.freq_state] = 1.0
        sys = StateSpace(blk.a, blk.b_fm[:, None], pick[None, :],
                         np.zeros((1, 1)))
        dt = 2e-5
        res = simulate_lti(sys, lambda t: np.ones_like(t), dt=dt,
                           horizon=5 * t_f)
        k = int(round(t_f / dt))
        assert res.y[k, 0] == pytest.approx(1 - math.exp(-1), rel=1e-6)

    def test_complex_step_matches_central_differences(self, fixture_blocks):
        topo, _, blocks = fixture_blocks
        blk = next(b for b in blocks if b.kind == "ig")
        fun, x0 = _ig_model(blk.params, blk.v0, blk.i0, s_base=topo.s_base,
                            v_base=topo.v_base, f_0=topo.f_0)
        z0 = np.concatenate([x0, np.zeros(4)])
        jc = jacobian_cs(fun, z0)
        jf = jacobian_fd(fun, z0, h=1e-6)
        scale = np.abs(jc).max()
        np.testing.assert_allclose(jf, jc, atol=1e-5 * scale)

    def test_zero_input_stays_at_zero(self, fixture_blocks):
        _, _, blocks = fixture_blocks
        blk = next(b for b in blocks if b.kind == "ig")
        res = simulate_lti(block_sim_system(blk, blk.c_pe), None,
                           dt=2e-5, horizon=0.5)
        np.testing.assert_allclose(res.y, 0.0, atol=1e-15)

    def test_deenergized_terminal_rejected(self):
        with pytest.raises(ValueError, match="de-energized"):
            ig_block(nominal_ig(), 0.0 + 0.0j, 0.0 + 0.0j)


# ---------------------------------------------------------------------------
# ZIP load blocks


def drawn_zip_current(ld: LoadSpec, v: np.ndarray) -> np.ndarray:
    """Reference nonlinear ZIP law, written independently of load_block."""
    v_d, v_q = v
    u2 = v_d * v_d + v_q * v_q
    u = np.sqrt(u2)
    p = ld.p0 * (ld.z_p * u2 + ld.i_p * u + ld.p_p)
    q = ld.q0 * (ld.z_q * u2 + ld.i_q * u + ld.p_q)
    return np.array([(p * v_d + q * v_q) / u2, (p * v_q - q * v_d) / u2])


class TestLoadBlock:
    V0 = 0.97 * np.exp(0.2j)

    def test_pure_impedance_is_admittance_block(self):
        """(Z_p, I_p, P_p) = (1,0,0): the law is linear, I = (P₀ − jQ₀)·V,
        so the Jacobian is the constant conductance/susceptance block."""
        ld = LoadSpec("n", p0=0.8, q0=0.3, z_p=1, i_p=0, p_p=0,
                      z_q=1, i_q=0, p_q=0)
        expect = np.array([[0.8, 0.3], [-0.3, 0.8]])
        np.testing.assert_allclose(load_block(ld, self.V0), expect, atol=1e-12)
        np.testing.assert_allclose(load_block(ld, 1.0 + 0j), expect, atol=1e-12)

    def test_pure_power_analytic_jacobian(self):
        """(0,0,1): I = conj(S/V); Jacobian worked by hand from
        I_d = (P v_d + Q v_q)/u², I_q = (P v_q − Q v_d)/u²."""
        p0, q0 = 0.6, 0.25
        ld = LoadSpec("n", p0=p0, q0=q0, z_p=0, i_p=0, p_p=1,
                      z_q=0, i_q=0, p_q=1)
        vd, vq = self.V0.real, self.V0.imag
        u2 = vd * vd + vq * vq
        i_d = (p0 * vd + q0 * vq) / u2
        i_q = (p0 * vq - q0 * vd) / u2
        expect = np.array([
            [p0 / u2 - 2 * vd * i_d / u2, q0 / u2 - 2 * vq * i_d / u2],
            [-q0 / u2 - 2 * vd * i_q / u2, p0 / u2 - 2 * vq * i_q / u2],
        ])
        np.testing.assert_allclose(load_block(ld, self.V0), expect, atol=1e-12)

    def test_zip_mixture_is_weighted_sum_of_parts(self):
        parts = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        weights = (1.4, -2.0, 1.6)
        ld = LoadSpec("n", p0=0.5, q0=0.2)   # defaults are the study triple
        total = sum(
            w * load_block(
         LoadSpec("n", p0=0.5, q0=0.2, z_p=z, i_p=i, p_p=pp,
                  z_q=z, i_q=i, p_q=pp), 1.0 + 0j)
            for w, (z, i, pp) in zip(weights, parts))
        np.testing.assert_allclose(load_block(ld, 1.0 + 0j), total, atol=1e-12)

    def test_matches_central_differences(self):
        ld = LoadSpec("n", p0=0.7, q0=-0.1)
        got = load_block(ld, self.V0)
        v0 = np.array([self.V0.real, self.V0.imag])
        fd = jacobian_fd(lambda v: drawn_zip_current(ld, v), v0, h=1e-6)
        np.testing.assert_allclose(got, fd, rtol=1e-5, atol=1e-8)

    def test_deenergized_node_contributes_zero(self):
        ld = LoadSpec("n", p0=0.7, q0=0.2)
        np.testing.assert_array_equal(load_block(ld, 0.0 + 0.0j),
                                      np.zeros((2, 2)))


# ---------------------------------------------------------------------------
# differentiation helpers


class TestLinearize:
    def fun(self, z):
        # exercises the patterns the device models use: products,
        # quotients, sqrt of squares, trig
        return np.array([
            np.sin(z[0]) * z[1],
            np.sqrt(z[0] * z[0] + z[1] * z[1]),
            z[0] / (1.0 + z[1] * z[1]),
        ])

    def analytic(self, z):
        x, y = z
        r = math.hypot(x, y)
        return np.array([
            [math.cos(x) * y, math.sin(x)],
            [x / r, y / r],
            [1 / (1 + y * y), -2 * x * y / (1 + y * y) ** 2],
        ])

    def test_complex_step_is_exact(self):
        z0 = np.array([0.7, -0.4])
        np.testing.assert_allclose(jacobian_cs(self.fun, z0),
                                   self.analytic(z0), rtol=1e-14)

    def test_finite_differences_agree(self):
        z0 = np.array([0.7, -0.4])
        np.testing.assert_allclose(jacobian_fd(self.fun, z0, h=1e-6),
                                   self.analytic(z0), rtol=1e-8, atol=1e-10)
