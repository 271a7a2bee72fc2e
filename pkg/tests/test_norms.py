"""H2/H-infinity norms against closed-form oracles.

Closed forms used as oracles:
  * first-order lag 1/(s+a):     H2 = 1/sqrt(2a),  Hinf = 1/a at w = 0
  * underdamped  b/(s^2+a1 s+a0): H2^2 = b^2/(2 a0 a1)
    (residue integral of |G|^2/pi over [0, inf))
  * resonance    1/(s^2+2 z wn s + wn^2), z < 1/sqrt(2):
    Hinf = 1/(2 z wn^2 sqrt(1-z^2)) at w = wn sqrt(1-2 z^2)
"""

import numpy as np
import pytest

from gridloop.tfcore import (
    Polynomial,
    RationalTF,
    UnstableSystemError,
    h2_lyapunov,
    h2_quadrature,
    hinf_peak,
    response_callable,
    sys_norms,
    tf_to_ss,
)


def test_h2_first_order_closed_form():
    for a in (0.5, 2.0, 7.3):
        ss = tf_to_ss(RationalTF([1.0], [a, 1.0]))
        assert h2_lyapunov(ss) == pytest.approx(1.0 / np.sqrt(2 * a), rel=1e-10)


def test_h2_of_one_over_s_plus_two_is_half():
    ss = tf_to_ss(RationalTF([1.0], [2.0, 1.0]))
    n = sys_norms(ss)
    assert n["h2"] == pytest.approx(0.5, abs=1e-9)


def test_h2_second_order_closed_form():
    b0, a1, a0 = 1.0, 0.2, 1.0
    ss = tf_to_ss(RationalTF([b0], [a0, a1, 1.0]))
    want = np.sqrt(b0**2 / (2 * a0 * a1))
    assert h2_lyapunov(ss) == pytest.approx(want, rel=1e-10)


def test_hinf_first_order_peaks_at_dc():
    n = sys_norms(tf_to_ss(RationalTF([1.0], [1.0, 1.0])))
    assert n["hinf"] == pytest.approx(1.0, rel=1e-6)
    assert n["hinf_omega"] == 0.0


def test_hinf_resonant_closed_form():
    zeta, wn = 0.1, 1.0
    ss = tf_to_ss(RationalTF([wn**2], [wn**2, 2 * zeta * wn, 1.0]))
    n = sys_norms(ss)
    want = 1.0 / (2 * zeta * np.sqrt(1 - zeta**2))
    w_want = wn * np.sqrt(1 - 2 * zeta**2)
    assert n["hinf"] == pytest.approx(want, rel=1e-5)
    assert n["hinf_omega"] == pytest.approx(w_want, abs=1e-2)
    assert n["hinf_rel_tol"] == 1e-4


def test_h2_routes_agree_on_random_stable_systems():
    rng = np.random.default_rng(1234)
    for _ in range(8):
        deg = int(rng.integers(1, 5))
        poles = -rng.uniform(0.2, 8.0, deg).astype(complex)
        if deg >= 2:
            poles[0] = -rng.uniform(0.3, 2.0) + 1j * rng.uniform(0.5, 5.0)
            poles[1] = np.conj(poles[0])
        den = Polynomial.from_roots(poles)
        nz = int(rng.integers(0, deg))
        num = Polynomial.from_roots(
            -rng.uniform(0.2, 8.0, nz), leading=rng.uniform(0.3, 2.0)
        )
        ss = tf_to_ss(RationalTF(num, den))
        exact = h2_lyapunov(ss)
        quad = h2_quadrature(response_callable(ss))
        assert quad == pytest.approx(exact, rel=1e-3)


def test_h2_band_limited_first_order_closed_form():
    # truncated integral: (1/pi) int_0^W dw/(w^2+a^2) = arctan(W/a)/(pi a)
    a, band = 2.0, 2.0
    fn = response_callable(tf_to_ss(RationalTF([1.0], [a, 1.0])))
    got = h2_quadrature(fn, lo=1e-6, hi=band, tail=False)
    want = np.sqrt(np.arctan(band / a) / (np.pi * a))
    assert got == pytest.approx(want, rel=1e-6)
    # and the tail term is what separates the two routes
    full = h2_quadrature(fn, lo=1e-6, hi=1e6, tail=True)
    assert full > got


def test_unstable_system_rejected():
    ss = tf_to_ss(RationalTF([1.0], [-1.0, 1.0]))  # pole at +1
    with pytest.raises(UnstableSystemError):
        sys_norms(ss)
    with pytest.raises(UnstableSystemError):
        h2_lyapunov(ss)


def test_h2_rejects_feedthrough():
    ss = tf_to_ss(RationalTF([1.0, 0.0, 2.0], [1.0, 1.0, 1.0]))  # D = 2
    with pytest.raises(ValueError):
        h2_lyapunov(ss)


def test_response_callable_matches_dc_gain_at_zero():
    g = RationalTF([3.0, 1.0], [2.0, 2.0, 1.0])
    fn = response_callable(tf_to_ss(g))
    assert fn(np.array([0.0]))[0] == pytest.approx(g.dc_gain(), rel=1e-12)


def test_hinf_peak_on_irrational_response():
    # |1 - e^{-s T}| style responses are not rational; the scanner only
    # needs a callable.  Peak of |sin(w)/w|-like shape checked roughly.
    T = 0.5
    fn = lambda w: 1.0 - np.exp(-1j * np.asarray(w) * T)  # noqa: E731
    # scan below the second lobe so the argmax is unambiguous
    peak, w_at = hinf_peak(fn, lo=1e-1, hi=1e1)
    assert peak == pytest.approx(2.0, rel=1e-4)  # max |1-e^{jx}| = 2 at x = pi
    assert w_at == pytest.approx(np.pi / T, rel=1e-2)


def test_sys_norms_requires_siso():
    import gridloop.tfcore as tc

    sys2 = tc.StateSpace(
        -np.eye(2), np.eye(2), np.eye(2), np.zeros((2, 2))
    )
    with pytest.raises(ValueError):
        sys_norms(sys2)
