"""H2 and H-infinity system norms.

Two independent H2 routes are kept deliberately:

* ``h2_lyapunov`` — exact, via the controllability Gramian (state-space
  systems only);
* ``h2_quadrature`` — frequency-domain integration of |G(jw)|^2/pi with a
  Richardson-extrapolated trapezoid rule and an analytic 1/w^2 tail bound.

The quadrature route is the only one applicable to delayed (irrational)
responses; for rational systems the two must agree, and tests enforce it.

H-infinity uses a dense log grid (>= 400 points/decade over [1e-3, 1e4]
rad/s) with golden-section refinement around the grid argmax; the relative
tolerance (1e-4) is reported in the result metadata.
"""

from __future__ import annotations

from typing import Callable, Union

import numpy as np
import scipy.linalg

from gridloop.tfcore.rational import RationalTF
from gridloop.tfcore.statespace import (
    StateSpace,
    _hess_solve_many,
    _HESSENBERG_MIN_N,
    ss_eigenvalues,
)

__all__ = [
    "sys_norms",
    "h2_lyapunov",
    "h2_quadrature",
    "hinf_peak",
    "response_callable",
    "UnstableSystemError",
    "HINF_GRID_LO",
    "HINF_GRID_HI",
    "HINF_POINTS_PER_DECADE",
    "HINF_REL_TOL",
]

HINF_GRID_LO = 1e-3
HINF_GRID_HI = 1e4
HINF_POINTS_PER_DECADE = 400
HINF_REL_TOL = 1e-4

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class UnstableSystemError(ValueError):
    """Raised when a norm of a non-Hurwitz system is requested."""


def response_callable(
    sys: Union[RationalTF, StateSpace]
) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized w >= 0 -> G(jw) evaluator (SISO systems).

    Unlike freq_response this accepts arbitrary nonnegative frequency
    arrays (including w = 0), which the norm integrators need.
    """
    if isinstance(sys, RationalTF):
        return lambda w: sys.eval_many(1j * np.asarray(w, dtype=float))
    if not isinstance(sys, StateSpace):
        raise TypeError(f"unsupported system type {type(sys)!r}")
    if not sys.is_siso():
        raise ValueError("response_callable expects a SISO system")
    n = sys.n_states
    if n == 0:
        d = complex(sys.D[0, 0])
        return lambda w: np.full(np.shape(np.atleast_1d(w)), d, dtype=complex)
    if n > _HESSENBERG_MIN_N:
        H, Q = scipy.linalg.hessenberg(sys.A, calc_q=True)
        Bh, Ch = Q.T @ sys.B, sys.C @ Q
        d = complex(sys.D[0, 0])

        def fn(w: np.ndarray) -> np.ndarray:
            w = np.atleast_1d(np.asarray(w, dtype=float))
            sol = _hess_solve_many(H, Bh, w)
            return (Ch @ sol[:, :, 0].T)[0] + d

        return fn

    A, B, C = sys.A, sys.B, sys.C
    d = complex(sys.D[0, 0])
    eye = np.eye(n)

    def fn(w: np.ndarray) -> np.ndarray:
        w = np.atleast_1d(np.asarray(w, dtype=float))
        out = np.empty(len(w), dtype=complex)
        for i, wi in enumerate(w):
            out[i] = (C @ np.linalg.solve(1j * wi * eye - A, B))[0, 0] + d
        return out

    return fn


def _require_stable(sys: StateSpace) -> None:
    eigs = ss_eigenvalues(sys)
    if eigs.size and np.max(eigs.real) >= 0:
        worst = eigs[np.argmax(eigs.real)]
        raise UnstableSystemError(
            f"system is not Hurwitz (eigenvalue {worst:.6g} has Re >= 0)"
        )


def h2_lyapunov(sys: StateSpace) -> float:
    """H2 norm from the controllability Gramian trace."""
    _require_stable(sys)
    if np.any(sys.D != 0.0):
        raise ValueError("H2 norm requires a strictly proper system (D = 0)")
    if sys.n_states == 0:
        return 0.0
    P = scipy.linalg.solve_continuous_lyapunov(sys.A, -sys.B @ sys.B.T)
    val = float(np.trace(sys.C @ P @ sys.C.T))
    return float(np.sqrt(max(val, 0.0)))


def h2_quadrature(
    fn: Callable[[np.ndarray], np.ndarray],
    lo: float = 1e-5,
    hi: float = 1e6,
    base_points: int = 4000,
    tail: bool = True,
) -> float:
    """H2 norm from |G(jw)|^2/pi quadrature with Richardson extrapolation.

    ``fn`` maps a nonnegative frequency array to complex response values;
    the integrand tail above ``hi`` is bounded analytically assuming
    |G| ~ c/w roll-off (relative degree >= 1).  Pass ``tail=False`` for a
    band-limited norm that truncates the integral at ``hi`` instead.
    """

    def trapz_log(npts: int) -> float:
        w = np.logspace(np.log10(lo), np.log10(hi), npts)
        mag2 = np.abs(fn(w)) ** 2
        return float(np.trapezoid(mag2, w))

    coarse = trapz_log(base_points)
    fine = trapz_log(2 * base_points)
    body = (4.0 * fine - coarse) / 3.0
    # [0, lo] sliver: |G|^2 is flat at these frequencies relative to lo.
    g0 = abs(fn(np.array([0.0]))[0])
    glo = abs(fn(np.array([lo]))[0])
    head = 0.5 * (g0**2 + glo**2) * lo
    if tail:
        # integral of (c/w)^2 from hi to infinity with c = hi*|G(j hi)|
        ghi = abs(fn(np.array([hi]))[0])
        extra = ghi**2 * hi
    else:
        extra = 0.0
    return float(np.sqrt((body + head + extra) / np.pi))


def hinf_peak(
    fn: Callable[[np.ndarray], np.ndarray],
    lo: float = HINF_GRID_LO,
    hi: float = HINF_GRID_HI,
    points_per_decade: int = HINF_POINTS_PER_DECADE,
    rel_tol: float = HINF_REL_TOL,
    dc_value: float | None = None,
    inf_value: float | None = None,
) -> tuple[float, float]:
    """Peak of |fn(w)| by dense log-grid scan plus golden-section refinement.

    Returns ``(peak, argmax_omega)``.  ``dc_value``/``inf_value`` are
    optional closed-form candidates at w = 0 / w -> infinity; argmax is
    reported as 0.0 / inf when they win.
    """
    decades = np.log10(hi) - np.log10(lo)
    npts = int(np.ceil(points_per_decade * decades)) + 1
    w = np.logspace(np.log10(lo), np.log10(hi), npts)
    mag = np.abs(fn(w))
    i = int(np.argmax(mag))

    a = np.log10(w[max(i - 1, 0)])
    b = np.log10(w[min(i + 1, npts - 1)])

    def f(logw: float) -> float:
        return float(np.abs(fn(np.array([10.0**logw])))[0])

    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    best = float(mag[i])
    for _ in range(200):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        new_best = max(f1, f2, best)
        if new_best > 0 and (new_best - best) < 0.25 * rel_tol * new_best and (
            b - a
        ) < 1e-3:
            best = new_best
            break
        best = new_best
    w_best = 10.0 ** ((a + b) / 2.0)

    peak, w_at = best, w_best
    if dc_value is not None and dc_value > peak:
        peak, w_at = float(dc_value), 0.0
    if inf_value is not None and inf_value > peak:
        peak, w_at = float(inf_value), np.inf
    return peak, w_at


def sys_norms(sys: StateSpace) -> dict:
    """H2 and H-infinity norms of a stable SISO state-space system.

    Returns a dict with ``h2``, ``hinf``, ``hinf_omega`` (argmax
    frequency) and the documented relative tolerance of the H-infinity
    scan (``hinf_rel_tol``).
    """
    if not isinstance(sys, StateSpace):
        raise TypeError("sys_norms expects a StateSpace (realize TFs first)")
    if not sys.is_siso():
        raise ValueError("sys_norms expects a SISO system")
    _require_stable(sys)
    h2 = h2_lyapunov(sys)
    fn = response_callable(sys)
    dc = abs(fn(np.array([0.0]))[0])
    hinf, w_at = hinf_peak(fn, dc_value=dc, inf_value=abs(float(sys.D[0, 0])))
    return {"h2": h2, "hinf": hinf, "hinf_omega": w_at, "hinf_rel_tol": HINF_REL_TOL}
