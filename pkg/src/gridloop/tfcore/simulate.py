"""Fixed-step RK4 simulation of LTI state-space systems.

For an LTI system the four RK4 stage evaluations collapse into constant
matrices, so the whole run is a recurrence

    x[k+1] = M_A x[k] + G0 u[k] + G1 u[k+1]

with

    M_A = I + hA + h^2 A^2/2 + h^3 A^3/6 + h^4 A^4/24
    G0  = h/2 B + h^2/3 AB + h^3/8 A^2 B + h^4/24 A^3 B
    G1  = h/2 B + h^2/6 AB + h^3/24 A^2 B

(the input is sampled at step endpoints and interpolated linearly at the
midpoint stage, i.e. u_mid = (u[k] + u[k+1])/2).  The recurrence runs in
the compiled kernel when available, with a numpy fallback.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from gridloop._backend import run_lti
from gridloop.tfcore.statespace import StateSpace, ss_eigenvalues

__all__ = [
    "simulate_lti",
    "rk4_gains",
    "SimResult",
    "DtTooLargeError",
    "SimulationDivergedError",
    "DT_GUARD_FACTOR",
    "DT_HARD_LIMIT",
]

# default guard: dt must not exceed this fraction of the fastest time
# constant 1/max|eig|; overridable because heavily damped fast modes can
# tolerate larger steps without visible error
DT_GUARD_FACTOR = 0.1
# never overridable: beyond |eig|*dt ~ 2.8 the RK4 recurrence itself is
# unstable, so results would be garbage regardless of accuracy goals
DT_HARD_LIMIT = 2.5


class DtTooLargeError(ValueError):
    """dt violates the time-constant guard (pass allow_large_dt to relax)."""


class SimulationDivergedError(RuntimeError):
    """Integration produced a non-finite state."""

    def __init__(self, t: float):
        self.t = t
        super().__init__(f"non-finite state at t = {t:.6g} s")


@dataclass(frozen=True)
class SimResult:
    """Recorded traces from one fixed-step run.

    t: recorded sample times, shape (n_rec,)
    y: outputs at those times, shape (n_rec, n_outputs)
    x: recorded states, shape (n_rec, n_states), only if requested
    x_final: state at the last integration step (full resolution)
    """

    t: np.ndarray
    y: np.ndarray
    x_final: np.ndarray
    x: Optional[np.ndarray] = None
    dt: float = 0.0
    stride: int = 1


def _cbuf(a: np.ndarray) -> np.ndarray:
    """C-contiguous float64 writable view/copy (the kernel rejects
    read-only buffers, and StateSpace arrays are frozen)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    if not a.flags.writeable:
        a = a.copy()
    return a


def rk4_gains(A: np.ndarray, B: np.ndarray, dt: float):
    """Constant recurrence matrices (M_A, G0, G1) for step size dt."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = A.shape[0]
    h = float(dt)
    eye = np.eye(n)
    A2 = A @ A
    A3 = A2 @ A
    A4 = A3 @ A
    MA = eye + h * A + (h**2 / 2.0) * A2 + (h**3 / 6.0) * A3 + (h**4 / 24.0) * A4
    AB = A @ B
    A2B = A2 @ B
    A3B = A3 @ B
    G0 = (h / 2.0) * B + (h**2 / 3.0) * AB + (h**3 / 8.0) * A2B + (h**4 / 24.0) * A3B
    G1 = (h / 2.0) * B + (h**2 / 6.0) * AB + (h**3 / 24.0) * A2B
    return (
        np.ascontiguousarray(MA),
        np.ascontiguousarray(G0),
        np.ascontiguousarray(G1),
    )


def _dt_guard(sys: StateSpace, dt: float, allow_large_dt: bool) -> None:
    if sys.n_states == 0:
        return
    lam = np.max(np.abs(ss_eigenvalues(sys)))
    if lam == 0.0:
        return
    if dt * lam > DT_HARD_LIMIT:
        raise DtTooLargeError(
            f"dt={dt:g} puts the fastest mode at |eig|*dt={dt * lam:.3g}, "
            f"beyond the RK4 stability region (limit {DT_HARD_LIMIT})"
        )
    if not allow_large_dt and dt > DT_GUARD_FACTOR / lam:
        raise DtTooLargeError(
            f"dt={dt:g} exceeds {DT_GUARD_FACTOR} x fastest time constant "
            f"{1.0 / lam:.3g} s; pass allow_large_dt=True to accept the "
            f"accuracy loss"
        )


def _build_inputs(
    inputs: Union[np.ndarray, Callable[[np.ndarray], np.ndarray], None],
    n_inputs: int,
    dt: float,
    horizon: Optional[float],
) -> np.ndarray:
    if inputs is None:
        if horizon is None:
            raise ValueError("horizon is required when inputs is None")
        steps = int(round(horizon / dt))
        return np.zeros((steps + 1, max(n_inputs, 1)))
    if callable(inputs):
        if horizon is None:
            raise ValueError("horizon is required for callable inputs")
        steps = int(round(horizon / dt))
        t = np.arange(steps + 1) * dt
        U = np.asarray(inputs(t), dtype=float)
        if U.ndim == 1:
            U = U[:, None]
        if U.shape != (steps + 1, n_inputs):
            raise ValueError(
                f"input callable returned shape {U.shape}, "
                f"expected {(steps + 1, n_inputs)}"
            )
        return U
    U = np.asarray(inputs, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    if U.shape[1] != n_inputs:
        raise ValueError(f"inputs have {U.shape[1]} columns, system takes {n_inputs}")
    if U.shape[0] < 2:
        raise ValueError("need at least two input samples (start and end)")
    if horizon is not None:
        expected = int(round(horizon / dt)) + 1
        if U.shape[0] != expected:
            raise ValueError(
                f"{U.shape[0]} input samples inconsistent with "
                f"horizon={horizon} at dt={dt} (expected {expected})"
            )
    return U


def simulate_lti(
    sys: StateSpace,
    inputs: Union[np.ndarray, Callable[[np.ndarray], np.ndarray], None],
    dt: float,
    horizon: Optional[float] = None,
    x0: Optional[np.ndarray] = None,
    stride: int = 1,
    record_states: bool = False,
    allow_large_dt: bool = False,
) -> SimResult:
    """Integrate dx/dt = Ax + Bu with fixed-step RK4.

    inputs may be a sampled array of shape (steps+1, n_inputs) (one row
    per step endpoint), a callable t -> samples, or None (zero input,
    horizon required).  Outputs are recorded every ``stride`` steps; the
    total step count must be divisible by stride.

    Raises DtTooLargeError when dt violates the time-constant guard and
    SimulationDivergedError (carrying the time stamp) if the state goes
    non-finite.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    _dt_guard(sys, dt, allow_large_dt)

    U = _build_inputs(inputs, sys.n_inputs, dt, horizon)
    steps = U.shape[0] - 1
    if steps % stride != 0:
        raise ValueError(f"step count {steps} not divisible by stride {stride}")

    n, m, p = sys.n_states, sys.n_inputs, sys.n_outputs
    if x0 is None:
        x0 = np.zeros(n)
    else:
        x0 = np.asarray(x0, dtype=float).reshape(n).copy()

    t_rec = np.arange(0, steps + 1, stride) * dt

    if n == 0:
        Y = U[::stride] @ sys.D.T if m else np.zeros((len(t_rec), p))
        return SimResult(
            t=t_rec, y=Y, x_final=np.zeros(0),
            x=np.zeros((len(t_rec), 0)) if record_states else None,
            dt=dt, stride=stride,
        )

    B = sys.B if m else np.zeros((n, 1))
    D = sys.D if m else np.zeros((p, 1))
    MA, G0, G1 = rk4_gains(sys.A, B, dt)

    C = _cbuf(sys.C)
    D = _cbuf(D)
    if record_states:
        C = _cbuf(np.vstack([C, np.eye(n)]))
        D = _cbuf(np.vstack([D, np.zeros((n, D.shape[1]))]))

    Y, x_final, bad = run_lti(MA, G0, G1, _cbuf(U), _cbuf(x0), C, D, int(stride))
    Y = np.asarray(Y)
    if bad >= 0:
        raise SimulationDivergedError(t=float(bad * stride * dt))

    if record_states:
        return SimResult(
            t=t_rec, y=Y[:, :p], x_final=np.asarray(x_final), x=Y[:, p:],
            dt=dt, stride=stride,
        )
    return SimResult(
        t=t_rec, y=Y, x_final=np.asarray(x_final), x=None, dt=dt, stride=stride
    )
