"""State-space realizations, eigenvalues, and frequency responses."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg

from gridloop.tfcore.rational import RationalTF

__all__ = [
    "StateSpace",
    "FrequencyResponse",
    "ImproperRealizationError",
    "ImaginaryAxisPoleError",
    "tf_to_ss",
    "ss_eigenvalues",
    "freq_response",
    "default_grid",
    "ss_series",
    "ss_add",
    "ss_scale",
    "ss_gain",
]

# Above this state dimension freq_response switches to a Hessenberg
# factorization with O(n^2) per-frequency solves.
_HESSENBERG_MIN_N = 30


class ImproperRealizationError(ValueError):
    """Raised when a state-space realization of an improper TF is requested."""


class ImaginaryAxisPoleError(ValueError):
    """Raised when (jwI - A) is numerically singular at a requested frequency."""


def _ro(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class StateSpace:
    """x' = A x + B u,  y = C x + D u (per-unit signals, time in seconds)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __init__(self, A, B, C, D):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        C = np.atleast_2d(np.asarray(C, dtype=float))
        D = np.atleast_2d(np.asarray(D, dtype=float))
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError(f"A must be square, got {A.shape}")
        if B.shape[0] != n:
            raise ValueError(f"B rows {B.shape[0]} != state dim {n}")
        if C.shape[1] != n:
            raise ValueError(f"C cols {C.shape[1]} != state dim {n}")
        if D.shape != (C.shape[0], B.shape[1]):
            raise ValueError(f"D shape {D.shape} != ({C.shape[0]}, {B.shape[1]})")
        for name, mat in (("A", A), ("B", B), ("C", C), ("D", D)):
            if mat.size and not np.all(np.isfinite(mat)):
                raise ValueError(f"non-finite entries in {name}")
        object.__setattr__(self, "A", _ro(A))
        object.__setattr__(self, "B", _ro(B))
        object.__setattr__(self, "C", _ro(C))
        object.__setattr__(self, "D", _ro(D))

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.B.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.C.shape[0]

    def is_siso(self) -> bool:
        return self.n_inputs == 1 and self.n_outputs == 1

    def eigenvalues(self) -> np.ndarray:
        return ss_eigenvalues(self)

    def is_stable(self, margin: float = 0.0) -> bool:
        if self.n_states == 0:
            return True
        return bool(np.max(ss_eigenvalues(self).real) < -margin)


@dataclass(frozen=True)
class FrequencyResponse:
    """Complex response samples on a strictly increasing positive grid."""

    omegas: np.ndarray
    values: np.ndarray

    def __init__(self, omegas, values):
        omegas = np.asarray(omegas, dtype=float)
        values = np.asarray(values, dtype=complex)
        if omegas.ndim != 1 or len(omegas) == 0:
            raise ValueError("frequency grid must be a nonempty 1-D array")
        if np.any(omegas <= 0) or np.any(np.diff(omegas) <= 0):
            raise ValueError("frequency grid must be strictly increasing and positive")
        if values.shape[0] != omegas.shape[0]:
            raise ValueError("values length does not match grid")
        omegas.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "values", values)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def phase(self) -> np.ndarray:
        return np.angle(self.values)


def default_grid(lo: float = 1e-3, hi: float = 1e4, points: int = 2000) -> np.ndarray:
    """Default log-spaced analysis grid in rad/s."""
    return np.logspace(np.log10(lo), np.log10(hi), points)


def tf_to_ss(g: RationalTF) -> StateSpace:
    """Controllable-canonical realization of a proper rational TF."""
    if not g.is_proper:
        raise ImproperRealizationError(
            f"numerator degree {g.num.degree} exceeds denominator degree "
            f"{g.den.degree}; regularize before realization"
        )
    den = g.den.coeffs  # monic by construction
    n = len(den) - 1
    b = np.zeros(n + 1)
    b[: len(g.num.coeffs)] = g.num.coeffs
    d = b[n]
    if n == 0:
        return StateSpace(np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), [[d]])
    A = np.zeros((n, n))
    A[:-1, 1:] = np.eye(n - 1)
    A[-1, :] = [-c for c in den[:n]]
    B = np.zeros((n, 1))
    B[-1, 0] = 1.0
    C = (b[:n] - d * np.asarray(den[:n])).reshape(1, n)
    return StateSpace(A, B, C, [[d]])


def ss_eigenvalues(m: StateSpace) -> np.ndarray:
    """All eigenvalues of A (stability verdicts use Re < 0)."""
    if m.n_states == 0:
        return np.array([], dtype=complex)
    try:
        return np.linalg.eigvals(m.A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise np.linalg.LinAlgError(f"eigenvalue iteration failed: {exc}") from exc


def _hess_solve_many(H: np.ndarray, rhs: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    """Solve (jw I - H) x = rhs for each w; H upper Hessenberg.

    Gaussian elimination down the single subdiagonal with pairwise partial
    pivoting: O(n^2) per frequency.
    Returns an array of shape (len(omegas), n, rhs.shape[1]).
    """
    n = H.shape[0]
    out = np.empty((len(omegas), n, rhs.shape[1]), dtype=complex)
    for i, w in enumerate(omegas):
        M = (1j * w) * np.eye(n) - H
        y = rhs.astype(complex).copy()
        for k in range(n - 1):
            if abs(M[k + 1, k]) > abs(M[k, k]):
                M[[k, k + 1], k:] = M[[k + 1, k], k:]
                y[[k, k + 1]] = y[[k + 1, k]]
            piv = M[k, k]
            if piv == 0:
                raise ImaginaryAxisPoleError(f"(jwI - A) singular at w={w}")
            f = M[k + 1, k] / piv
            M[k + 1, k:] -= f * M[k, k:]
            y[k + 1] -= f * y[k]
        x = np.empty_like(y)
        for k in range(n - 1, -1, -1):
            piv = M[k, k]
            if piv == 0:
                raise ImaginaryAxisPoleError(f"(jwI - A) singular at w={w}")
            x[k] = (y[k] - M[k, k + 1:] @ x[k + 1:]) / piv
        out[i] = x
    return out


def freq_response(
    sys: Union[RationalTF, StateSpace], omegas: np.ndarray
) -> FrequencyResponse:
    """Pointwise frequency response on a grid.

    RationalTF inputs are evaluated directly; StateSpace inputs use a
    linear solve of (jwI - A) x = B per frequency (no transfer-function
    extraction), switching to a Hessenberg factorization for large
    systems.  SISO systems yield complex scalars per frequency, MIMO
    systems (n_out, n_in) matrices.
    """
    omegas = np.asarray(omegas, dtype=float)
    if isinstance(sys, RationalTF):
        num = sys.num.eval_many(1j * omegas)
        den = sys.den.eval_many(1j * omegas)
        bad = np.abs(den) < 1e-14
        if np.any(bad):
            raise ImaginaryAxisPoleError(
                f"denominator vanishes at w={omegas[bad][:3]} (imaginary-axis pole)"
            )
        return FrequencyResponse(omegas, num / den)

    if not isinstance(sys, StateSpace):
        raise TypeError(f"unsupported system type {type(sys)!r}")
    n = sys.n_states
    if n == 0:
        vals = np.broadcast_to(sys.D, (len(omegas),) + sys.D.shape).copy()
        if sys.is_siso():
            vals = vals[:, 0, 0]
        return FrequencyResponse(omegas, vals)

    if n > _HESSENBERG_MIN_N:
        H, Q = scipy.linalg.hessenberg(sys.A, calc_q=True)
        Bh = Q.T @ sys.B
        Ch = sys.C @ Q
        sol = _hess_solve_many(H, Bh, omegas)
        vals = np.einsum("pn,knm->kpm", Ch, sol) + sys.D[None, :, :]
    else:
        eye = np.eye(n)
        vals = np.empty((len(omegas), sys.n_outputs, sys.n_inputs), dtype=complex)
        for i, w in enumerate(omegas):
            try:
                x = np.linalg.solve(1j * w * eye - sys.A, sys.B)
            except np.linalg.LinAlgError as exc:
                raise ImaginaryAxisPoleError(f"(jwI - A) singular at w={w}") from exc
            vals[i] = sys.C @ x + sys.D
    if sys.is_siso():
        vals = vals[:, 0, 0]
    return FrequencyResponse(omegas, vals)


# -- composition helpers (used by control/reduction assembly) -----------


def ss_series(first: StateSpace, second: StateSpace) -> StateSpace:
    """Cascade: y = second(first(u))."""
    if first.n_outputs != second.n_inputs:
        raise ValueError("series dimension mismatch")
    n1, n2 = first.n_states, second.n_states
    A = np.zeros((n1 + n2, n1 + n2))
    A[:n1, :n1] = first.A
    A[n1:, n1:] = second.A
    A[n1:, :n1] = second.B @ first.C
    B = np.vstack([first.B, second.B @ first.D])
    C = np.hstack([second.D @ first.C, second.C])
    D = second.D @ first.D
    return StateSpace(A, B, C, D)


def ss_add(a: StateSpace, b: StateSpace) -> StateSpace:
    """Parallel sum: y = a(u) + b(u)."""
    if a.n_inputs != b.n_inputs or a.n_outputs != b.n_outputs:
        raise ValueError("parallel dimension mismatch")
    na, nb = a.n_states, b.n_states
    A = np.zeros((na + nb, na + nb))
    A[:na, :na] = a.A
    A[na:, na:] = b.A
    B = np.vstack([a.B, b.B])
    C = np.hstack([a.C, b.C])
    return StateSpace(A, B, C, a.D + b.D)


def ss_scale(sys: StateSpace, k: float) -> StateSpace:
    """Scale the output: y = k * sys(u)."""
    return StateSpace(sys.A, sys.B, k * sys.C, k * sys.D)


def ss_gain(gain: np.ndarray) -> StateSpace:
    """A stateless gain block y = gain * u."""
    gain = np.atleast_2d(np.asarray(gain, dtype=float))
    return StateSpace(
        np.zeros((0, 0)), np.zeros((0, gain.shape[1])), np.zeros((gain.shape[0], 0)), gain
    )
