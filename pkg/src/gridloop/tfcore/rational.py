"""Rational transfer functions G(s) = num(s)/den(s).

Denominators are normalized monic.  Improper transfer functions (numerator
degree above denominator degree) are representable and flagged — the
feedforward controllers are improper in isolation and are regularized only
when a time-domain realization is requested.

Pole-zero cancellation happens **only inside arithmetic** and only for
num/den root pairs agreeing within ``CANCEL_TOL`` (1e-9, absolute), so
nearly-matching-but-distinct modes are never silently discarded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from gridloop.tfcore.polynomial import Polynomial

__all__ = [
    "RationalTF",
    "tf_arith",
    "tf_eval",
    "CANCEL_TOL",
    "POLE_EVAL_TOL",
    "TfArithmeticError",
    "PoleEvaluationError",
]

CANCEL_TOL = 1e-9
POLE_EVAL_TOL = 1e-14


class TfArithmeticError(ValueError):
    """Raised for undefined transfer-function arithmetic (division by the zero TF)."""


class PoleEvaluationError(ValueError):
    """Raised when a transfer function is evaluated on (numerically at) a pole."""


def _as_poly(v: Union[Polynomial, Iterable[float], float]) -> Polynomial:
    if isinstance(v, Polynomial):
        return v
    if np.isscalar(v):
        return Polynomial((float(v),))
    return Polynomial(v)


@dataclass(frozen=True)
class RationalTF:
    """num/den with a monic denominator."""

    num: Polynomial
    den: Polynomial

    def __init__(self, num, den=(1.0,)):
        num, den = _as_poly(num), _as_poly(den)
        if den.is_zero:
            raise ZeroDivisionError("rational TF with identically-zero denominator")
        lead = den.leading
        object.__setattr__(self, "num", num.scale(1.0 / lead))
        object.__setattr__(self, "den", den.scale(1.0 / lead))

    # -- queries --------------------------------------------------------

    @property
    def is_proper(self) -> bool:
        return self.num.degree <= self.den.degree

    @property
    def is_strictly_proper(self) -> bool:
        return self.num.degree < self.den.degree

    @property
    def relative_degree(self) -> int:
        return self.den.degree - self.num.degree

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def poles(self) -> np.ndarray:
        return self.den.roots()

    def zeros(self) -> np.ndarray:
        return self.num.roots()

    def dc_gain(self) -> float:
        return float(np.real(tf_eval(self, 0.0)))

    # -- arithmetic sugar -------------------------------------------------

    def __add__(self, other):
        return tf_arith(self, _coerce(other), "add")

    def __radd__(self, other):
        return tf_arith(_coerce(other), self, "add")

    def __sub__(self, other):
        return tf_arith(self, _coerce(other).scale(-1.0), "add")

    def __rsub__(self, other):
        return tf_arith(_coerce(other), self.scale(-1.0), "add")

    def __mul__(self, other):
        return tf_arith(self, _coerce(other), "mul")

    def __rmul__(self, other):
        return tf_arith(_coerce(other), self, "mul")

    def __truediv__(self, other):
        return tf_arith(self, _coerce(other), "div")

    def __rtruediv__(self, other):
        return tf_arith(_coerce(other), self, "div")

    def scale(self, k: float) -> "RationalTF":
        return RationalTF(self.num.scale(k), self.den)

    def __call__(self, s: complex) -> complex:
        return tf_eval(self, s)

    def eval_many(self, s: np.ndarray) -> np.ndarray:
        """Vectorized evaluation without the per-point pole guard."""
        return self.num.eval_many(s) / self.den.eval_many(s)

    @classmethod
    def constant(cls, k: float) -> "RationalTF":
        return cls(Polynomial((float(k),)), Polynomial.one())

    @classmethod
    def one(cls) -> "RationalTF":
        return cls.constant(1.0)

    @classmethod
    def zero(cls) -> "RationalTF":
        return cls.constant(0.0)

    @classmethod
    def s(cls) -> "RationalTF":
        return cls(Polynomial.s(), Polynomial.one())

    def __repr__(self) -> str:
        return f"RationalTF(num={list(self.num.coeffs)}, den={list(self.den.coeffs)})"


def _coerce(v) -> RationalTF:
    if isinstance(v, RationalTF):
        return v
    if np.isscalar(v):
        return RationalTF.constant(float(v))
    raise TypeError(f"cannot interpret {v!r} as a rational TF")


def _cancel(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Cancel num/den root pairs matching within CANCEL_TOL (absolute)."""
    if num.degree < 1 or den.degree < 1 or num.is_zero:
        return num, den
    zeros = list(num.roots())
    poles = list(den.roots())
    kept_zeros = []
    for z in zeros:
        hit = None
        for idx, pole in enumerate(poles):
            if abs(z - pole) <= CANCEL_TOL:
                hit = idx
                break
        if hit is None:
            kept_zeros.append(z)
        else:
            poles.pop(hit)
    if len(kept_zeros) == len(zeros):
        return num, den
    new_num = Polynomial.from_roots(kept_zeros, leading=num.leading)
    new_den = Polynomial.from_roots(poles, leading=den.leading)
    return new_num, new_den


def tf_arith(a: RationalTF, b: RationalTF, op: str) -> RationalTF:
    """Exact rational arithmetic with matched-root cancellation.

    op is one of ``add``, ``mul``, ``div``.
    """
    if op == "add":
        num = a.num * b.den + b.num * a.den
        den = a.den * b.den
    elif op == "mul":
        num = a.num * b.num
        den = a.den * b.den
    elif op == "div":
        if b.num.is_zero:
            raise TfArithmeticError("division by the identically-zero transfer function")
        num = a.num * b.den
        den = a.den * b.num
    else:
        raise ValueError(f"unknown op {op!r} (expected add/mul/div)")
    num, den = _cancel(num, den)
    return RationalTF(num, den)


def tf_eval(g: RationalTF, s: complex) -> complex:
    """Evaluate ``g`` at a single complex point with a pole guard."""
    d = g.den(s)
    if abs(d) < POLE_EVAL_TOL:
        raise PoleEvaluationError(f"denominator magnitude {abs(d):.3e} at s={s} (pole hit)")
    return g.num(s) / d
