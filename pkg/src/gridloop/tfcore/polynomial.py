"""Real polynomials in ascending powers of s.

These are plain value objects: immutable, exact-arithmetic (up to floating
point) building blocks for the rational transfer functions in
gridloop.tfcore.rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = ["Polynomial"]


def _trim(coeffs: Sequence[float]) -> tuple[float, ...]:
    """Drop exactly-zero leading (highest-order) coefficients.

    Only exact zeros are removed: tiny residues from floating-point
    cancellation are kept so that no mode is silently discarded.
    """
    c = list(float(v) for v in coeffs)
    while len(c) > 1 and c[-1] == 0.0:
        c.pop()
    if not c:
        c = [0.0]
    return tuple(c)


@dataclass(frozen=True)
class Polynomial:
    """A real polynomial ``c[0] + c[1]*s + ... + c[n]*s**n``."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float]):
        object.__setattr__(self, "coeffs", _trim(tuple(coeffs)))
        if not all(np.isfinite(self.coeffs)):
            raise ValueError(f"non-finite polynomial coefficients: {self.coeffs}")

    # -- basic queries ------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    @property
    def leading(self) -> float:
        return self.coeffs[-1]

    def __call__(self, s: complex) -> complex:
        """Evaluate by Horner's rule (stable for the sizes used here)."""
        acc: complex = 0.0
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def eval_many(self, s: np.ndarray) -> np.ndarray:
        """Vectorized Horner evaluation at an array of complex points."""
        acc = np.zeros_like(np.asarray(s, dtype=complex))
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        out = np.zeros(n)
        out[: len(a)] += a
        out[: len(b)] += b
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1.0)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.is_zero or other.is_zero:
            return Polynomial((0.0,))
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    def scale(self, k: float) -> "Polynomial":
        return Polynomial(tuple(c * k for c in self.coeffs))

    # -- roots ----------------------------------------------------------

    def roots(self) -> np.ndarray:
        """Roots of the polynomial (empty array for degree 0)."""
        if self.degree == 0:
            return np.array([], dtype=complex)
        return np.roots(self.coeffs[::-1])

    @classmethod
    def from_roots(cls, roots: Sequence[complex], leading: float = 1.0) -> "Polynomial":
        """Monic-from-roots times ``leading``; conjugate pairs give real coeffs."""
        if len(roots) == 0:
            return cls((leading,))
        c = np.atleast_1d(np.poly(np.asarray(roots, dtype=complex)))
        if np.abs(c.imag).max() > 1e-8 * max(np.abs(c.real).max(), 1.0):
            raise ValueError("root set is not closed under conjugation")
        return cls((c.real * leading)[::-1])

    @classmethod
    def one(cls) -> "Polynomial":
        return cls((1.0,))

    @classmethod
    def s(cls) -> "Polynomial":
        return cls((0.0, 1.0))

    def __repr__(self) -> str:
        terms = [f"{c:g}*s^{i}" if i else f"{c:g}" for i, c in enumerate(self.coeffs)]
        return "Polynomial(" + " + ".join(terms) + ")"
