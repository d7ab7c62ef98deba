"""The H±ₙ polynomial family of the one-dimensional barrier eigenfunctions.

A one-dimensional barrier eigenfunction has the form

    u±ₙ(q) = exp(±i ξ²/2) H±ₙ(ξ),   ξ = β q,

and substituting it into the barrier Schrödinger equation leaves the ODE

    f'' ± 2iξ f' ∓ 2in f = 0

for f = H±ₙ. Its polynomial solutions obey the three-term recurrence

    H±ₙ₊₁(ξ) = 2ξ H±ₙ(ξ) ∓ 2in H±ₙ₋₁(ξ),   H±₀ = 1, H±₁ = 2ξ,

which is the physicists' Hermite recurrence after ξ → e^{∓iπ/4} ξ with the
overall constant dropped so the leading coefficient is 2ⁿ.

Coefficients are Gaussian integers times powers of two; in double precision
they stay exact up to roughly n = 26.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "Branch",
    "ComplexPoly1D",
    "hermite_pm",
    "eval_poly",
    "poly_derivative",
    "ode_residual",
]


class Branch(enum.Enum):
    """Sign of the barrier branch: Plus is outgoing, Minus is incoming."""

    PLUS = 1
    MINUS = -1

    @property
    def sign(self) -> int:
        return self.value

    def conj(self) -> "Branch":
        return Branch.MINUS if self is Branch.PLUS else Branch.PLUS

    @classmethod
    def parse(cls, s) -> "Branch":
        if isinstance(s, Branch):
            return s
        if s in ("+", "plus", "Plus", "PLUS", 1, +1):
            return cls.PLUS
        if s in ("-", "minus", "Minus", "MINUS", -1):
            return cls.MINUS
        raise ValueError(f"not a branch: {s!r}")

    def __str__(self):
        return "+" if self is Branch.PLUS else "-"


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


@dataclass(frozen=True, eq=False)
class ComplexPoly1D:
    """Dense polynomial with complex coefficients in ascending degree."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = _trim(np.asarray(self.coeffs, dtype=complex).ravel().copy())
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, xi):
        return eval_poly(self, xi)

    def __eq__(self, other):
        if not isinstance(other, ComplexPoly1D):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"ComplexPoly1D({self.coeffs.tolist()})"

    def conj(self) -> "ComplexPoly1D":
        return ComplexPoly1D(np.conj(self.coeffs))

    def derivative(self) -> "ComplexPoly1D":
        return poly_derivative(self)


@lru_cache(maxsize=None)
def hermite_pm(n: int, b: Branch) -> ComplexPoly1D:
    """Return H±ₙ for branch ``b`` (leading coefficient 2ⁿ)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    b = Branch.parse(b)
    prev = np.array([1.0 + 0j])
    if n == 0:
        return ComplexPoly1D(prev)
    cur = np.array([0.0, 2.0], dtype=complex)
    coupling = -2j * b.sign
    for k in range(1, n):
        nxt = np.zeros(k + 2, dtype=complex)
        nxt[1:] = 2.0 * cur
        nxt[: k] += coupling * k * prev
        prev, cur = cur, nxt
    return ComplexPoly1D(cur)


def eval_poly(p: ComplexPoly1D, xi):
    """Horner evaluation; accepts scalars or arrays."""
    c = p.coeffs
    xi = np.asarray(xi, dtype=complex)
    out = np.full(xi.shape, c[-1], dtype=complex)
    for a in c[-2::-1]:
        out = out * xi + a
    return out[()] if out.ndim == 0 else out


def poly_derivative(p: ComplexPoly1D) -> ComplexPoly1D:
    c = p.coeffs
    if len(c) == 1:
        return ComplexPoly1D([0j])
    return ComplexPoly1D(c[1:] * np.arange(1, len(c)))


def ode_residual(n: int, b: Branch, xi):
    """Residual f'' ± 2iξ f' ∓ 2in f of f = H±ₙ at ``xi``; zero for exact H±ₙ."""
    b = Branch.parse(b)
    f = hermite_pm(n, b)
    d1 = poly_derivative(f)
    d2 = poly_derivative(d1)
    xi = np.asarray(xi, dtype=complex)
    s = b.sign
    res = eval_poly(d2, xi) + 2j * s * xi * eval_poly(d1, xi) - 2j * s * n * eval_poly(f, xi)
    return res[()] if np.ndim(res) == 0 else res
