"""Eigenstates of the isotropic 2D parabolic potential barrier.

    H = -ħ²/2m ∇² + V₀ - m γ² (x² + y²) / 2

separates into two 1D barriers, so each eigenstate is a product
u^{bx}_{nx}(x) u^{by}_{ny}(y) labelled by a branch pair and two quantum
numbers. Every state (and every superposition of states sharing the same
branch pair) is a polynomial in (x, y) times the quadratic phase
exp(i β² (sx x² + sy y²) / 2), and that form is closed under ∂x and ∂y. All
derivatives below are taken exactly on this representation.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import hermite as _hp
from .errors import NodalRegion, OriginSingular, RepresentationMismatch
from .hermite import Branch

#: relative node threshold: |ψ|² ≤ NODE_REL * max|ψ|² counts as a node
NODE_REL = 1e-8


@dataclass(frozen=True)
class PhysParams:
    """Physical constants. Natural units by default."""

    hbar: float = 1.0
    mass: float = 1.0
    gamma: float = 1.0
    v0: float = 0.0

    def __post_init__(self):
        for name in ("hbar", "mass", "gamma"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be a positive finite number, got {val!r}")
        if not np.isfinite(self.v0):
            raise ValueError("v0 must be finite")

    @property
    def beta(self) -> float:
        """Inverse length scale √(mγ/ħ)."""
        return math.sqrt(self.mass * self.gamma / self.hbar)


@dataclass(frozen=True)
class StateLabel:
    bx: Branch
    by: Branch
    nx: int
    ny: int

    def __post_init__(self):
        object.__setattr__(self, "bx", Branch.parse(self.bx))
        object.__setattr__(self, "by", Branch.parse(self.by))
        if self.nx < 0 or self.ny < 0:
            raise ValueError("quantum numbers must be non-negative")

    @classmethod
    def from_type(cls, type_: int, nx: int, ny: int) -> "StateLabel":
        try:
            bx, by = _TYPES[type_]
        except KeyError:
            raise ValueError(f"type must be 1, 2, 3 or 4, got {type_!r}") from None
        return cls(bx, by, nx, ny)

    @property
    def type(self) -> int:
        return _TYPE_OF[(self.bx, self.by)]

    def __str__(self):
        return f"({self.bx},{self.by},{self.nx},{self.ny})"


_P, _M = Branch.PLUS, Branch.MINUS
_TYPES = {1: (_P, _P), 2: (_P, _M), 3: (_M, _P), 4: (_M, _M)}
_TYPE_OF = {v: k for k, v in _TYPES.items()}


class FlowClass(enum.Enum):
    DIVERGING = "Diverging"
    CONVERGING = "Converging"
    CORNER_Y_TO_X = "CornerYtoX"
    CORNER_X_TO_Y = "CornerXtoY"
    STATIONARY = "Stationary"


@dataclass(frozen=True, eq=False)
class Wavefunction:
    """P(βx, βy) · exp(i (sx (βx)² + sy (βy)²) / 2).

    ``poly[i, j]`` is the coefficient of ξⁱ ηʲ in the dimensionless variables
    ξ = βx, η = βy. Keeping the coefficients dimensionless leaves Hermite
    integers exact, so operators built on them cancel exactly. ``energy`` is
    set when the function is known to be an energy eigenstate.
    """

    poly: np.ndarray
    sx: int
    sy: int
    beta: float
    energy: complex | None = field(default=None)

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.poly, dtype=complex)).copy()
        c.setflags(write=False)
        object.__setattr__(self, "poly", c)
        if self.sx not in (1, -1) or self.sy not in (1, -1):
            raise ValueError("phase signs must be +1 or -1")

    @property
    def is_energy_eigenstate(self) -> bool:
        return self.energy is not None

    def _with(self, c, energy=None):
        return Wavefunction(c, self.sx, self.sy, self.beta, energy)

    def phase(self, x, y):
        xi = self.beta * np.asarray(x, float)
        eta = self.beta * np.asarray(y, float)
        return np.exp(0.5j * (self.sx * xi * xi + self.sy * eta * eta))

    def poly_value(self, x, y):
        return npoly.polyval2d(self.beta * np.asarray(x, float),
                               self.beta * np.asarray(y, float), self.poly)

    def __call__(self, x, y):
        return self.poly_value(x, y) * self.phase(x, y)

    def _same_family(self, other):
        return (self.sx, self.sy) == (other.sx, other.sy) and self.beta == other.beta

    def __add__(self, other):
        if not isinstance(other, Wavefunction):
            return NotImplemented
        if not self._same_family(other):
            raise RepresentationMismatch("cannot add wavefunctions with different phase factors")
        shape = np.maximum(self.poly.shape, other.poly.shape)
        c = np.zeros(shape, dtype=complex)
        c[: self.poly.shape[0], : self.poly.shape[1]] += self.poly
        c[: other.poly.shape[0], : other.poly.shape[1]] += other.poly
        same_e = (self.energy is not None and other.energy is not None
                  and _energies_equal(self.energy, other.energy))
        return self._with(c, self.energy if same_e else None)

    def __mul__(self, k):
        if not np.isscalar(k):
            return NotImplemented
        return self._with(self.poly * k, self.energy)

    __rmul__ = __mul__

    def conj(self) -> "Wavefunction":
        e = None if self.energy is None else complex(self.energy).conjugate()
        return Wavefunction(np.conj(self.poly), -self.sx, -self.sy, self.beta, e)

    def mul_xi(self, axis) -> "Wavefunction":
        """ξ·ψ (axis 0) or η·ψ (axis 1), an exact coefficient shift."""
        shape = list(self.poly.shape)
        shape[axis] += 1
        c = np.zeros(shape, dtype=complex)
        if axis == 0:
            c[1:, :] = self.poly
        else:
            c[:, 1:] = self.poly
        return self._with(c)

    def mul_x(self) -> "Wavefunction":
        return (1.0 / self.beta) * self.mul_xi(0)

    def mul_y(self) -> "Wavefunction":
        return (1.0 / self.beta) * self.mul_xi(1)

    @cached_property
    def ref_density(self) -> float:
        """max |ψ|² over a 25×25 grid on [-3/β, 3/β]², the default node scale."""
        g = np.linspace(-3.0 / self.beta, 3.0 / self.beta, 25)
        gx, gy = np.meshgrid(g, g)
        return float(np.max(np.abs(self(gx, gy)) ** 2))

    def dx(self) -> "Wavefunction":
        """∂/∂x, staying in the polynomial×phase family."""
        return self._dx

    def dy(self) -> "Wavefunction":
        return self._dy

    @cached_property
    def _dx(self):
        return self.beta * self.d_xi(0)

    @cached_property
    def _dy(self):
        return self.beta * self.d_xi(1)

    def d_xi(self, axis) -> "Wavefunction":
        """∂/∂ξ or ∂/∂η: P' + i s ξ P on the coefficients."""
        c = self.poly
        s = self.sx if axis == 0 else self.sy
        shape = list(c.shape)
        shape[axis] += 1
        out = np.zeros(shape, dtype=complex)
        if c.shape[axis] > 1:
            dc = npoly.polyder(c, axis=axis)
            out[: dc.shape[0], : dc.shape[1]] += dc
        if axis == 0:
            out[1:, :] += 1j * s * c
        else:
            out[:, 1:] += 1j * s * c
        return self._with(out)


def _energies_equal(a, b):
    return abs(complex(a) - complex(b)) <= 1e-13 * max(1.0, abs(complex(a)), abs(complex(b)))


# -- spectrum -----------------------------------------------------------------

def energy(label: StateLabel, p: PhysParams) -> complex:
    """Complex energy E = V₀ ∓ i(nx + ½)ħγ ∓ i(ny + ½)ħγ for the label's branches."""
    k = label.bx.sign * (label.nx + 0.5) + label.by.sign * (label.ny + 0.5)
    return complex(p.v0, -k * p.hbar * p.gamma)


def build_state(label: StateLabel, p: PhysParams) -> Wavefunction:
    hx = _hp.hermite_pm(label.nx, label.bx).coeffs
    hy = _hp.hermite_pm(label.ny, label.by).coeffs
    return Wavefunction(np.outer(hx, hy), label.bx.sign, label.by.sign, p.beta,
                        energy(label, p))


def conjugate_state(label: StateLabel) -> StateLabel:
    return StateLabel(label.bx.conj(), label.by.conj(), label.nx, label.ny)


def time_factor(label: StateLabel, p: PhysParams, t: float) -> complex:
    """exp(-i E t / ħ); its modulus is exp(Im(E) t / ħ)."""
    return complex(np.exp(-1j * energy(label, p) * t / p.hbar))


def classify_flow(label: StateLabel) -> FlowClass:
    t = label.type
    if t == 1:
        return FlowClass.DIVERGING
    if t == 4:
        return FlowClass.CONVERGING
    if label.nx == label.ny:
        return FlowClass.STATIONARY
    return FlowClass.CORNER_Y_TO_X if t == 2 else FlowClass.CORNER_X_TO_Y


def degeneracy(type_: int, level: int | None = None):
    """Degeneracy of an energy level: level+1 for types 1/4, ``math.inf`` for 2/3."""
    if type_ in (2, 3):
        return math.inf
    if type_ not in (1, 4):
        raise ValueError(f"type must be 1, 2, 3 or 4, got {type_!r}")
    if level is None or level < 0:
        raise ValueError("level = nx + ny must be a non-negative integer")
    return level + 1


def superpose(terms, p: PhysParams) -> Wavefunction:
    """Σ cₖ · build_state(Lₖ).

    Raises RepresentationMismatch when the labels mix phase signs. Mixing
    energies is allowed but warns, and the result has ``energy=None``.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("empty superposition")
    out = None
    for c, lab in terms:
        w = complex(c) * build_state(lab, p)
        out = w if out is None else out + w
    energies = [energy(lab, p) for _, lab in terms]
    if all(_energies_equal(energies[0], e) for e in energies):
        out = Wavefunction(out.poly, out.sx, out.sy, out.beta, energies[0])
    else:
        warnings.warn("superposed states have different energies; result is not an "
                      "energy eigenstate", stacklevel=2)
    return out


# -- operators ----------------------------------------------------------------

def lz(w: Wavefunction, p: PhysParams) -> Wavefunction:
    """L̂ψ with L̂ = -iħ (x ∂y - y ∂x), built on the coefficients.

    x∂y - y∂x is unchanged by the rescaling to ξ, η, so this is exact.
    """
    return (-1j * p.hbar) * (w.d_xi(1).mul_xi(0) + (-1.0) * w.d_xi(0).mul_xi(1))


def apply_lz(w: Wavefunction, p: PhysParams, x, y):
    return lz(w, p)(x, y)


def node_threshold(w: Wavefunction, x=None, y=None) -> float:
    """NODE_REL times the largest |ψ|² over the given points and a reference box.

    The box spans [-3/β, 3/β]² so isolated points still get a sensible scale.
    """
    m = w.ref_density
    if x is not None:
        m = max(m, float(np.max(np.abs(w(np.asarray(x), np.asarray(y))) ** 2)))
    return NODE_REL * m


def _node_eps(w: Wavefunction, rho) -> float:
    """node_threshold when |ψ|² at the points is already known."""
    return NODE_REL * max(w.ref_density, float(np.max(rho)))


def lz_eigencheck(w: Wavefunction, p: PhysParams, x, y):
    """Estimate the L̂ eigenvalue of ``w`` from the ratio L̂ψ/ψ at sample points.

    Returns (mean ratio, max |ratio - mean|).
    """
    x = np.atleast_1d(np.asarray(x, float))
    y = np.atleast_1d(np.asarray(y, float))
    psi = w(x, y)
    mask = np.abs(psi) ** 2 <= node_threshold(w, x, y)
    if mask.any():
        raise NodalRegion("sample points fall in a nodal region", mask=mask)
    ratio = apply_lz(w, p, x, y) / psi
    est = ratio.mean()
    return complex(est), float(np.max(np.abs(ratio - est)))


def hamiltonian(w: Wavefunction, p: PhysParams) -> Wavefunction:
    """Ĥψ as another polynomial×phase function.

    In ξ = βx, η = βy the operator is V₀ - (ħγ/2)(Δ + ξ² + η²). The bracket
    is combined on exact coefficients before any evaluation, so the large
    ξ²ψ terms from the phase and from the inverted potential cancel there
    instead of in floating-point sums of big values.
    """
    lap = w.d_xi(0).d_xi(0) + w.d_xi(1).d_xi(1)
    r2 = w.mul_xi(0).mul_xi(0) + w.mul_xi(1).mul_xi(1)
    return (-0.5 * p.hbar * p.gamma) * (lap + r2) + p.v0 * w


def hamiltonian_apply(w: Wavefunction, p: PhysParams, x, y):
    return hamiltonian(w, p)(x, y)


def schrodinger_residual(w: Wavefunction, E: complex, p: PhysParams, x, y):
    """(Ĥψ - Eψ)(x, y), formed on the coefficients and evaluated once."""
    return (hamiltonian(w, p) + (-complex(E)) * w)(x, y)


# -- coordinates --------------------------------------------------------------

def to_polar(x, y):
    """(r, φ) with φ ∈ (-π, π]; φ = 0 at the origin by convention."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    r = np.hypot(x, y)
    phi = np.arctan2(y, x)
    phi = np.where(phi == -np.pi, np.pi, phi)
    phi = np.where(r == 0, 0.0, phi)
    return r[()], phi[()]


def to_hyperbolic(x, y):
    """Rectangular hyperbolic coordinates u = x² - y², v = 2xy."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    return (x * x - y * y)[()], (2 * x * y)[()]


def scale_factors(u, v):
    """h_u = h_v = 2 (u² + v²)^{1/4}, which equals |∇u| = |∇v| = 2r."""
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    s = u * u + v * v
    if np.any(s == 0):
        raise OriginSingular("scale factors vanish at the origin")
    h = 2.0 * s ** 0.25
    return h[()], h[()]
