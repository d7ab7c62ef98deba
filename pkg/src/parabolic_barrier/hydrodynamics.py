"""Probability-current hydrodynamics of barrier states.

Current j = (ħ/m) Im(ψ* ∇ψ), velocity v = j / |ψ|², plus divergence,
vorticity, components in the hyperbolic frame (u, v) = (x² - y², 2xy), and
reconstruction of the velocity potential Φ, stream function Ψ and complex
velocity potential W = Φ + iΨ.

All derivatives of ψ come from the exact polynomial×phase representation.
Vector results are stacked on the first axis, so ``jx, jy = current(...)``
works for scalar and array inputs alike.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import numgrid
from .eigenstates import NODE_REL, PhysParams, Wavefunction, _node_eps
from .errors import (NoMonomialFit, NodalRegion, NotIrrotational, NotSolenoidal,
                     OriginSingular)
from .hermite import Branch
from .numgrid import GridSpec

__all__ = [
    "FlowSample", "PotentialPair", "CornerPotential",
    "region_node_threshold", "density", "current", "velocity", "divergence", "vorticity",
    "current_hyperbolic", "stationary_current_closed_form", "flow_sample",
    "extract_potentials", "potentials_from_velocity", "fit_corner_potential",
    "complex_velocity",
]


class _Local:
    """ψ and its first and second partials at a batch of points."""

    def __init__(self, w: Wavefunction, x, y):
        wx, wy = w.dx(), w.dy()
        self.psi = w(x, y)
        self.px = wx(x, y)
        self.py = wy(x, y)
        self.pxx = wx.dx()(x, y)
        self.pyy = wy.dy()(x, y)
        self.pxy = wy.dx()(x, y)  # ∂x ∂y ψ
        self.pyx = wx.dy()(x, y)  # ∂y ∂x ψ

    @property
    def rho(self):
        return np.abs(self.psi) ** 2


def _arr(x, y):
    return np.asarray(x, float), np.asarray(y, float)


def _check_nodes(w, loc, x, y, eps):
    eps = _node_eps(w, loc.rho) if eps is None else eps
    mask = loc.rho <= eps
    if np.any(mask):
        raise NodalRegion("velocity is undefined where |psi|^2 is below the node threshold",
                          mask=mask)


def region_node_threshold(w: Wavefunction, region: GridSpec) -> float:
    """NODE_REL times the largest |ψ|² on the region grid."""
    X, Y = region.mesh()
    return NODE_REL * float(np.max(np.abs(w(X, Y)) ** 2))


def density(w: Wavefunction, x, y):
    return np.abs(w(x, y)) ** 2


def _current(w, p, x, y, psi):
    c = np.conj(psi)
    k = p.hbar / p.mass
    return np.array([k * np.imag(c * w.dx()(x, y)), k * np.imag(c * w.dy()(x, y))])


def current(w: Wavefunction, p: PhysParams, x, y):
    """Probability current Re[ψ*(-iħ∇)ψ]/m as (jx, jy); finite at nodes."""
    x, y = _arr(x, y)
    return _current(w, p, x, y, w(x, y))


def velocity(w: Wavefunction, p: PhysParams, x, y, eps=None):
    """Madelung velocity j/|ψ|²; raises NodalRegion at nodes.

    ``eps`` is the density threshold; by default 1e-8 times the largest |ψ|²
    seen over the points and the reference box of ``w``.
    """
    x, y = _arr(x, y)
    psi = w(x, y)
    rho = np.abs(psi) ** 2
    eps = _node_eps(w, rho) if eps is None else eps
    mask = rho <= eps
    if np.any(mask):
        raise NodalRegion("velocity is undefined where |psi|^2 is below the node threshold",
                          mask=mask)
    return _current(w, p, x, y, psi) / rho


def _vel_derivs(loc: _Local, p: PhysParams):
    """∂x vx, ∂y vy, ∂x vy, ∂y vx from derivatives of j and ρ."""
    k = p.hbar / p.mass
    c = np.conj(loc.psi)
    rho = loc.rho
    jx = k * np.imag(c * loc.px)
    jy = k * np.imag(c * loc.py)
    rx = 2 * np.real(c * loc.px)
    ry = 2 * np.real(c * loc.py)
    djx_dx = k * np.imag(c * loc.pxx)
    djy_dy = k * np.imag(c * loc.pyy)
    djy_dx = k * np.imag(np.conj(loc.px) * loc.py + c * loc.pxy)
    djx_dy = k * np.imag(np.conj(loc.py) * loc.px + c * loc.pyx)
    r2 = rho * rho
    return ((djx_dx * rho - jx * rx) / r2,
            (djy_dy * rho - jy * ry) / r2,
            (djy_dx * rho - jy * rx) / r2,
            (djx_dy * rho - jx * ry) / r2)


def divergence(w: Wavefunction, p: PhysParams, x, y, eps=None):
    x, y = _arr(x, y)
    loc = _Local(w, x, y)
    _check_nodes(w, loc, x, y, eps)
    dxx, dyy, _, _ = _vel_derivs(loc, p)
    return dxx + dyy


def vorticity(w: Wavefunction, p: PhysParams, x, y, eps=None):
    """∂x vy - ∂y vx."""
    x, y = _arr(x, y)
    loc = _Local(w, x, y)
    _check_nodes(w, loc, x, y, eps)
    _, _, dyx, dxy = _vel_derivs(loc, p)
    return dyx - dxy


def _hyperbolic_frame(x, y):
    r = np.hypot(x, y)
    if np.any(r == 0):
        raise OriginSingular("hyperbolic frame is undefined at the origin")
    # ê_u = ∇u/|∇u| = (x, -y)/r, ê_v = ∇v/|∇v| = (y, x)/r
    return (x / r, -y / r), (y / r, x / r)


def current_hyperbolic(w: Wavefunction, p: PhysParams, x, y):
    """(j_u, j_v): projections of j onto the unit vectors along ∇u and ∇v."""
    x, y = _arr(x, y)
    eu, ev = _hyperbolic_frame(x, y)
    jx, jy = current(w, p, x, y)
    return np.array([jx * eu[0] + jy * eu[1], jx * ev[0] + jy * ev[1]])


def stationary_current_closed_form(n: int, b: Branch, p: PhysParams, u, v):
    """Closed forms of (j_u, j_v) for the stationary states (±,∓,n,n), n ≤ 2.

    ``b`` is the x-branch, so Plus means the (+,−) state.
    """
    u, v = _arr(u, v)
    s = Branch.parse(b).sign
    if np.any(u * u + v * v == 0):
        raise OriginSingular("scale factors vanish at the origin")
    h = 2.0 * (u * u + v * v) ** 0.25
    g, b4 = p.gamma, p.beta ** 4
    if n == 0:
        return np.array([s * g * h / 2, np.zeros_like(h)])
    if n == 1:
        return np.array([s * 2 * g * b4 * v * v * h, np.zeros_like(h)])
    if n == 2:
        bv = b4 * v * v
        ju = s * 8 * g * ((bv + 5) * (bv + 1) + 4 * b4 * u * u) * h
        jv = -s * 64 * g * b4 * u * v * h
        return np.array([ju, jv])
    raise ValueError(f"closed form only available for n = 0, 1, 2 (got {n})")


@dataclass
class FlowSample:
    point: tuple
    j: np.ndarray
    vel: np.ndarray
    div: float
    vort: float
    ju_jv: np.ndarray | None


def flow_sample(w: Wavefunction, p: PhysParams, x: float, y: float, eps=None) -> FlowSample:
    x, y = float(x), float(y)
    loc = _Local(w, x, y)
    _check_nodes(w, loc, x, y, eps)
    j = current(w, p, x, y)
    dxx, dyy, dyx, dxy = _vel_derivs(loc, p)
    hyp = current_hyperbolic(w, p, x, y) if (x, y) != (0.0, 0.0) else None
    return FlowSample((x, y), j, j / loc.rho, float(dxx + dyy), float(dyx - dxy), hyp)


# -- potentials ---------------------------------------------------------------

_GL_T, _GL_W = np.polynomial.legendre.leggauss(32)
_GL_T = 0.5 * (_GL_T + 1)
_GL_W = 0.5 * _GL_W


def _segment_integral(vel, x0, y0, x1, y1):
    """∫ v·dl and ∫ (vx dy - vy dx) along straight segments (arrays of endpoints)."""
    dx = x1 - x0
    dy = y1 - y0
    xs = x0[..., None] + _GL_T * dx[..., None]
    ys = y0[..., None] + _GL_T * dy[..., None]
    vx, vy = vel(xs, ys)
    phi = ((vx * dx[..., None] + vy * dy[..., None]) * _GL_W).sum(-1)
    psi = ((vx * dy[..., None] - vy * dx[..., None]) * _GL_W).sum(-1)
    return phi, psi


def _line_integrals(vel, anchor, X, Y):
    """Φ, Ψ along two axis-parallel routes from ``anchor``: x-then-y and y-then-x."""
    x0 = np.full_like(X, anchor[0])
    y0 = np.full_like(Y, anchor[1])
    a1 = _segment_integral(vel, x0, y0, X, y0)
    a2 = _segment_integral(vel, X, y0, X, Y)
    b1 = _segment_integral(vel, x0, y0, x0, Y)
    b2 = _segment_integral(vel, x0, Y, X, Y)
    return (a1[0] + a2[0], a1[1] + a2[1]), (b1[0] + b2[0], b1[1] + b2[1])


@dataclass
class PotentialPair:
    """Velocity potential Φ and stream function Ψ, both zero at ``anchor``.

    ``x``, ``y``, ``phi``, ``psi`` hold the values on the region grid; calling
    :meth:`phi_at` / :meth:`psi_at` integrates to arbitrary points.
    """

    x: np.ndarray
    y: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    anchor: tuple
    region: GridSpec
    vel: Callable
    path_mismatch: float

    def _at(self, x, y):
        X, Y = np.broadcast_arrays(*_arr(x, y))
        return _line_integrals(self.vel, self.anchor, X.astype(float), Y.astype(float))[0]

    def phi_at(self, x, y):
        return self._at(x, y)[0]

    def psi_at(self, x, y):
        return self._at(x, y)[1]

    @property
    def w(self):
        """Samples of W = Φ + iΨ on the region grid."""
        return self.phi + 1j * self.psi


def potentials_from_velocity(vel, region: GridSpec, div=None, vort=None,
                             rate_scale=None, tol=1e-6, anchor=None) -> PotentialPair:
    """Reconstruct Φ and Ψ from a velocity field on a rectangular region.

    ``div`` and ``vort`` are optional callables giving the divergence and
    vorticity; when omitted they are estimated by central differences. The
    premises are checked on the region grid against ``tol * rate_scale``
    (default rate scale: max |v| / region diameter).
    """
    X, Y = region.mesh()
    vx, vy = vel(X, Y)
    diam = region.diameter
    if rate_scale is None:
        rate_scale = float(np.max(np.hypot(vx, vy))) / diam or 1.0
    h = 1e-4 * max(1.0, diam)
    om = vort(X, Y) if vort is not None else numgrid.fd_curl(vel, X, Y, h, richardson=True)
    dv = div(X, Y) if div is not None else numgrid.fd_divergence(vel, X, Y, h, richardson=True)
    bad_om = float(np.max(np.abs(om)))
    bad_dv = float(np.max(np.abs(dv)))
    limit = tol * rate_scale
    if bad_om > limit:
        raise NotIrrotational(f"max |vorticity| = {bad_om:.3g} exceeds {limit:.3g}", bad_om)
    if bad_dv > limit:
        raise NotSolenoidal(f"max |divergence| = {bad_dv:.3g} exceeds {limit:.3g}", bad_dv)
    if anchor is None:
        anchor = (region.x_min, region.y_min)
    (phi, psi), (phi_b, psi_b) = _line_integrals(vel, anchor, X, Y)
    mismatch = float(max(np.max(np.abs(phi - phi_b)), np.max(np.abs(psi - psi_b))))
    path_tol = tol * rate_scale * diam ** 2
    if mismatch > path_tol:
        # a curl- or divergence-free field cannot produce this
        raise NotIrrotational(f"line integrals depend on the path (mismatch {mismatch:.3g})",
                              mismatch)
    return PotentialPair(X, Y, phi, psi, tuple(anchor), region, vel, mismatch)


def extract_potentials(w: Wavefunction, p: PhysParams, region: GridSpec,
                       tol=1e-6, anchor=None) -> PotentialPair:
    """Φ, Ψ of the Madelung velocity of ``w``, with analytic premise checks.

    Raises NodalRegion if the region grid touches a node, NotIrrotational or
    NotSolenoidal when |vorticity| or |divergence| exceed ``tol * γ``.
    """
    X, Y = region.mesh()
    eps = region_node_threshold(w, region)
    velocity(w, p, X, Y, eps)  # node check over the region
    return potentials_from_velocity(
        lambda a, b: velocity(w, p, a, b, eps), region,
        div=lambda a, b: divergence(w, p, a, b, eps),
        vort=lambda a, b: vorticity(w, p, a, b, eps),
        rate_scale=p.gamma, tol=tol, anchor=anchor)


@dataclass(frozen=True)
class CornerPotential:
    """W(z) = A zᵃ, the flow round the angle π/a."""

    A: complex
    a: float
    residual: float = 0.0

    def __call__(self, z):
        return self.A * np.asarray(z, complex) ** self.a


def fit_corner_potential(source, region: GridSpec | None = None, a_max=6, tol=1e-8):
    """Least-squares fit of W = Φ + iΨ to A zᵃ + C for a = 1..a_max.

    ``source`` is a PotentialPair, or a velocity callable together with
    ``region``. The residual is ‖W - fit‖ / ‖W - mean W‖ and the best exponent
    wins; NoMonomialFit if even that exceeds ``tol``.
    """
    if not isinstance(source, PotentialPair):
        if region is None:
            raise ValueError("a region is required when fitting a raw velocity field")
        source = potentials_from_velocity(source, region)
    z = (source.x + 1j * source.y).ravel()
    W = source.w.ravel()
    scale = np.linalg.norm(W - W.mean())
    if scale == 0:
        raise NoMonomialFit("flow is identically zero", 0.0)
    best = None
    for a in range(1, a_max + 1):
        M = np.column_stack([z ** a, np.ones_like(z)])
        coef, *_ = np.linalg.lstsq(M, W, rcond=None)
        res = np.linalg.norm(M @ coef - W) / scale
        if best is None or res < best[2]:
            best = (coef[0], a, res)
    A, a, res = best
    if res > tol:
        raise NoMonomialFit(f"no monomial z^a (a <= {a_max}) fits; best residual {res:.3g}",
                            res)
    return CornerPotential(complex(A), a, float(res))


def complex_velocity(cp: CornerPotential, z):
    """dW/dz = A a z^(a-1), which equals vx - i vy."""
    z = np.asarray(z, complex)
    out = cp.A * cp.a * z ** (cp.a - 1)
    return out[()] if out.ndim == 0 else out
