"""Finite differences, grid sampling and streamline tracing.

Nothing here knows about wavefunctions: fields are plain callables taking
coordinate arrays. Scalar fields return an array shaped like the inputs and
vector fields return a pair ``(fx, fy)``. That keeps these routines usable as
an independent check on the analytic derivatives in ``hydrodynamics``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NodalRegion

DEFAULT_REL_STEP = 1e-5


def default_step(x, y):
    return DEFAULT_REL_STEP * np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx_pts: int = 21
    ny_pts: int = 21

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("grid bounds must satisfy min < max")
        if self.nx_pts < 2 or self.ny_pts < 2:
            raise ValueError("grid needs at least 2 points per axis")

    @property
    def xs(self):
        return np.linspace(self.x_min, self.x_max, self.nx_pts)

    @property
    def ys(self):
        return np.linspace(self.y_min, self.y_max, self.ny_pts)

    def mesh(self):
        """(X, Y) with shape (ny_pts, nx_pts); rows run along y."""
        return np.meshgrid(self.xs, self.ys)

    def contains(self, x, y):
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    @property
    def diameter(self):
        return float(np.hypot(self.x_max - self.x_min, self.y_max - self.y_min))


# -- finite differences -------------------------------------------------------

def _central(f, x, y, h, axis):
    if axis == 0:
        return (np.asarray(f(x + h, y)) - np.asarray(f(x - h, y))) / (2 * h)
    return (np.asarray(f(x, y + h)) - np.asarray(f(x, y - h))) / (2 * h)


def _richardson(op, h, richardson):
    if not richardson:
        return op(h)
    return (4 * op(h / 2) - op(h)) / 3


def fd_gradient(f, x, y, h=None, richardson=False):
    """Central-difference gradient of a scalar field, returned as (gx, gy)."""
    h = default_step(x, y) if h is None else h
    gx = _richardson(lambda s: _central(f, x, y, s, 0), h, richardson)
    gy = _richardson(lambda s: _central(f, x, y, s, 1), h, richardson)
    return np.array([gx, gy])


def fd_divergence(F, x, y, h=None, richardson=False):
    h = default_step(x, y) if h is None else h

    def op(s):
        return (_central(lambda a, b: F(a, b)[0], x, y, s, 0)
                + _central(lambda a, b: F(a, b)[1], x, y, s, 1))

    return _richardson(op, h, richardson)


def fd_curl(F, x, y, h=None, richardson=False):
    """∂x Fy - ∂y Fx by central differences."""
    h = default_step(x, y) if h is None else h

    def op(s):
        return (_central(lambda a, b: F(a, b)[1], x, y, s, 0)
                - _central(lambda a, b: F(a, b)[0], x, y, s, 1))

    return _richardson(op, h, richardson)


# -- sampling -----------------------------------------------------------------

@dataclass
class GridSamples:
    """Row-major samples of a field; ``nodal`` flags cells the field refused."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    nodal: np.ndarray


def sample_grid(field, spec: GridSpec) -> GridSamples:
    """Evaluate ``field`` on every cell of ``spec`` in row-major order (y outer).

    NodalRegion raised by the field is recorded per cell rather than
    propagated. Vector fields give ``values`` of shape (N, 2).
    """
    X, Y = spec.mesh()
    x, y = X.ravel(), Y.ravel()
    nodal = np.zeros(x.shape, dtype=bool)
    try:
        vals = np.asarray(field(x, y))
    except NodalRegion as exc:
        if exc.mask is None:
            raise
        nodal = np.asarray(exc.mask, dtype=bool).reshape(x.shape)
        ok = ~nodal
        good = np.asarray(field(x[ok], y[ok])) if ok.any() else None
        probe = good if good is not None else np.zeros(0)
        vector = probe.ndim == 2 and probe.shape[0] == 2
        if vector:
            vals = np.full((2, x.size), np.nan)
            if good is not None:
                vals[:, ok] = good
        else:
            dtype = probe.dtype if probe.size else float
            vals = np.full(x.size, np.nan, dtype=np.result_type(dtype, float))
            if good is not None:
                vals[ok] = good
    if vals.ndim == 0:
        vals = np.full(x.shape, vals)
    if vals.ndim == 2 and vals.shape[0] == 2 and vals.shape[1] == x.size:
        vals = vals.T
    return GridSamples(x, y, vals, nodal)


# -- streamlines --------------------------------------------------------------

class Termination(enum.Enum):
    STEP_LIMIT = "StepLimit"
    LEFT_BOUNDS = "LeftBounds"
    NODAL_REGION = "NodalRegion"


@dataclass
class Streamline:
    points: np.ndarray
    terminated_by: Termination


def _direction(vel, x, y, stall):
    v = np.asarray(vel(x, y), dtype=float)
    speed = np.hypot(v[0], v[1])
    if not np.isfinite(speed) or speed <= stall:
        raise NodalRegion("stagnation point")
    return v / speed


def integrate_streamline(vel, seed, step, max_steps, bounds: GridSpec, stall=1e-12):
    """Fixed-step RK4 along the unit velocity direction, so ``step`` is arc length.

    Stops on max_steps, on leaving ``bounds``, or with NODAL_REGION when a
    stage lands on a node, the speed drops below ``stall``, or the direction
    flips (the line has run into a stagnation point within one step).
    """
    x, y = map(float, seed)
    if not bounds.contains(x, y):
        raise ValueError("seed lies outside the bounds")
    d_prev = _direction(vel, x, y, stall)  # NodalRegion propagates for a bad seed
    pts = [(x, y)]
    reason = Termination.STEP_LIMIT
    h = float(step)
    for _ in range(max_steps):
        try:
            k1 = _direction(vel, x, y, stall)
            k2 = _direction(vel, x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], stall)
            k3 = _direction(vel, x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], stall)
            k4 = _direction(vel, x + h * k3[0], y + h * k3[1], stall)
        except NodalRegion:
            reason = Termination.NODAL_REGION
            break
        if min(k1 @ k2, k1 @ k4, k1 @ d_prev) < 0:
            reason = Termination.NODAL_REGION
            break
        d = (k1 + 2 * k2 + 2 * k3 + k4) / 6
        xn, yn = x + h * d[0], y + h * d[1]
        if not bounds.contains(xn, yn):
            reason = Termination.LEFT_BOUNDS
            break
        x, y, d_prev = xn, yn, k1
        pts.append((x, y))
    return Streamline(np.array(pts), reason)
