import numpy as np
import pytest
from scipy.integrate import solve_ivp

from parabolic_barrier import (GridSpec, NodalRegion, PhysParams, Termination, density,
                               divergence, fd_curl, fd_divergence, fd_gradient,
                               integrate_streamline, sample_grid, velocity)
from parabolic_barrier.verify import check_oracle_orders, fd_orders, offnode_points

from conftest import NATURAL, SKEWED, state


def _vel(w, p=NATURAL):
    return lambda x, y: velocity(w, p, x, y)


@pytest.mark.parametrize("bad", [(1, 0, 0, 1), (0, 1, 1, 1), (0, 1, 0, 1, 1, 5)])
def test_gridspec_validation(bad):
    with pytest.raises(ValueError):
        GridSpec(*bad)


def test_gridspec_uniform():
    g = GridSpec(-1, 2, 0, 1, 4, 3)
    assert np.allclose(np.diff(g.xs), 1) and np.allclose(np.diff(g.ys), 0.5)
    X, Y = g.mesh()
    assert X.shape == (3, 4) and Y[2, 0] == 1


def test_fd_examples():
    div = fd_divergence(_vel(state(1, 0, 0)), 0.7, -1.3, h=1e-4)
    assert abs(div - 2) <= 1e-6
    g = fd_gradient(lambda x, y: (x * x - y * y) / 2, 1.0, 1.0)
    assert np.allclose(g, [1, -1], atol=1e-9)


def test_fd_curl_vanishes(rng):
    for t, nx, ny in [(1, 2, 1), (2, 3, 1), (3, 1, 1), (4, 0, 2)]:
        w = state(t, nx, ny)
        x, y = offnode_points(w, 20, rng, -2, 2, margin=(1e-4,))
        assert np.max(np.abs(fd_curl(_vel(w), x, y, h=1e-4))) <= 1e-6


def test_fd_richardson_improves():
    f = lambda x, y: np.sin(x) * np.exp(y)
    exact = np.cos(0.4) * np.exp(0.3)
    plain = fd_gradient(f, 0.4, 0.3, h=1e-2)[0]
    rich = fd_gradient(f, 0.4, 0.3, h=1e-2, richardson=True)[0]
    assert abs(rich - exact) < abs(plain - exact) / 100


def test_fd_propagates_nodal():
    with pytest.raises(NodalRegion):
        fd_divergence(_vel(state(2, 1, 1)), 0.0, 1.0, h=1e-4)


@pytest.mark.parametrize("p", [NATURAL, SKEWED], ids=["natural", "skewed"])
def test_oracle_equivalence(p, rng):
    """FD divergence/curl converge to the analytic values at second order."""
    for t in (1, 2, 3, 4):
        for nx in range(5):
            for ny in range(5):
                w = state(t, nx, ny, p)
                x, y = offnode_points(w, 50, rng, -2.5, 2.5, margin=(2e-3, 1e-3))
                for o in fd_orders(w, p, x, y, 2e-3, floor=1e-9 * p.gamma):
                    assert o is None or o >= 1.9, (t, nx, ny, o)
    assert check_oracle_orders(p).passed


def test_sample_grid_examples():
    spec = GridSpec(-1, 1, -2, 2, 5, 4)
    s = sample_grid(lambda x, y: np.ones_like(x), spec)
    assert s.values.shape == (20,) and np.all(s.values == 1) and not s.nodal.any()
    assert s.x[:5].tolist() == list(spec.xs) and np.all(s.y[:5] == -2)
    w = state(2, 0, 0)
    s = sample_grid(lambda x, y: density(w, x, y), GridSpec(-3, 3, -3, 3, 7, 7))
    assert np.allclose(s.values, 1)
    w = state(2, 1, 1)
    s = sample_grid(_vel(w), GridSpec(-1, 1, -1, 1, 5, 5))
    on_axis = (s.x == 0) | (s.y == 0)
    assert np.array_equal(s.nodal, on_axis)
    assert s.values.shape == (25, 2)
    assert np.all(np.isnan(s.values[on_axis])) and np.all(np.isfinite(s.values[~on_axis]))


def test_streamline_conserves_xy():
    bounds = GridSpec(0, 10, 0, 10)
    sl = integrate_streamline(_vel(state(2, 0, 0)), (2, 0.5), 1e-3, 4000, bounds)
    assert sl.terminated_by is Termination.STEP_LIMIT and len(sl.points) == 4001
    assert np.max(np.abs(sl.points[:, 0] * sl.points[:, 1] - 1)) < 1e-6


def test_streamline_radial_ray():
    sl = integrate_streamline(_vel(state(1, 0, 0)), (1, 0), 0.05, 10_000, GridSpec(-3, 3, -3, 3))
    assert sl.terminated_by is Termination.LEFT_BOUNDS
    assert np.all(sl.points[:, 1] == 0) and np.all(np.diff(sl.points[:, 0]) > 0)
    assert sl.points[-1, 0] > 3 - 0.05


def test_streamline_rounds_corner():
    sl = integrate_streamline(_vel(state(2, 0, 0)), (0.01, 3), 0.01, 5000, GridSpec(0, 4, 0, 4))
    assert sl.terminated_by is Termination.LEFT_BOUNDS
    pts = sl.points
    assert np.all(np.diff(pts[:, 1]) < 0) and np.all(np.diff(pts[:, 0]) > 0)
    assert pts[-1, 0] > 3.99 and pts[-1, 1] < 0.01
    assert np.min(np.hypot(*pts.T)) < 0.3  # passes close to the stagnation point


def test_streamline_spacing_is_step():
    w = state(2, 1, 1)
    sl = integrate_streamline(_vel(w), (0.5, 2), 0.02, 500, GridSpec(0.01, 5, 0.01, 5))
    gaps = np.hypot(*np.diff(sl.points, axis=0).T)
    assert np.all(gaps <= 0.02 * (1 + 1e-9))


def test_streamline_converging_hits_node():
    sl = integrate_streamline(_vel(state(4, 0, 0)), (2, 2), 0.01, 10_000, GridSpec(-3, 3, -3, 3))
    assert sl.terminated_by is Termination.NODAL_REGION
    assert np.hypot(*sl.points[-1]) < 0.05


def test_streamline_errors():
    bounds = GridSpec(-2, 2, -2, 2)
    with pytest.raises(NodalRegion):
        integrate_streamline(_vel(state(2, 1, 1)), (0, 1), 0.01, 10, bounds)
    with pytest.raises(ValueError):
        integrate_streamline(_vel(state(2, 0, 0)), (3, 1), 0.01, 10, bounds)


def test_rk4_order_against_reference():
    """Endpoint error falls ~16x per step halving on the hyperbola family."""
    p = PhysParams(gamma=0.8)
    vel = _vel(state(2, 0, 0, p), p)

    def rhs(_, z):
        v = np.asarray(vel(z[0], z[1]))
        return v / np.hypot(*v)

    seed, length = (0.4, 1.5), 4.0
    ref = solve_ivp(rhs, (0, length), seed, method="DOP853", rtol=1e-13, atol=1e-14).y[:, -1]
    errs = []
    for h in (0.2, 0.1, 0.05):
        sl = integrate_streamline(vel, seed, h, round(length / h), GridSpec(0, 20, 0, 20))
        errs.append(np.hypot(*(sl.points[-1] - ref)))
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(orders >= 3.8), orders
