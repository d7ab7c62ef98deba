"""End-to-end verification checks.

Each ``check_*`` function returns a :class:`CheckResult`; :func:`run_all`
runs the whole battery for one parameter set. Analytic results are compared
with independent routes wherever one exists: explicit energy formulas, the
1D ODE instead of the recurrence, finite differences instead of exact
derivatives, and scipy's adaptive integrator instead of the fixed-step RK4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import eigenstates as es
from . import hermite as hp
from . import hydrodynamics as hd
from . import numgrid as ng
from .errors import NotSolenoidal, PPBError
from .hermite import Branch

P, M = Branch.PLUS, Branch.MINUS


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _labels(n_max, types=(1, 2, 3, 4)):
    for t in types:
        for nx in range(n_max + 1):
            for ny in range(n_max + 1):
                yield es.StateLabel.from_type(t, nx, ny)


def offnode_points(w, n, rng, lo=-3.0, hi=3.0, margin=(), rel=es.NODE_REL):
    """``n`` uniform random points in [lo, hi]² off the nodal set.

    A point qualifies when |ψ|² exceeds ``rel`` times the reference density at
    the point and at the ±m stencil neighbours for every step m in ``margin``.
    """
    out_x, out_y = [], []
    eps = rel * w.ref_density
    offsets = [(0.0, 0.0)]
    for m in np.atleast_1d(margin):
        offsets += [(m, 0.0), (-m, 0.0), (0.0, m), (0.0, -m)]
    while sum(len(a) for a in out_x) < n:
        x, y = rng.uniform(lo, hi, (2, 4 * n))
        ok = np.ones(x.shape, dtype=bool)
        for dx, dy in offsets:
            ok &= np.abs(w(x + dx, y + dy)) ** 2 > eps
        out_x.append(x[ok])
        out_y.append(y[ok])
    return np.concatenate(out_x)[:n], np.concatenate(out_y)[:n]


def _expected_energy(label, p):
    """Energy read straight off the four-type table."""
    v0, hg = p.v0, p.hbar * p.gamma
    nx, ny = label.nx, label.ny
    return {
        1: complex(v0, -(nx + ny + 1) * hg),
        2: complex(v0, -(nx - ny) * hg),
        3: complex(v0, (nx - ny) * hg),
        4: complex(v0, (nx + ny + 1) * hg),
    }[label.type]


# 1 -----------------------------------------------------------------------------

def check_spectrum(p, n_max=8, n_points=100, rng=None, tol=1e-10):
    rng = np.random.default_rng(0) if rng is None else rng
    x, y = rng.uniform(-3, 3, (2, n_points))
    worst, mism = 0.0, 0
    for lab in _labels(n_max):
        E = es.energy(lab, p)
        if E != _expected_energy(lab, p):
            mism += 1
        w = es.build_state(lab, p)
        res = es.schrodinger_residual(w, E, p, x, y)
        hw = es.hamiltonian_apply(w, p, x, y)
        worst = max(worst, float(np.max(np.abs(res) / (1 + np.abs(hw)))))
    ok = mism == 0 and worst <= tol
    return CheckResult("spectrum", ok,
                       f"{mism} energy mismatches; max relative residual {worst:.2e} (tol {tol:g})")


# 2 -----------------------------------------------------------------------------

def check_polynomials(n_max=16, tol=1e-10):
    want = {
        (0, P): [1], (1, P): [0, 2], (2, P): [-2j, 0, 4],
        (0, M): [1], (1, M): [0, 2], (2, M): [2j, 0, 4],
    }
    exact = all(np.array_equal(hp.hermite_pm(n, b).coeffs, np.array(c, complex))
                for (n, b), c in want.items())
    xi = np.linspace(-4, 4, 81)
    worst, degree_ok = 0.0, True
    for n in range(n_max + 1):
        for b in (P, M):
            h = hp.hermite_pm(n, b)
            degree_ok &= h.degree == n and h.coeffs[-1] == 2 ** n
            r = hp.ode_residual(n, b, xi)
            worst = max(worst, float(np.max(np.abs(r) / (1 + np.abs(h(xi))))))
    ok = exact and degree_ok and worst <= tol
    return CheckResult("polynomials", ok,
                       f"low-order prefactors exact={exact}; degrees ok={degree_ok}; "
                       f"max ODE residual {worst:.2e} (tol {tol:g})")


# 3 -----------------------------------------------------------------------------

def check_degeneracy(p, n_max=10):
    ok = True
    for t in (1, 4):
        for n in range(n_max + 1):
            pairs = [(a, n - a) for a in range(n + 1)]
            energies = {es.energy(es.StateLabel.from_type(t, a, b), p) for a, b in pairs}
            ok &= len(pairs) == es.degeneracy(t, n) and len(energies) == 1
    ok &= es.degeneracy(1, 2) == 3
    ok &= all(math.isinf(es.degeneracy(t, 5)) for t in (2, 3))
    return CheckResult("degeneracy", ok, f"types 1/4 give n+1 for n <= {n_max}; types 2/3 infinite")


# 4 -----------------------------------------------------------------------------

def lz_superpositions(branch):
    """The angular-momentum combinations of the n = 1 and n = 2 levels, with their ħ multiples."""
    L = lambda a, b: es.StateLabel(branch, branch, a, b)  # noqa: E731
    return [
        ([(1, L(1, 0)), (1j, L(0, 1))], 1),
        ([(1, L(1, 0)), (-1j, L(0, 1))], -1),
        ([(1, L(2, 0)), (2j, L(1, 1)), (-1, L(0, 2))], 2),
        ([(1, L(2, 0)), (1, L(0, 2))], 0),
        ([(1, L(2, 0)), (-2j, L(1, 1)), (-1, L(0, 2))], -2),
    ]


def check_angular_momentum(p, n_points=40, rng=None, tol=1e-8):
    rng = np.random.default_rng(1) if rng is None else rng
    worst_est, worst_dev = 0.0, 0.0
    for b in (P, M):
        for terms, m in lz_superpositions(b):
            w = es.superpose(terms, p)
            x, y = offnode_points(w, n_points, rng, margin=1e-3)
            est, dev = es.lz_eigencheck(w, p, x, y)
            worst_est = max(worst_est, abs(est - m * p.hbar) / p.hbar)
            worst_dev = max(worst_dev, dev / p.hbar)
    ok = worst_est < tol and worst_dev < tol
    return CheckResult("angular momentum", ok,
                       f"eigenvalue error {worst_est:.2e} hbar, deviation {worst_dev:.2e} hbar "
                       f"(tol {tol:g})")


# 5 -----------------------------------------------------------------------------

def check_irrotational(p, n_max=6, n_points=200, rng=None, tol=1e-8, fd_tol=1e-6, h=1e-4):
    rng = np.random.default_rng(2) if rng is None else rng
    g = p.gamma
    worst_a, worst_fd = 0.0, 0.0
    for lab in _labels(n_max):
        w = es.build_state(lab, p)
        x, y = offnode_points(w, n_points, rng, margin=h)
        eps = es.node_threshold(w)
        worst_a = max(worst_a, float(np.max(np.abs(hd.vorticity(w, p, x, y, eps)))) / g)
        V = lambda a, b: hd.velocity(w, p, a, b, eps)  # noqa: E731
        worst_fd = max(worst_fd, float(np.max(np.abs(ng.fd_curl(V, x, y, h)))) / g)
    ok = worst_a <= tol and worst_fd <= fd_tol
    return CheckResult("irrotationality", ok,
                       f"analytic max |vort| {worst_a:.2e} gamma (tol {tol:g}); "
                       f"FD max |vort| {worst_fd:.2e} gamma (tol {fd_tol:g})")


# 6 -----------------------------------------------------------------------------

def check_solenoidal(p, tol=1e-8, div_tol=1e-6, n2_min=1e-3):
    g = p.gamma
    grid = ng.GridSpec(-2.0, 2.0, -2.0, 2.0, 21, 21)
    X, Y = grid.mesh()
    worst_zero = 0.0
    for b in (P, M):
        for n in (0, 1):
            w = es.build_state(es.StateLabel(b, b.conj(), n, n), p)
            s = ng.sample_grid(lambda a, c: hd.divergence(w, p, a, c), grid)
            worst_zero = max(worst_zero, float(np.nanmax(np.abs(s.values))) / g)
    worst_pp = 0.0
    for b in (P, M):
        w = es.build_state(es.StateLabel(b, b, 0, 0), p)
        d = hd.divergence(w, p, X, Y)
        worst_pp = max(worst_pp, float(np.max(np.abs(d - 2 * b.sign * g))) / g)
    n2 = min(float(np.max(np.abs(hd.divergence(es.build_state(es.StateLabel(b, b.conj(), 2, 2), p),
                                                   p, X, Y)))) / g for b in (P, M))
    ok = worst_zero <= tol and worst_pp <= div_tol and n2 > n2_min
    return CheckResult("solenoidality", ok,
                       f"stationary n<=1 max |div| {worst_zero:.2e} gamma; (+-+-,0,0) "
                       f"div error {worst_pp:.2e} gamma; stationary n=2 max |div| {n2:.3g} gamma")


# 7 -----------------------------------------------------------------------------

def check_closed_form_currents(p, tol=1e-6):
    grid = ng.GridSpec(0.2, 2.0, 0.2, 2.0, 21, 21)
    X, Y = grid.mesh()
    U, V = es.to_hyperbolic(X, Y)
    worst = 0.0
    for b in (P, M):
        for n in (0, 1, 2):
            w = es.build_state(es.StateLabel(b, b.conj(), n, n), p)
            got = hd.current_hyperbolic(w, p, X, Y)
            ref = hd.stationary_current_closed_form(n, b, p, U, V)
            err = np.hypot(*(got - ref)) / np.hypot(*ref)
            worst = max(worst, float(np.max(err)))
    return CheckResult("closed-form currents", worst <= tol,
                       f"max relative difference {worst:.2e} (tol {tol:g})")


# 8 -----------------------------------------------------------------------------

def check_potentials(p, tol=1e-8):
    g = p.gamma
    region = ng.GridSpec(0.5 / p.beta, 2.0 / p.beta, 0.5 / p.beta, 2.0 / p.beta, 21, 21)
    worst_pot, worst_fit, worst_cv = 0.0, 0.0, 0.0
    msgs = []
    for b in (P, M):
        s = b.sign
        for n in (0, 1):
            w = es.build_state(es.StateLabel(b, b.conj(), n, n), p)
            try:
                pair = hd.extract_potentials(w, p, region)
                cp = hd.fit_corner_potential(pair)
            except PPBError as exc:
                msgs.append(f"({b},{b.conj()},{n},{n}) failed: {exc}")
                worst_pot = worst_fit = math.inf
                continue
            U, V = es.to_hyperbolic(pair.x, pair.y)
            dphi = pair.phi - s * g * U / 2
            dpsi = pair.psi - s * g * V / 2
            dev = max(np.ptp(dphi), np.ptp(dpsi)) / (g * np.max(np.abs(U)))
            worst_pot = max(worst_pot, float(dev))
            fit_err = abs(cp.A - s * g / 2) / g
            if cp.a != 2:
                fit_err = math.inf
            worst_fit = max(worst_fit, fit_err, cp.residual)
            vx, vy = hd.velocity(w, p, pair.x, pair.y)
            dw = hd.complex_velocity(cp, pair.x + 1j * pair.y)
            worst_cv = max(worst_cv, float(np.max(np.abs(vx - 1j * vy - dw))) / g)
    negatives = 0
    for lab in (es.StateLabel(P, P, 0, 0), es.StateLabel(M, M, 0, 0),
                es.StateLabel(P, M, 2, 2), es.StateLabel(M, P, 2, 2)):
        try:
            hd.extract_potentials(es.build_state(lab, p), p, region)
        except NotSolenoidal:
            negatives += 1
    ok = worst_pot <= tol and worst_fit < tol and worst_cv <= tol and negatives == 4
    detail = (f"Phi/Psi deviation {worst_pot:.2e}; fit error {worst_fit:.2e}; "
              f"dW/dz vs v {worst_cv:.2e} gamma; NotSolenoidal {negatives}/4")
    if msgs:
        detail += "; " + "; ".join(msgs)
    return CheckResult("potentials", ok, detail)


# 9 -----------------------------------------------------------------------------

def _unit_rhs(p, sign):
    def rhs(_, z):
        v = np.array([z[0], -z[1]]) * sign * p.gamma
        return v / np.hypot(*v)
    return rhs


def check_streamlines(p, arc=4.0, step=1e-3, tol=1e-6, min_order=4.0):
    bounds = ng.GridSpec(-20, 20, -20, 20)
    worst = 0.0
    seeds = {P: [(2.0, 0.5), (1.0, 0.1), (-1.5, 0.8)], M: [(0.5, 2.0), (0.4, -0.25), (3.0, 1.0)]}
    for b in (P, M):
        w = es.build_state(es.StateLabel(b, b.conj(), 0, 0), p)
        V = lambda a, c: hd.velocity(w, p, a, c)  # noqa: E731
        for sx, sy in seeds[b]:
            line = ng.integrate_streamline(V, (sx, sy), step, int(round(arc / step)), bounds)
            c = line.points[:, 0] * line.points[:, 1]
            worst = max(worst, float(np.max(np.abs(c - sx * sy))) / abs(sx * sy))
    # endpoint convergence against an adaptive high-order reference
    w = es.build_state(es.StateLabel(P, M, 0, 0), p)
    V = lambda a, c: hd.velocity(w, p, a, c)  # noqa: E731
    seed = (2.0, 0.5)
    ref = solve_ivp(_unit_rhs(p, 1), (0, arc), seed, method="DOP853",
                    rtol=1e-13, atol=1e-14).y[:, -1]
    errs = []
    for h in (0.2, 0.1, 0.05):
        line = ng.integrate_streamline(V, seed, h, int(round(arc / h)), bounds)
        errs.append(float(np.hypot(*(line.points[-1] - ref))))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    ok = worst <= tol and min(orders) >= min_order
    return CheckResult("streamlines", ok,
                       f"max relative xy drift {worst:.2e} (tol {tol:g}); endpoint orders "
                       + ", ".join(f"{o:.2f}" for o in orders) + f" (min {min_order:g})")


# 10 ----------------------------------------------------------------------------

def check_conjugation_parity(p, n_max=8, n_poly=16, n_points=100, rng=None, tol=1e-12):
    rng = np.random.default_rng(3) if rng is None else rng
    x, y = rng.uniform(-3, 3, (2, n_points))
    worst = 0.0
    for lab in _labels(n_max):
        a = es.build_state(es.conjugate_state(lab), p)(x, y)
        b = np.conj(es.build_state(lab, p)(x, y))
        worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(1, np.abs(b)))))
    xi = np.linspace(-4, 4, 81)
    parity = all(
        np.allclose(hp.hermite_pm(n, b)(-xi), (-1) ** n * hp.hermite_pm(n, b)(xi), rtol=1e-14, atol=0)
        and hp.hermite_pm(n, P).conj() == hp.hermite_pm(n, M)
        for n in range(n_poly + 1) for b in (P, M))
    ok = worst <= tol and parity
    return CheckResult("conjugation and parity", ok,
                       f"max conjugation error {worst:.2e} (tol {tol:g}); parity ok={parity}")


# 11 ----------------------------------------------------------------------------

def fd_orders(w, p, x, y, h, floor):
    """Observed convergence orders of FD divergence and curl against the analytic values."""
    eps = es.node_threshold(w)
    V = lambda a, b: hd.velocity(w, p, a, b, eps)  # noqa: E731
    div_a = hd.divergence(w, p, x, y, eps)
    vort_a = hd.vorticity(w, p, x, y, eps)
    out = []
    for fd, ref in ((ng.fd_divergence, div_a), (ng.fd_curl, vort_a)):
        e1 = float(np.max(np.abs(fd(V, x, y, h) - ref)))
        e2 = float(np.max(np.abs(fd(V, x, y, h / 2) - ref)))
        out.append(None if e1 <= floor else math.log2(e1 / max(e2, 1e-300)))
    return out


def check_oracle_orders(p, n_max=4, n_points=50, rng=None, h=2e-3, min_order=1.9):
    """FD vs analytic divergence/vorticity convergence order under step halving.

    Product states have vx = vx(x) and vy = vy(y), so their central-difference
    curl vanishes identically; the angular-momentum superpositions are added
    to give the vorticity comparison something to converge.
    """
    rng = np.random.default_rng(4) if rng is None else rng
    states = [es.build_state(lab, p) for lab in _labels(n_max)]
    for b in (P, M):
        states += [es.superpose(terms, p) for terms, _ in lz_superpositions(b)]
    orders = {"divergence": [], "vorticity": []}
    exact = 0
    for w in states:
        x, y = offnode_points(w, n_points, rng, lo=-2.5, hi=2.5, margin=(h, h / 2))
        for key, o in zip(orders, fd_orders(w, p, x, y, h, floor=1e-9 * p.gamma)):
            if o is None:
                exact += 1
            else:
                orders[key].append(o)
    lows = {k: (min(v) if v else float("nan")) for k, v in orders.items()}
    ok = all(v and min(v) >= min_order for v in orders.values())
    return CheckResult("FD oracle order", ok,
                       ", ".join(f"{k} min order {lows[k]:.3f} ({len(orders[k])} states)"
                                 for k in orders)
                       + f"; {exact} exact to rounding (min {min_order:g})")


def _guarded(name, fn, *args, **kw):
    """Run one check; an exception inside it counts as a failure, not a crash."""
    try:
        return fn(*args, **kw)
    except Exception as exc:  # noqa: BLE001
        return CheckResult(name, False, f"raised {type(exc).__name__}: {exc}")


def run_all(p: es.PhysParams, n_max=6, seed=42):
    """Run every check; ranges that scale with state size are capped by ``n_max``."""
    rng = np.random.default_rng(seed)
    plan = [
        ("spectrum", check_spectrum, dict(n_max=min(n_max, 8), rng=rng)),
        ("polynomials", lambda _p: check_polynomials(), {}),
        ("degeneracy", check_degeneracy, {}),
        ("angular momentum", check_angular_momentum, dict(rng=rng)),
        ("irrotationality", check_irrotational, dict(n_max=min(n_max, 6), rng=rng)),
        ("solenoidality", check_solenoidal, {}),
        ("closed-form currents", check_closed_form_currents, {}),
        ("potentials", check_potentials, {}),
        ("streamlines", check_streamlines, {}),
        ("conjugation and parity", check_conjugation_parity, dict(n_max=min(n_max, 8), rng=rng)),
        ("FD oracle order", check_oracle_orders, dict(n_max=min(n_max, 4), rng=rng)),
    ]
    return [_guarded(name, fn, p, **kw) for name, fn, kw in plan]
