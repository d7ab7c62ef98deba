import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from parabolic_barrier import (Branch, FlowClass, NodalRegion, OriginSingular, PhysParams,
                               RepresentationMismatch, StateLabel, apply_lz, build_state,
                               classify_flow, conjugate_state, degeneracy, energy,
                               lz_eigencheck, scale_factors, schrodinger_residual, superpose,
                               time_factor, to_hyperbolic, to_polar)
from parabolic_barrier.eigenstates import hamiltonian_apply

from conftest import NATURAL, state

P, M = Branch.PLUS, Branch.MINUS
L = StateLabel


def test_params_consistency(params):
    assert abs(params.beta**2 * params.hbar / params.mass - params.gamma) < 1e-12


@pytest.mark.parametrize("bad", [dict(hbar=0), dict(mass=-1), dict(gamma=float("nan"))])
def test_params_rejects(bad):
    with pytest.raises(ValueError):
        PhysParams(**bad)


@pytest.mark.parametrize("label, v0, want", [
    (L(P, P, 1, 0), 0, -2j),
    (L(P, M, 3, 3), 5, 5),
    (L(M, M, 0, 0), 0, 1j),
])
def test_energy_examples(label, v0, want):
    assert energy(label, PhysParams(v0=v0)) == want


def test_energy_types(params):
    hg = params.hbar * params.gamma
    for nx in range(5):
        for ny in range(5):
            assert energy(L(P, P, nx, ny), params) == complex(params.v0, -(nx + ny + 1) * hg)
            assert energy(L(P, M, nx, ny), params) == complex(params.v0, -(nx - ny) * hg)
            assert energy(L(M, P, nx, ny), params) == complex(params.v0, (nx - ny) * hg)
            assert energy(L(M, M, nx, ny), params) == complex(params.v0, (nx + ny + 1) * hg)


def test_type_numbers():
    assert [StateLabel.from_type(t, 0, 0).type for t in (1, 2, 3, 4)] == [1, 2, 3, 4]
    assert (StateLabel.from_type(2, 0, 0).bx, StateLabel.from_type(2, 0, 0).by) == (P, M)
    with pytest.raises(ValueError):
        StateLabel.from_type(5, 0, 0)


def test_build_state_examples():
    w = build_state(L(P, M, 0, 0), NATURAL)
    assert w.poly.tolist() == [[1]] and (w.sx, w.sy) == (1, -1)
    assert np.isclose(w(1.3, 0.4), np.exp(0.5j * (1.3**2 - 0.4**2)))
    assert np.isclose(build_state(L(P, M, 1, 1), NATURAL)(1, 1), 4)
    assert np.isclose(build_state(L(P, P, 2, 0), NATURAL)(1, 0), (4 - 2j) * np.exp(0.5j))


@pytest.mark.parametrize("s", [1, -1])
def test_closed_form_states(s, rng):
    """Hand-expanded eigenfunctions for n <= 2, both sign choices, β ≠ 1."""
    p = PhysParams(mass=2.0, gamma=1.3)
    b = p.beta
    x, y = rng.uniform(-2, 2, (2, 30))
    B = P if s == 1 else M
    ph = np.exp(s * 0.5j * b**2 * (x**2 + y**2))
    want = {
        (0, 0): ph,
        (1, 0): 2 * b * x * ph,
        (0, 1): 2 * b * y * ph,
        (2, 0): (4 * b**2 * x**2 - s * 2j) * ph,
        (1, 1): 4 * b**2 * x * y * ph,
        (0, 2): (4 * b**2 * y**2 - s * 2j) * ph,
    }
    for (nx, ny), w in want.items():
        assert np.allclose(build_state(L(B, B, nx, ny), p)(x, y), w, rtol=1e-13)
    # stationary corner states, Cartesian and hyperbolic forms
    u, v = to_hyperbolic(x, y)
    ph = np.exp(s * 0.5j * b**2 * (x**2 - y**2))
    stat = {
        0: (ph, np.exp(s * 0.5j * b**2 * u)),
        1: (4 * b**2 * x * y * ph, 2 * b**2 * v * np.exp(s * 0.5j * b**2 * u)),
        2: (4 * (4 * b**4 * x**2 * y**2 + 1 + s * 2j * b**2 * (x**2 - y**2)) * ph,
            4 * (b**4 * v**2 + 1 + s * 2j * b**2 * u) * np.exp(s * 0.5j * b**2 * u)),
    }
    for n, (cart, hyp) in stat.items():
        got = build_state(L(B, B.conj(), n, n), p)(x, y)
        assert np.allclose(got, cart, rtol=1e-12)
        assert np.allclose(got, hyp, rtol=1e-12)


def test_conjugate_state(rng):
    assert conjugate_state(L(P, P, 3, 1)) == L(M, M, 3, 1)
    assert conjugate_state(L(P, M, 2, 1)) == L(M, P, 2, 1)
    x, y = rng.uniform(-3, 3, (2, 100))
    for t in (1, 2, 3, 4):
        for nx, ny in [(0, 0), (2, 3), (5, 1)]:
            lab = StateLabel.from_type(t, nx, ny)
            assert conjugate_state(lab) != lab
            a = build_state(conjugate_state(lab), NATURAL)(x, y)
            b = np.conj(build_state(lab, NATURAL)(x, y))
            assert np.all(np.abs(a - b) <= 1e-12 * np.maximum(1, np.abs(b)))


def test_time_factor():
    assert abs(abs(time_factor(L(P, M, 4, 4), PhysParams(hbar=2, gamma=3), 7.0)) - 1) < 1e-15
    assert np.isclose(time_factor(L(P, P, 0, 0), NATURAL, 1.0), math.exp(-1))
    assert time_factor(L(M, P, 3, 1), NATURAL, 0.0) == 1
    # modulus e^{Im E t/ħ}
    p = PhysParams(hbar=2, gamma=0.7, v0=1.1)
    lab = L(M, M, 1, 2)
    assert np.isclose(abs(time_factor(lab, p, -0.4)), math.exp(energy(lab, p).imag * -0.4 / 2))


@pytest.mark.parametrize("label, want", [
    (L(P, P, 3, 1), FlowClass.DIVERGING),
    (L(M, M, 0, 0), FlowClass.CONVERGING),
    (L(P, M, 2, 2), FlowClass.STATIONARY),
    (L(P, M, 2, 1), FlowClass.CORNER_Y_TO_X),
    (L(M, P, 0, 1), FlowClass.CORNER_X_TO_Y),
])
def test_classify_flow(label, want):
    assert classify_flow(label) is want


def test_stationary_iff_real_energy():
    for t in (1, 2, 3, 4):
        for nx in range(4):
            for ny in range(4):
                lab = StateLabel.from_type(t, nx, ny)
                E = energy(lab, NATURAL)
                assert E.real == 0.0
                assert (E.imag == 0) == (classify_flow(lab) is FlowClass.STATIONARY)


def test_degeneracy():
    assert degeneracy(1, 2) == 3
    assert degeneracy(4, 0) == 1
    assert math.isinf(degeneracy(2, 7)) and math.isinf(degeneracy(3))
    for n in range(11):
        assert degeneracy(1, n) == len([(a, n - a) for a in range(n + 1)])
    with pytest.raises(ValueError):
        degeneracy(1, -1)
    with pytest.raises(ValueError):
        degeneracy(0, 1)


@pytest.mark.parametrize("s", [1, -1])
def test_superpositions_polar(s, rng):
    B = P if s == 1 else M
    p = PhysParams(gamma=2.0)
    b = p.beta
    x, y = rng.uniform(-2, 2, (2, 50))
    r, phi = to_polar(x, y)
    ph = np.exp(s * 0.5j * b**2 * r**2)
    cases = [
        ([(1, L(B, B, 1, 0)), (1j, L(B, B, 0, 1))], 2 * b * r * ph * np.exp(1j * phi)),
        ([(1, L(B, B, 1, 0)), (-1j, L(B, B, 0, 1))], 2 * b * r * ph * np.exp(-1j * phi)),
        ([(1, L(B, B, 2, 0)), (2j, L(B, B, 1, 1)), (-1, L(B, B, 0, 2))],
         4 * b**2 * r**2 * ph * np.exp(2j * phi)),
        ([(1, L(B, B, 2, 0)), (1, L(B, B, 0, 2))], 4 * (b**2 * r**2 - s * 1j) * ph),
        ([(1, L(B, B, 2, 0)), (-2j, L(B, B, 1, 1)), (-1, L(B, B, 0, 2))],
         4 * b**2 * r**2 * ph * np.exp(-2j * phi)),
    ]
    for terms, want in cases:
        w = superpose(terms, p)
        assert w.is_energy_eigenstate
        assert np.allclose(w(x, y), want, rtol=1e-12)


def test_superpose_identity_and_errors():
    lab = L(P, M, 2, 1)
    assert np.array_equal(superpose([(1, lab)], NATURAL).poly, build_state(lab, NATURAL).poly)
    with pytest.raises(RepresentationMismatch):
        superpose([(1, L(P, P, 0, 0)), (1, L(P, M, 0, 0))], NATURAL)
    with pytest.warns(UserWarning):
        w = superpose([(1, L(P, M, 1, 0)), (1, L(P, M, 0, 1))], NATURAL)
    assert not w.is_energy_eigenstate


def test_apply_lz_examples():
    p = PhysParams(hbar=1.7)
    w0 = build_state(L(P, P, 0, 0), p)
    assert abs(apply_lz(w0, p, 0.3, -1.2)) < 1e-14
    up = superpose([(1, L(P, P, 1, 0)), (1j, L(P, P, 0, 1))], p)
    assert np.isclose(apply_lz(up, p, 0.8, -0.6), p.hbar * up(0.8, -0.6))
    w2 = superpose([(1, L(P, P, 2, 0)), (2j, L(P, P, 1, 1)), (-1, L(P, P, 0, 2))], p)
    assert np.isclose(apply_lz(w2, p, 1, 0.5), 2 * p.hbar * w2(1, 0.5))


def test_lz_eigencheck(rng):
    x, y = rng.uniform(0.3, 2, (2, 40))
    down = superpose([(1, L(M, M, 1, 0)), (-1j, L(M, M, 0, 1))], NATURAL)
    est, dev = lz_eigencheck(down, NATURAL, x, y)
    assert abs(est + 1) < 1e-12 and dev < 1e-8
    mid = superpose([(1, L(P, P, 2, 0)), (1, L(P, P, 0, 2))], NATURAL)
    est, dev = lz_eigencheck(mid, NATURAL, x, y)
    assert abs(est) < 1e-12 and dev < 1e-8
    _, dev = lz_eigencheck(state(1, 1, 0), NATURAL, x, y)
    assert dev > 0.1
    with pytest.raises(NodalRegion):
        lz_eigencheck(state(1, 1, 0), NATURAL, [0.0, 1.0], [1.0, 1.0])


def test_stationary_hamiltonian_exact(params):
    from parabolic_barrier.eigenstates import hamiltonian
    for n in range(9):
        w = build_state(L(P, M, n, n), params)
        hw = hamiltonian(w, params).poly
        want = np.zeros_like(hw)
        want[: w.poly.shape[0], : w.poly.shape[1]] = params.v0 * w.poly
        assert np.array_equal(hw, want)


def test_schrodinger_residual(params, rng):
    x, y = rng.uniform(-3, 3, (2, 100))
    for t in (1, 2, 3, 4):
        for nx in range(9):
            for ny in range(9):
                lab = StateLabel.from_type(t, nx, ny)
                w = build_state(lab, params)
                res = schrodinger_residual(w, energy(lab, params), params, x, y)
                hw = hamiltonian_apply(w, params, x, y)
                assert np.all(np.abs(res) <= 1e-10 * (1 + np.abs(hw))), lab


def test_residual_energy_shift(rng):
    lab = L(M, P, 2, 3)
    w = build_state(lab, NATURAL)
    x, y = 0.7, -0.4
    res = schrodinger_residual(w, energy(lab, NATURAL) + 1, NATURAL, x, y)
    assert np.isclose(res, -w(x, y))
    sup = superpose([(1, L(P, P, 1, 0)), (1j, L(P, P, 0, 1))], NATURAL)
    xs, ys = rng.uniform(-3, 3, (2, 20))
    r = schrodinger_residual(sup, NATURAL.v0 - 2j * NATURAL.hbar * NATURAL.gamma, NATURAL, xs, ys)
    assert np.max(np.abs(r)) < 1e-10


def test_coordinates():
    assert to_hyperbolic(1, 1) == (0, 2)
    assert to_polar(1, 0) == (1, 0)
    u, v = to_hyperbolic(2, 1)
    assert (u, v) == (3, 4) and u**2 + v**2 == (2**2 + 1**2) ** 2
    assert to_polar(0, 0) == (0, 0)
    assert to_polar(-1, 0)[1] == math.pi
    assert np.allclose(scale_factors(0, 2), 2 * math.sqrt(2))  # (x, y) = (1, 1)
    assert np.allclose(scale_factors(0, 4), 4)
    assert scale_factors(1, 0) == (2, 2)
    assert np.allclose(scale_factors(3, 4), 2 * math.sqrt(5))
    with pytest.raises(OriginSingular):
        scale_factors(0, 0)


@given(x=st.floats(-5, 5), y=st.floats(-5, 5))
def test_coordinate_identities(x, y):
    if math.hypot(x, y) < 1e-3:
        return
    r, phi = to_polar(x, y)
    u, v = to_hyperbolic(x, y)
    assert math.isclose(u**2 + v**2, r**4, rel_tol=1e-12)
    assert math.isclose(scale_factors(u, v)[0], 2 * r, rel_tol=1e-12)
    assert -math.pi < phi <= math.pi
    assert math.isclose(r * math.cos(phi), x, abs_tol=1e-12)
    assert math.isclose(r * math.sin(phi), y, abs_tol=1e-12)


def test_wavefunction_derivatives_match_fd(rng):
    with pytest.warns(UserWarning):
        w = superpose([(1, L(P, M, 2, 1)), (0.3j, L(P, M, 0, 3))], PhysParams(mass=1.4))
    x, y = rng.uniform(-2, 2, (2, 10))
    h = 1e-6
    assert np.allclose(w.dx()(x, y), (w(x + h, y) - w(x - h, y)) / (2 * h), rtol=1e-6, atol=1e-6)
    assert np.allclose(w.dy()(x, y), (w(x, y + h) - w(x, y - h)) / (2 * h), rtol=1e-6, atol=1e-6)
