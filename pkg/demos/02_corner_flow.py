"""
Flow round a right angle
========================

The mixed-branch states (+,-,n,n) have real energy. Their probability
current is time independent and, for n = 0 and 1, it is an ideal fluid flow
with complex potential W = ±γ z² / 2.
"""
# %%
import numpy as np

from parabolic_barrier import (GridSpec, PhysParams, StateLabel, build_state, complex_velocity,
                               extract_potentials, fit_corner_potential, integrate_streamline,
                               to_hyperbolic, velocity)

p = PhysParams(gamma=0.8)
w = build_state(StateLabel.from_type(2, 1, 1), p)

# %%
# Along the diagonal the velocity is γ(x, -y): in along y, out along x.
for q in (0.5, 1.0, 1.5):
    print(q, velocity(w, p, q, q))

# %%
# Φ and Ψ come from line integrals of v; in hyperbolic coordinates they are
# just γu/2 and γv/2.
region = GridSpec(0.5, 2, 0.5, 2, 11, 11)
pp = extract_potentials(w, p, region)
u, v = to_hyperbolic(pp.x, pp.y)
print("Φ - γu/2 spread:", np.ptp(pp.phi - p.gamma * u / 2))
print("Ψ - γv/2 spread:", np.ptp(pp.psi - p.gamma * v / 2))

# %%
# Fitting W = A z^a picks a = 2, the right-angle corner.
cp = fit_corner_potential(pp)
print(f"A = {cp.A:.12f}, a = {cp.a}, residual {cp.residual:.1e}")
z = 1.2 + 0.7j
vx, vy = velocity(w, p, z.real, z.imag)
print("dW/dz:", complex_velocity(cp, z), " vx - i vy:", vx - 1j * vy)

# %%
# Streamlines are the hyperbolas xy = const.
bounds = GridSpec(0.05, 4, 0.05, 4)
for seed in [(0.3, 3.0), (1.0, 2.0), (2.0, 2.0)]:
    sl = integrate_streamline(lambda a, b: velocity(w, p, a, b), seed, 0.01, 2000, bounds)
    xy = sl.points[:, 0] * sl.points[:, 1]
    print(seed, sl.terminated_by.value, f"xy drift {np.max(np.abs(xy - xy[0])):.1e}",
          "end", np.round(sl.points[-1], 3))
