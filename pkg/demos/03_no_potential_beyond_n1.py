"""
When the flow stops being ideal
===============================

Velocity fields of separable eigenstates are always curl free. They are not
always divergence free, and without that there is no stream function. This
script shows the two ways that happens.
"""
# %%
import numpy as np

from parabolic_barrier import (GridSpec, NotSolenoidal, PhysParams, StateLabel, build_state,
                               divergence, extract_potentials, vorticity)

p = PhysParams()
X, Y = np.meshgrid(np.linspace(0.3, 2, 6), np.linspace(0.3, 2, 6))

# %%
# Diverging and converging states: a source or sink of constant strength 2γ.
for t in (1, 4):
    w = build_state(StateLabel.from_type(t, 0, 0), p)
    print(f"type {t}: div v in [{divergence(w, p, X, Y).min():.3f}, "
          f"{divergence(w, p, X, Y).max():.3f}]")

# %%
# Stationary n = 2: still curl free but the divergence no longer vanishes.
w = build_state(StateLabel.from_type(2, 2, 2), p)
print("max |curl v|:", np.max(np.abs(vorticity(w, p, X, Y))))
print("div v on the diagonal:", np.round(divergence(w, p, X.diagonal(), Y.diagonal()), 12))
print("max |div v|:", np.max(np.abs(divergence(w, p, X, Y))))

# %%
# The extraction refuses rather than returning a meaningless Ψ.
try:
    extract_potentials(w, p, GridSpec(0.5, 2, 0.5, 2))
except NotSolenoidal as exc:
    print("NotSolenoidal:", exc, "violation/γ =", exc.violation / p.gamma)
