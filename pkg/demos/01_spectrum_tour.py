"""
A tour of the barrier spectrum
==============================

The inverted oscillator V = V0 - m γ² (x² + y²) / 2 has no bound states, but it
does have polynomial×Gaussian-phase eigenfunctions with complex energies.
This script builds a few of them and looks at what the energies say.
"""
# %%
import numpy as np

from parabolic_barrier import (Branch, PhysParams, StateLabel, build_state, classify_flow,
                               degeneracy, energy, lz_eigencheck, superpose, time_factor)

p = PhysParams()  # ħ = m = γ = 1, V0 = 0
P, M = Branch.PLUS, Branch.MINUS

# %%
# Each axis picks a branch, so there are four families. The imaginary part
# of the energy decides whether the probability grows or decays in time.
for t in (1, 2, 3, 4):
    lab = StateLabel.from_type(t, 1, 0)
    print(f"type {t}  {lab}  E = {energy(lab, p)}  flow: {classify_flow(lab).value}")

# %%
# Types 1 and 4 have a finite number of states per level; types 2 and 3 mix
# the branches so every (n, n) pair has the same real energy.
print([degeneracy(1, n) for n in range(5)], degeneracy(2, 3))

# %%
# |exp(-iEt/ħ)| for a diverging state decays, while a stationary one keeps
# modulus 1 forever.
for lab in (StateLabel(P, P, 0, 0), StateLabel(P, M, 2, 2)):
    print(lab, [round(abs(time_factor(lab, p, t)), 4) for t in (0, 1, 2)])

# %%
# The degenerate n = 1 and n = 2 states combine into angular-momentum
# eigenstates r^|m| e^{imφ}.
rng = np.random.default_rng(0)
x, y = rng.uniform(0.3, 2, (2, 40))
combos = {
    "+1": [(1, StateLabel(P, P, 1, 0)), (1j, StateLabel(P, P, 0, 1))],
    "-1": [(1, StateLabel(P, P, 1, 0)), (-1j, StateLabel(P, P, 0, 1))],
    "+2": [(1, StateLabel(P, P, 2, 0)), (2j, StateLabel(P, P, 1, 1)),
           (-1, StateLabel(P, P, 0, 2))],
    " 0": [(1, StateLabel(P, P, 2, 0)), (1, StateLabel(P, P, 0, 2))],
}
for m, terms in combos.items():
    est, dev = lz_eigencheck(superpose(terms, p), p, x, y)
    print(f"m = {m}: <L> = {est.real:+.12f} ħ, spread {dev:.1e}")

# %%
# A single Cartesian state is not an L eigenstate, and the spread shows it.
print("(+,+,1,0) spread:", lz_eigencheck(build_state(StateLabel(P, P, 1, 0), p), p, x, y)[1])
