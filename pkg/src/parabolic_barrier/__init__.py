"""Generalized eigenstates and probability-flow hydrodynamics of the
two-dimensional parabolic potential barrier V = V₀ - mγ²(x² + y²)/2."""

__version__ = "0.1.0"

from .errors import (NodalRegion, NoMonomialFit, NotIrrotational, NotSolenoidal,  # noqa: E402
                     OriginSingular, PPBError, RepresentationMismatch)
from .hermite import Branch, ComplexPoly1D, eval_poly, hermite_pm, ode_residual, poly_derivative  # noqa: E402
from .eigenstates import (FlowClass, PhysParams, StateLabel, Wavefunction, apply_lz,  # noqa: E402
                          build_state, classify_flow, conjugate_state, degeneracy, energy,
                          lz_eigencheck, scale_factors, schrodinger_residual, superpose,
                          time_factor, to_hyperbolic, to_polar)
from .hydrodynamics import (CornerPotential, FlowSample, PotentialPair, complex_velocity,  # noqa: E402
                            current, current_hyperbolic, density, divergence, extract_potentials,
                            fit_corner_potential, flow_sample, potentials_from_velocity,
                            stationary_current_closed_form,
                            velocity, vorticity)
from .numgrid import (GridSpec, Streamline, Termination, fd_curl, fd_divergence,  # noqa: E402
                      fd_gradient, integrate_streamline, sample_grid)
