"""Convex-roof square-root threetangle of rank-2 states from a tilted-field XY chain."""
from .bloch import BlochPoint, ChordSolution
from .ghz import GhzSymCoords, lower_bound, twirl
from .polytope import (IdenticallyZero, InsidePolytope, PolytopeClass, ZeroPolytope, ZeroState,
                       axis_span, build_polytope, classify, solve_zero_states, visible_facets)
from .roof import (CoverageGap, Decomposition, RoofProfile, compute_profile,
                   random_decomposition_bound, roof_value)
from .spin_model import (ModelParams, PureStateVec, RankError, RankTwoMixture, build_hamiltonian,
                         ground_state, model_mixture, parity_commutator_norm, reduce_to_three_sites)
from .threetangle import TangleQuartic, ZeroStateError, sqrt_tau3, tangle_quartic, tau3, tau3_at_bloch

__version__ = "0.1.0"
