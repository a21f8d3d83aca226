"""Radial Schrodinger-Poisson solutions with an external attractive potential."""

from .energy import Functional, f_energy, h1_norm, j_energy, j_gradient, ray_decomposition
from .grid import (RadialFunction, RadialGrid, annulus_bump, dirichlet_energy, inner,
                   integrate, kinetic_form, lp_norm, make_grid, scale_function)
from .poisson import dirichlet_form, lemma2_ratio, self_consistent_phi, solve_poisson
from .potentials import (Potential, check_hypotheses, coulomb, make_potential, power_law,
                         tabulated, yukawa, zero_potential)
from .solver import (SolveOptions, SubspaceError, build_lemma10_subspace,
                     estimate_minimax_level, minimize, multiplicity_pipeline)

__version__ = "0.1.0"
