"""Exactly solvable two-mode Bose-Einstein condensate model.

The solvable Hamiltonian is diagonalised by a two-mode displacement; this
package computes its distributions, entanglement and dynamics, first-order
corrections for coupling shifts and particle loss, and checks every closed
form against dense exact diagonalisation.
"""

from .dynamics import InitialState, TimeSeries, relative_population, relative_population_corrected
from .entangle import (EntropyResult, EntropySurface, degenerate_entropy_surface, entropy, entropy_clamped,
                       entropy_first_order, entropy_surface, loss_entropy_surface)
from .errors import (AmbiguousMinimum, Bec2ModelError, DegenerateState, InvalidBasis, InvalidDegree,
                     InvalidOperator, InvalidState, NegativeProbability, NotDegenerate, NotNormalOrdered,
                     PerturbationBreakdownWarning, ResourceLimit, UnsupportedParameters)
from .fock import FockLabel, MonomialOp, allowed_m, build_operator_matrix
from .loss import (LossSpec, accessible_totals, background_correction, enlarged_first_order,
                   generalized_distribution, loss_distribution, tbr_correction)
from .model import (CouplingSet, ModelParams, a1_for_m0, build_h0, build_h2, couplings_from_constraints,
                    energy, ground_state_m0)
from .perturb import (DegenerateSolution, FirstOrderCorrection, Kind, PerturbationKind, degenerate_distribution,
                      degenerate_solve, degenerate_solve_general, detect_degeneracies, first_order_coefficients,
                      matrix_element, perturbation_matrix, perturbed_distribution)
from .symbolic import (BosonPolynomial, Coef, conjugate_by_displacement, count_general_cumulative,
                       count_general_terms, count_n_model_terms, normal_order)
from .wigner import DistributionSeries, distribution, rotation_matrix, wigner_d, wigner_d_matrix

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
