"""Unambiguous discrimination of non-orthogonal pure states, with the
ancilla coherence it consumes measured by Wigner-Yanase skew information."""

from .coherence import (CoherenceReport, ProjectiveBasis, coherence_ci, coherence_lower_bound_check,
                        coherence_report, mean_coherence_ancilla, mean_coherence_li, skew_information)
from .config import DEFAULT_TOL, Tolerances
from .errors import InfeasibleError, InvalidInputError, UQSDError
from .optimize import (bound_saturation, cmean_profile, optimal_d2_analytic, optimal_d2_grid,
                       optimality_certificate, upper_bound)
from .protocol_coherence import (JointUnitary, ProtocolParams, build_unitary_d2,
                                 build_unitary_general, condition1_check, condition2_check,
                                 post_states, solve_alphas_d2, success_probability)
from .protocol_li import (LiProtocol, build_unitary_li, coherence_one_vs_rest, optimal_one_vs_rest,
                          optimal_symmetric)
from .simulate import SimulationSummary, confidence_interval, run_trials
from .states import Ensemble, gram, linear_independence, load_ensemble, random_ensemble

__version__ = "0.1.0"
