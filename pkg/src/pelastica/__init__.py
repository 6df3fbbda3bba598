"""p-elliptic integrals and functions, pinned planar p-elasticae, Li-Yau bounds and Theta-networks."""
from ._quadrature import DEFAULT_TOL, Tolerance
from .classify import ClassificationReport, FamilyEntry, PinnedProblem, classify, realize, regime
from .curves import (
    FlatCoreSpec,
    LeafTuple,
    SampledCurve,
    borderline,
    build_arc,
    build_figure_eight,
    build_flatcore,
    build_leafed,
    build_loop,
    circular,
    concat,
    leaf_pieces,
    leaf_tuple,
    linear,
    orbitlike,
    segment,
    wavelike,
)
from .energy import (
    EnergyReport,
    bending_quadrature,
    first_variation_residual,
    normalized_energy_flat,
    normalized_energy_wave,
    varpi_star,
)
from .errors import ConstraintError, ConvergenceError, DomainError, NoSolutionError, PElasticaError
from .liyau import OptimalityTable, check_curve, leafed_exists, liyau_bound, multiplicity, thresholding_table
from .moduli import Q, Q_tilde, SpecialExponent, p3, p_mn, phi_star, q_star, solve_arc_modulus, solve_loop_modulus
from .network import (
    MinimizationResult,
    MinimizerOptions,
    ThetaNetwork,
    build_test_network,
    degenerate_bound,
    fenchel_check,
    minimize_network,
    network_energy,
)
from .pelliptic import (
    PQPair,
    am1,
    am2,
    cn_p,
    complete_E1,
    complete_E2,
    complete_K1,
    complete_K2,
    dE1_dq,
    dK1_dq,
    dn_p,
    incomplete_E1,
    incomplete_E2,
    incomplete_F1,
    incomplete_F2,
    sech_p,
    sn_p,
    tanh_p,
)

__version__ = "0.1.0"

__all__ = [
    "am1",
    "am2",
    "bending_quadrature",
    "borderline",
    "build_arc",
    "build_figure_eight",
    "build_flatcore",
    "build_leafed",
    "build_loop",
    "build_test_network",
    "check_curve",
    "circular",
    "ClassificationReport",
    "classify",
    "cn_p",
    "complete_E1",
    "complete_E2",
    "complete_K1",
    "complete_K2",
    "concat",
    "ConstraintError",
    "ConvergenceError",
    "dE1_dq",
    "DEFAULT_TOL",
    "degenerate_bound",
    "dK1_dq",
    "dn_p",
    "DomainError",
    "EnergyReport",
    "FamilyEntry",
    "fenchel_check",
    "first_variation_residual",
    "FlatCoreSpec",
    "incomplete_E1",
    "incomplete_E2",
    "incomplete_F1",
    "incomplete_F2",
    "leaf_pieces",
    "leaf_tuple",
    "leafed_exists",
    "LeafTuple",
    "linear",
    "liyau_bound",
    "MinimizationResult",
    "minimize_network",
    "MinimizerOptions",
    "multiplicity",
    "network_energy",
    "normalized_energy_flat",
    "normalized_energy_wave",
    "NoSolutionError",
    "OptimalityTable",
    "orbitlike",
    "p3",
    "p_mn",
    "PElasticaError",
    "phi_star",
    "PinnedProblem",
    "PQPair",
    "Q",
    "q_star",
    "Q_tilde",
    "realize",
    "regime",
    "SampledCurve",
    "sech_p",
    "segment",
    "sn_p",
    "solve_arc_modulus",
    "solve_loop_modulus",
    "SpecialExponent",
    "tanh_p",
    "ThetaNetwork",
    "thresholding_table",
    "Tolerance",
    "varpi_star",
    "wavelike",
]
