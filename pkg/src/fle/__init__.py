"""Weighted fractional Lane-Emden systems on model domains.

Library for positive solutions of

    L u = v^p / |x|^alpha,   L v = u^q / |x|^beta,   u = v = 0 outside,

where L is either the spectral fractional Dirichlet Laplacian or the
restricted fractional Laplacian, on (-1, 1) and (-1, 1)^2.  Ships the
exponent admissibility algebra, graded quadrature, Galerkin solver,
operator comparison diagnostics and a Lebesgue-exponent bootstrap, plus
the ``fle`` command line tool.
"""

__version__ = "0.1.0"

from .domain import Domain
from .exponents import (
    AdmissibilityReport,
    ExponentPair,
    ProblemParams,
    TInterval,
    admissible_t_interval,
    asymptotes,
    check_problem,
    critical_q_of_p,
    default_t,
    hyperbole_gap,
    is_superlinear,
    pq1_intersection,
    pq_one_intersection_roots,
)
from .quadrature import QuadratureRule, build_graded_rule, integrate_weighted
from .basis import EigenBasis, Field, build_sine_basis, evaluate_field, project, zero_field
from .operators import (
    DiscreteOperator,
    DominationReport,
    EigenvalueComparison,
    assemble_restricted,
    build_spectral_operator,
    compare_first_eigenvalue,
    normalization_constant,
    pointwise_domination_check,
)
from .energy import (
    EnergyReport,
    SolutionPair,
    eplus_eminus_decompose,
    lagrangian,
    theta_norm,
    weak_residual,
)
from .solver import (
    GridPair,
    SolveResult,
    SolverConfig,
    SweepReport,
    default_fine_grid,
    evaluate_pair,
    resolve_t,
    solve_positive,
    sweep_to_critical,
)
from .bootstrap import (
    BootstrapChain,
    ChainInputs,
    HolderReport,
    StepRecord,
    chain_step,
    coefficient_exponent_ranges,
    holder_trigger,
    run_chain,
    weighted_norm_diagnostic,
)

__all__ = [
    "__version__",
    "Domain",
    "ProblemParams",
    "ExponentPair",
    "TInterval",
    "AdmissibilityReport",
    "hyperbole_gap",
    "asymptotes",
    "critical_q_of_p",
    "pq1_intersection",
    "pq_one_intersection_roots",
    "is_superlinear",
    "admissible_t_interval",
    "default_t",
    "check_problem",
    "QuadratureRule",
    "build_graded_rule",
    "integrate_weighted",
    "EigenBasis",
    "Field",
    "build_sine_basis",
    "evaluate_field",
    "project",
    "zero_field",
    "DiscreteOperator",
    "EigenvalueComparison",
    "DominationReport",
    "assemble_restricted",
    "build_spectral_operator",
    "compare_first_eigenvalue",
    "normalization_constant",
    "pointwise_domination_check",
    "EnergyReport",
    "SolutionPair",
    "lagrangian",
    "theta_norm",
    "weak_residual",
    "eplus_eminus_decompose",
    "SolverConfig",
    "GridPair",
    "SolveResult",
    "SweepReport",
    "default_fine_grid",
    "evaluate_pair",
    "resolve_t",
    "solve_positive",
    "sweep_to_critical",
    "BootstrapChain",
    "ChainInputs",
    "StepRecord",
    "HolderReport",
    "chain_step",
    "coefficient_exponent_ranges",
    "holder_trigger",
    "run_chain",
    "weighted_norm_diagnostic",
]
