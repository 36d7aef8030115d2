"""Numerical solver and verification suite for join-type harmonic sphere maps.

The reduced problem is a singular two-point BVP for the angle profile of a
Hopf-construction map built from a bi-eigenmap with eigenvalues (lambda, mu).
Two independent pipelines solve it: variational gluing of one-sided energy
minimizers (driving the derivative jump at the junction to zero) and
two-sided shooting from the indicial asymptotics.  The analysis layer turns
the small-junction asymptotics into finite trend checks, and the hopf module
supplies the eigenmap algebra needed to assemble actual sphere maps from the
computed profiles.
"""

from .core import (
    BlowUpError,
    ConstraintViolation,
    ConvergenceError,
    DomainError,
    Grid,
    HopfParams,
    OutsideProvenRegimeWarning,
    Profile,
    graded_grid,
    indicial_exponents,
)
from .ode import (
    coeff_Q,
    comparison_residual,
    flux_residual,
    limit_residual,
    read_profile_csv,
    rescaled_residual,
    residual,
    weight_f,
    write_profile_csv,
)
from .closed_forms import (
    blowup_constant,
    blowup_constant_exact,
    identity_solution,
    phi_limit,
    psi_comparison,
    psi_derivative_identity,
    theta_threshold,
)
from .variational import (
    DiscreteEnergy,
    FunctionalSpec,
    GluedSolution,
    MinimizeResult,
    eval_functional,
    exterior_grid,
    glue,
    interior_grid,
    jump_via_integral,
    minimize_exterior,
    minimize_interior,
)
from .shooting import (
    MatchResult,
    ShootState,
    integrate_from_pi2,
    integrate_from_zero,
    match_shooting,
)
from .analysis import (
    ScanResult,
    SolvabilityCell,
    SolveOutcome,
    auto_comparison_config,
    blowup_compare,
    comparison_check,
    estimate_Is1_trend,
    estimate_Is2,
    find_solution,
    junction_asymptotics_check,
    scan_jump,
    solvability_map,
)
from .hopf import (
    BiEigenmap,
    OrthogonalMultiplication,
    SphereEigenmap,
    alpha_hopf_eval,
    complex_multiplication,
    eigenvalue_check,
    hopf_construction_eval,
    hopf_eigenmap,
    identity_eigenmap,
    multiplication_by_name,
    octonion_multiplication,
    orthmul_eval,
    quaternion_multiplication,
    restricted_multiplication,
)

__version__ = "0.1.0"
