"""Stability and bifurcation toolkit for slip-driven annulus flow.

Computes the critical viscosity of 2D incompressible flow in an annulus
with a Navier-slip inner boundary and stress-free outer boundary, the
leading eigenmodes of the linearized problem, the center-manifold
reduction with its Lyapunov coefficient and bifurcated vortex states, and
cross-validates the reduction with a pseudo-spectral nonlinear simulator.
"""

__version__ = "1.0.0"

from .bifurcation import (
    BifurcationReport,
    Classification,
    EigenResult,
    ManifoldCoeffs,
    bifurcation_report,
    classify_and_build,
    interaction,
    leading_eigenpair,
    lyapunov_coeff,
    solve_G11,
)
from .critical import (
    CriticalResult,
    critical_result,
    det_condition,
    gamma_n,
    mu_c_closed,
    mu_c_oracle,
)
from .domain import (
    DomainParams,
    ModalField,
    PhysicalField,
    analyze_modal,
    synthesize_physical,
    theta_lattice,
    validate,
)
from .errors import (
    AnnuflowError,
    CFLViolation,
    DegenerateCoefficient,
    EigSolverFailure,
    GridMismatch,
    InvalidGeometry,
    InvalidPhysics,
    NoBracket,
    NoEscape,
    SingularSystem,
    SolverFailure,
    TooCoarse,
)
from .simulator import (
    Diagnostics,
    SimState,
    Simulator,
    escape_experiment,
    escape_slope,
    fit_growth_rate,
)
from .spectral import (
    BoundaryConditionSet,
    ModalOperator,
    RadialGrid,
    bilaplacian_n,
    build_grid,
    dirichlet_bcs,
    generalized_eig,
    inner_product,
    laplacian_n,
    navier_slip_bcs,
    radial_integral,
    solve_bvp,
)
from .sweep import (
    BoundaryResult,
    SweepRow,
    SweepSpec,
    boundary_bisect,
    evaluate_point,
    sweep_l,
    write_sweep_csv,
    write_sweep_manifest,
)
