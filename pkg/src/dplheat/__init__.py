"""Dual-phase-lag heat conduction on a truncated half line.

The package solves

    T_t + a T_tt = K (T_xx + b T_txx) + f,    x > 0, t > 0,

with lag parameters a, b >= 0 and initial/boundary data supported on a
bounded interval.  The half line is cut at x_r and closed either with a
high-order local absorbing boundary condition (a rational approximation of
the exact impedance, realized through auxiliary boundary unknowns) or with a
plain Dirichlet wall on a much longer domain for reference runs.  Time
stepping is Crank-Nicolson on the first-order system in (T, T_t); everything
is second order in h and dt.

Typical use::

    from dplheat import (builtin_problem, default_z0, PadeAbc, Grid,
                         homogenize, run, recover)

    p = builtin_problem("example1")
    pade = PadeAbc.make(5, default_z0(p.a, p.b))
    hp = homogenize(p, pade)
    grid = Grid.from_steps(p.x_r, p.D, 1 / 64, 1 / 64)
    state, snaps = run(hp, grid, pade, snapshot_times=[p.D])
    T = recover(snaps[p.D], p.phi, p.D)

The command line entry point ``dplheat`` wraps the same machinery; see the
README for the JSON configuration schema.
"""

from ._backend import available_backends, backend_name, get_backend
from .errors import (
    GridAlignmentError,
    NonFiniteError,
    NumericalError,
    PadePoleError,
    ProblemValidationError,
    ValidationError,
    ValidationWarning,
    ZeroPivotError,
)
from .grid import Grid, TridiagonalSystem, delta_x2, discrete_norms, thomas_solve
from .pade import PadeAbc, default_z0, pade_coefficients, pade_sqrt
from .problems import (
    DplProblem,
    HomogenizedProblem,
    builtin_problem,
    homogenize,
    problem_names,
    recover,
    validate_problem,
)
from .stepping import (
    AbcStepCoefficients,
    DirichletStepCoefficients,
    SolverState,
    advance,
    advance_dirichlet,
    eliminate_aux,
    init_state,
    run,
)
from .verification import (
    ConvergenceReport,
    StabilityAudit,
    TruncationComparison,
    convergence_study,
    dense_oracle_step,
    domain_truncation_compare,
    scheme_residuals,
    solve_trajectory,
    stability_audit,
)

__version__ = "0.1.0"

__all__ = [
    "AbcStepCoefficients",
    "ConvergenceReport",
    "DirichletStepCoefficients",
    "DplProblem",
    "Grid",
    "GridAlignmentError",
    "HomogenizedProblem",
    "NonFiniteError",
    "NumericalError",
    "PadeAbc",
    "PadePoleError",
    "ProblemValidationError",
    "SolverState",
    "StabilityAudit",
    "TridiagonalSystem",
    "TruncationComparison",
    "ValidationError",
    "ValidationWarning",
    "ZeroPivotError",
    "advance",
    "advance_dirichlet",
    "available_backends",
    "backend_name",
    "builtin_problem",
    "convergence_study",
    "default_z0",
    "delta_x2",
    "dense_oracle_step",
    "discrete_norms",
    "domain_truncation_compare",
    "eliminate_aux",
    "get_backend",
    "homogenize",
    "init_state",
    "pade_coefficients",
    "pade_sqrt",
    "problem_names",
    "recover",
    "run",
    "scheme_residuals",
    "solve_trajectory",
    "stability_audit",
    "thomas_solve",
    "validate_problem",
]
