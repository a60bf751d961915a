"""Exception and warning types shared across the package.

Two error families matter to callers: ``ValidationError`` for bad inputs
(rejected before any time stepping happens) and ``NumericalError`` for
failures detected while computing.  The CLI maps them to exit codes 1 and 2.
"""


class ValidationError(ValueError):
    """Invalid configuration, problem data, or grid."""


class GridAlignmentError(ValidationError):
    """A required point (boundary, kink, snapshot time) misses the grid."""


class ProblemValidationError(ValidationError):
    """Problem data violates a compatibility or support requirement.

    Attributes
    ----------
    condition : str
        Which requirement failed, e.g. ``"support:f(x_r,.)"``.
    magnitude : float
        Observed magnitude of the violation.
    """

    def __init__(self, condition, magnitude, tol):
        self.condition = condition
        self.magnitude = magnitude
        self.tol = tol
        super().__init__(
            f"{condition} violated: magnitude {magnitude:.3e} exceeds tolerance {tol:.1e}"
        )


class PadePoleError(ValidationError):
    """The rational sqrt approximant was evaluated at one of its poles."""

    def __init__(self, n, z):
        self.n = n
        self.z = z
        super().__init__(f"approximant pole hit at term n={n} for z={z!r}")


class NumericalError(RuntimeError):
    """A computation failed (non-finite values, singular system, ...)."""


class ZeroPivotError(NumericalError):
    """Tridiagonal elimination hit a vanishing pivot."""

    def __init__(self, row, pivot):
        self.row = row
        self.pivot = pivot
        super().__init__(f"zero pivot {pivot:.3e} in row {row}")


class NonFiniteError(NumericalError):
    """The solution left the space of finite floating point numbers."""

    def __init__(self, step):
        self.step = step
        super().__init__(f"non-finite values detected at time step {step}")


class ValidationWarning(UserWarning):
    """Non-strict notice that problem data mildly violates a requirement."""
