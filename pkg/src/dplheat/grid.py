"""Uniform space-time grid, discrete operators, and the tridiagonal solver."""

from dataclasses import dataclass

import numpy as np

from .errors import GridAlignmentError, ValidationError, ZeroPivotError

_ALIGN_RTOL = 1e-9


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [0, x_r] x [0, D] with M_s space cells and M_t time steps."""

    x_r: float
    D: float
    M_s: int
    M_t: int

    def __post_init__(self):
        if not (np.isfinite(self.x_r) and self.x_r > 0):
            raise ValidationError(f"x_r must be positive and finite, got {self.x_r!r}")
        if not (np.isfinite(self.D) and self.D > 0):
            raise ValidationError(f"D must be positive and finite, got {self.D!r}")
        if self.M_s < 2:
            raise ValidationError(f"M_s must be >= 2, got {self.M_s}")
        if self.M_t < 1:
            raise ValidationError(f"M_t must be >= 1, got {self.M_t}")

    @property
    def h(self) -> float:
        return self.x_r / self.M_s

    @property
    def dt(self) -> float:
        return self.D / self.M_t

    def x_nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.x_r, self.M_s + 1)

    def t_nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.D, self.M_t + 1)

    @classmethod
    def from_steps(cls, x_r: float, D: float, h: float, dt: float) -> "Grid":
        """Build a grid from step sizes; h and dt must divide x_r and D."""
        M_s = _exact_divide(x_r, h, "x_r", "h")
        M_t = _exact_divide(D, dt, "D", "dt")
        return cls(x_r=x_r, D=D, M_s=M_s, M_t=M_t)

    def index_of_time(self, t: float) -> int:
        """Time-step index of t, which must sit on the grid."""
        k = round(t / self.dt)
        if k < 0 or k > self.M_t or abs(k * self.dt - t) > _ALIGN_RTOL * max(1.0, abs(t)):
            raise GridAlignmentError(f"time {t} is not a grid point (dt={self.dt})")
        return k

    def index_of_point(self, x: float) -> int:
        """Node index of x, which must sit on the grid."""
        i = round(x / self.h)
        if i < 0 or i > self.M_s or abs(i * self.h - x) > _ALIGN_RTOL * max(1.0, abs(x)):
            raise GridAlignmentError(f"point {x} is not a grid node (h={self.h})")
        return i


def _exact_divide(length, step, length_name, step_name):
    if step <= 0:
        raise ValidationError(f"{step_name} must be positive, got {step!r}")
    m = round(length / step)
    if m < 1 or abs(m * step - length) > _ALIGN_RTOL * length:
        raise ValidationError(
            f"{step_name}={step!r} does not divide {length_name}={length!r}"
        )
    return m


def delta_x2(v: np.ndarray, i: int, h: float) -> float:
    """Second central difference (v[i+1] - 2 v[i] + v[i-1]) / h^2.

    Defined on interior indices only; exact for quadratics.
    """
    if not 0 < i < len(v) - 1:
        raise ValidationError(f"delta_x2 needs an interior index, got i={i} of {len(v)}")
    return (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h**2


def discrete_norms(u: np.ndarray, h: float):
    """Return (l2, h1, inf) norms of a grid field u with u[0] = 0.

    l2 is the trapezoid-weighted L2 norm (half weights at both ends), h1 the
    forward-difference seminorm sqrt(h * sum(((u_i - u_{i-1})/h)^2)), and inf
    the max norm.  On domains of unit length or shorter, inf <= h1.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1 or len(u) < 2:
        raise ValidationError("discrete_norms expects a 1-d field with >= 2 nodes")
    if u[0] != 0.0:
        raise ValidationError(f"field must vanish at the left end, got u[0]={u[0]!r}")
    l2 = np.sqrt(h * np.sum(u[1:-1] ** 2) + 0.5 * h * (u[0] ** 2 + u[-1] ** 2))
    h1 = np.sqrt(h * np.sum(((u[1:] - u[:-1]) / h) ** 2))
    return float(l2), float(h1), float(np.max(np.abs(u)))


@dataclass
class TridiagonalSystem:
    """A x = rhs with A tridiagonal: lower/upper of length n-1, diag of length n."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if n < 1 or len(self.lower) != n - 1 or len(self.upper) != n - 1 or len(self.rhs) != n:
            raise ValidationError("inconsistent tridiagonal system dimensions")

    def is_diagonally_dominant(self) -> bool:
        """Strict row dominance |diag| > |lower| + |upper| (missing entries 0)."""
        n = len(self.diag)
        lo = np.abs(np.concatenate(([0.0], self.lower)))
        up = np.abs(np.concatenate((self.upper, [0.0])))
        return bool(np.all(np.abs(self.diag) > lo + up)) if n > 1 else bool(self.diag[0] != 0)

    def dense(self) -> np.ndarray:
        n = len(self.diag)
        A = np.diag(self.diag)
        if n > 1:
            A += np.diag(self.lower, -1) + np.diag(self.upper, 1)
        return A


def thomas_solve(system: TridiagonalSystem) -> np.ndarray:
    """Solve a tridiagonal system by forward elimination without pivoting.

    Intended for diagonally dominant systems, where the elimination is
    well-posed.  A vanishing pivot raises :class:`ZeroPivotError` naming the
    row; callers that cannot rule dominance out should fall back to a dense
    pivoted solve.
    """
    dl, dd, du, rhs = system.lower, system.diag, system.upper, system.rhs
    n = len(dd)
    scale = np.max(np.abs(dd)) + np.max(np.abs(dl), initial=0.0) + np.max(np.abs(du), initial=0.0)
    tiny = 1e-14 * max(scale, 1.0)
    cp = np.empty(max(n - 1, 0))
    yp = np.empty(n)
    den = dd[0]
    if abs(den) < tiny:
        raise ZeroPivotError(0, float(den))
    if n > 1:
        cp[0] = du[0] / den
    yp[0] = rhs[0] / den
    for j in range(1, n):
        den = dd[j] - dl[j - 1] * cp[j - 1]
        if abs(den) < tiny:
            raise ZeroPivotError(j, float(den))
        if j < n - 1:
            cp[j] = du[j] / den
        yp[j] = (rhs[j] - dl[j - 1] * yp[j - 1]) / den
    x = np.empty(n)
    x[-1] = yp[-1]
    for j in range(n - 2, -1, -1):
        x[j] = yp[j] - cp[j] * x[j + 1]
    return x
