"""Rational approximation of sqrt(z) used by the absorbing boundary condition.

The transparent boundary condition for the dual-phase-lag rod involves the
Laplace-domain symbol sqrt(z) with z = (1 + a*s)(1 + b*s)/s.  Discretizing
that square root directly would produce a convolution in time, so it is
replaced by the rational interpolant

    sqrt(z) ~ sqrt(z0) * (1 - sum_n a_n*(1 - z/z0) / (1 - b_n*(1 - z/z0)))

with, for n = 1..N,

    b_n = cos^2(n*pi/(2N+1)),     a_n = 2/(2N+1) * sin^2(n*pi/(2N+1)).

Each partial fraction becomes one auxiliary ODE at the artificial boundary,
so the memory cost of the boundary condition is N scalars.  The combination
S1 = 1 + sum_n a_n/b_n shows up throughout the boundary discretization; it
telescopes to exactly 2N+1, which the tests exploit as a cross-check.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PadePoleError, ValidationError

# Poles of the approximant are simple and isolated; treat a denominator this
# small (relative to 1) as "on the pole".
_POLE_TOL = 1e-14


def pade_coefficients(N: int):
    """Return the coefficient arrays (a, b) of the N-term sqrt approximant.

    Parameters
    ----------
    N : int
        Number of partial-fraction terms, N >= 1.

    Returns
    -------
    (ndarray, ndarray)
        Arrays ``a`` and ``b`` of length N; ``b`` is strictly decreasing
        in (0, 1) and ``a`` satisfies a_n = 2*(1 - b_n)/(2N+1).
    """
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise ValidationError(f"N must be a positive integer, got {N!r}")
    n = np.arange(1, N + 1, dtype=np.float64)
    theta = n * np.pi / (2 * N + 1)
    a = (2.0 / (2 * N + 1)) * np.sin(theta) ** 2
    b = np.cos(theta) ** 2
    return a, b


@dataclass(frozen=True)
class PadeAbc:
    """Frozen parameter record of the rational boundary approximant.

    Attributes
    ----------
    N : int
        Number of terms.
    z0 : float
        Expansion point (> 0).  The approximant is exact at z = z0.
    a, b : ndarray
        Coefficient arrays from :func:`pade_coefficients`.
    sum_ab : float
        Precomputed 1 + sum(a/b); equals 2N+1 up to round-off.
    """

    N: int
    z0: float
    a: np.ndarray
    b: np.ndarray
    sum_ab: float

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError(f"N must be >= 1, got {self.N}")
        if not (np.isfinite(self.z0) and self.z0 > 0):
            raise ValidationError(f"z0 must be a positive finite number, got {self.z0!r}")
        if len(self.a) != self.N or len(self.b) != self.N:
            raise ValidationError("coefficient arrays must have length N")
        if np.any(self.a <= 0):
            raise ValidationError("all a_n must be positive")
        if np.any(self.b <= 0) or np.any(self.b >= 1):
            raise ValidationError("all b_n must lie in (0, 1)")
        if np.any(np.diff(self.b) >= 0):
            raise ValidationError("b_n must be strictly decreasing")

    @classmethod
    def make(cls, N: int, z0: float) -> "PadeAbc":
        """Build the record for N terms around expansion point z0."""
        a, b = pade_coefficients(N)
        return cls(N=int(N), z0=float(z0), a=a, b=b, sum_ab=1.0 + float(np.sum(a / b)))


def pade_sqrt(z: float, pade: PadeAbc) -> float:
    """Evaluate the rational approximation of sqrt(z).

    Intended for z > 0 where the approximation is meaningful (the error is
    smallest near z = z0 and the value saturates at sqrt(z0)*(2N+1) for
    z -> inf).  Evaluation at other real z is permitted for diagnostics, but
    hitting one of the real poles (all located at negative z) raises
    :class:`PadePoleError` naming the offending term.
    """
    u = 1.0 - z / pade.z0
    den = 1.0 - pade.b * u
    bad = np.abs(den) < _POLE_TOL * (1.0 + np.abs(pade.b * u))
    if np.any(bad):
        raise PadePoleError(int(np.argmax(bad)) + 1, z)
    return float(np.sqrt(pade.z0) * (1.0 - np.sum(pade.a * u / den)))


def default_z0(a: float, b: float) -> float:
    """Default expansion point (1+a)(1+b): the symbol z(s) evaluated at s=1.

    With z = (1 + a*s)(1 + b*s)/s this is the natural O(1) scale of z for
    unit-scale transients, and it keeps the approximant exact there.
    """
    if a < 0 or b < 0:
        raise ValidationError(f"phase lags must be non-negative, got a={a}, b={b}")
    return (1.0 + a) * (1.0 + b)
