"""Pure-Python (numpy + LAPACK) time-step kernels.

Reference implementation of one Crank-Nicolson step; the optional compiled
extension mirrors these semantics with fused loops and a prefactored
tridiagonal sweep.  Both backends consume the same coefficient records.

The unknown of the linear solve is the velocity field W^k at the next time
level (nodes 1..M_s for the absorbing boundary variant, 1..M_s-1 for the
Dirichlet variant); everything else is recovered explicitly:

    T^k     = T^{k-1} + dt/2 * (W^k + W^{k-1})
    sigma^k = alpha_n + beta_n * W^k[M_s]
    Z^k     = Z^{k-1} + dt/2 * (sigma^k + sigma^{k-1})
"""

import numpy as np
from scipy.linalg import solve_banded


def abc_rhs(c, T, W, sigma, Z, F_mid, Q_mid, R_mid):
    """Assemble the right-hand side of the W^k system and the aux constants."""
    Ms = c.M_s
    h2 = c.h * c.h
    rhs = np.empty(Ms)
    rhs[: Ms - 1] = (
        (c.a / c.dt - 0.5) * W[1:-1]
        + (c.K / h2) * (T[2:] - 2.0 * T[1:-1] + T[:-2])
        + c.mu * (W[2:] - 2.0 * W[1:-1] + W[:-2])
        + F_mid[1:-1]
    )
    alpha = (-c.d_n * sigma - c.b_n * Z + 0.5 * W[Ms] + R_mid) / c.c_n
    rhs[Ms - 1] = (
        (c.a / c.dt - 0.5) * W[Ms]
        - (2.0 * c.K / h2) * (T[Ms] - T[Ms - 1])
        - (c.nu + c.kbh2) * (W[Ms] - W[Ms - 1])
        - c.g0 * c.S1 * W[Ms]
        + c.g0 * c.z0 * np.dot(c.ab_n, alpha + sigma)
        + (2.0 * c.K / c.h) * Q_mid
        + F_mid[Ms]
    )
    return rhs, alpha


def abc_update(c, T, W, sigma, Z, alpha, w_new):
    """Recover the next state from the solved velocity increment w_new."""
    W1 = np.empty(c.M_s + 1)
    W1[0] = 0.0
    W1[1:] = w_new
    T1 = T + (0.5 * c.dt) * (W1 + W)
    T1[0] = 0.0
    sigma1 = alpha + c.beta_n * W1[c.M_s]
    Z1 = Z + (0.5 * c.dt) * (sigma1 + sigma)
    return T1, W1, sigma1, Z1


def step_abc(c, T, W, sigma, Z, F_mid, Q_mid, R_mid):
    rhs, alpha = abc_rhs(c, T, W, sigma, Z, F_mid, Q_mid, R_mid)
    w_new = solve_banded((1, 1), c.banded, rhs, check_finite=False)
    return abc_update(c, T, W, sigma, Z, alpha, w_new)


def dirichlet_rhs(c, T, W, F_mid):
    """Right-hand side of the interior W^k system plus the known wall value."""
    Ms = c.M_s
    h2 = c.h * c.h
    rhs = (
        (c.a / c.dt - 0.5) * W[1:-1]
        + (c.K / h2) * (T[2:] - 2.0 * T[1:-1] + T[:-2])
        + c.mu * (W[2:] - 2.0 * W[1:-1] + W[:-2])
        + F_mid[1:-1]
    )
    # Zero midpoint value at the wall fixes the new corner velocity outright.
    w_wall = -W[Ms] - (4.0 / c.dt) * T[Ms]
    rhs[-1] += c.mu * w_wall
    return rhs, w_wall


def dirichlet_update(c, T, W, w_new, w_wall):
    W1 = np.empty(c.M_s + 1)
    W1[0] = 0.0
    W1[1:-1] = w_new
    W1[-1] = w_wall
    T1 = T + (0.5 * c.dt) * (W1 + W)
    T1[0] = 0.0
    T1[-1] = -T[-1]
    return T1, W1


def step_dirichlet(c, T, W, F_mid):
    rhs, w_wall = dirichlet_rhs(c, T, W, F_mid)
    w_new = solve_banded((1, 1), c.banded, rhs, check_finite=False)
    return dirichlet_update(c, T, W, w_new, w_wall)
