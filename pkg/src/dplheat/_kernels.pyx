# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled time-step kernels: fused assembly, prefactored tridiagonal sweep,
and state update in a single pass over the grid.  Semantics match
_kernels_py; see there for the algebra."""

import numpy as np


def step_abc(c, double[::1] T, double[::1] W, double[::1] sigma, double[::1] Z,
             double[::1] F_mid, double Q_mid, double R_mid):
    cdef Py_ssize_t Ms = c.M_s
    cdef Py_ssize_t N = c.N
    cdef double a = c.a, dt = c.dt, K = c.K, h = c.h, z0 = c.z0
    cdef double mu = c.mu, nu = c.nu, g0 = c.g0, kbh2 = c.kbh2, S1 = c.S1
    cdef double[::1] b_n = c.b_n, c_n = c.c_n, d_n = c.d_n
    cdef double[::1] beta_n = c.beta_n, ab_n = c.ab_n
    cdef double[::1] dl = c.dl, cp = c.cp, denom = c.denom

    T1 = np.empty(Ms + 1)
    W1 = np.empty(Ms + 1)
    sigma1 = np.empty(N)
    Z1 = np.empty(N)
    work = np.empty(Ms + N)
    cdef double[::1] T1v = T1, W1v = W1, s1v = sigma1, Z1v = Z1
    cdef double[::1] rhs = work[:Ms]
    cdef double[::1] alpha = work[Ms:]

    cdef double invh2 = 1.0 / (h * h)
    cdef double wlag = a / dt - 0.5
    cdef double s_alpha = 0.0
    cdef double an, wms
    cdef Py_ssize_t i, n

    for i in range(1, Ms):
        rhs[i - 1] = (wlag * W[i]
                      + K * invh2 * (T[i + 1] - 2.0 * T[i] + T[i - 1])
                      + mu * (W[i + 1] - 2.0 * W[i] + W[i - 1])
                      + F_mid[i])
    for n in range(N):
        an = (-d_n[n] * sigma[n] - b_n[n] * Z[n] + 0.5 * W[Ms] + R_mid) / c_n[n]
        alpha[n] = an
        s_alpha += ab_n[n] * (an + sigma[n])
    rhs[Ms - 1] = (wlag * W[Ms]
                   - 2.0 * K * invh2 * (T[Ms] - T[Ms - 1])
                   - (nu + kbh2) * (W[Ms] - W[Ms - 1])
                   - g0 * S1 * W[Ms]
                   + g0 * z0 * s_alpha
                   + 2.0 * K / h * Q_mid
                   + F_mid[Ms])

    # forward sweep of the prefactored Thomas elimination
    rhs[0] = rhs[0] / denom[0]
    for i in range(1, Ms):
        rhs[i] = (rhs[i] - dl[i - 1] * rhs[i - 1]) / denom[i]
    # back substitution straight into W1
    W1v[Ms] = rhs[Ms - 1]
    for i in range(Ms - 2, -1, -1):
        rhs[i] = rhs[i] - cp[i] * rhs[i + 1]
        W1v[i + 1] = rhs[i]
    W1v[0] = 0.0

    T1v[0] = 0.0
    for i in range(1, Ms + 1):
        T1v[i] = T[i] + 0.5 * dt * (W1v[i] + W[i])
    wms = W1v[Ms]
    for n in range(N):
        an = alpha[n] + beta_n[n] * wms
        s1v[n] = an
        Z1v[n] = Z[n] + 0.5 * dt * (an + sigma[n])
    return T1, W1, sigma1, Z1


def step_dirichlet(c, double[::1] T, double[::1] W, double[::1] F_mid):
    cdef Py_ssize_t Ms = c.M_s
    cdef double a = c.a, dt = c.dt, K = c.K, h = c.h, mu = c.mu
    cdef double[::1] cp = c.cp, denom = c.denom

    T1 = np.empty(Ms + 1)
    W1 = np.empty(Ms + 1)
    work = np.empty(Ms - 1)
    cdef double[::1] T1v = T1, W1v = W1
    cdef double[::1] rhs = work

    cdef double invh2 = 1.0 / (h * h)
    cdef double wlag = a / dt - 0.5
    cdef double w_wall = -W[Ms] - (4.0 / dt) * T[Ms]
    cdef Py_ssize_t i, m = Ms - 1

    for i in range(1, Ms):
        rhs[i - 1] = (wlag * W[i]
                      + K * invh2 * (T[i + 1] - 2.0 * T[i] + T[i - 1])
                      + mu * (W[i + 1] - 2.0 * W[i] + W[i - 1])
                      + F_mid[i])
    rhs[m - 1] += mu * w_wall

    rhs[0] = rhs[0] / denom[0]
    for i in range(1, m):
        rhs[i] = (rhs[i] + mu * rhs[i - 1]) / denom[i]
    W1v[Ms - 1] = rhs[m - 1]
    for i in range(m - 2, -1, -1):
        rhs[i] = rhs[i] - cp[i] * rhs[i + 1]
        W1v[i + 1] = rhs[i]
    W1v[0] = 0.0
    W1v[Ms] = w_wall

    T1v[0] = 0.0
    for i in range(1, Ms):
        T1v[i] = T[i] + 0.5 * dt * (W1v[i] + W[i])
    T1v[Ms] = -T[Ms]
    return T1, W1
