"""Independent checks of the solver: literal-scheme oracle, residual checker,
energy-stability audit, convergence studies, and domain-truncation comparison.

The oracle in :func:`dense_oracle_step` assembles every discrete equation of
one time step literally -- no elimination, no closure algebra -- into one
dense linear system in (T^k, W^k, sigma^k, Z^k) and solves it with pivoting.
Agreement with the production step is therefore evidence that the eliminated
tridiagonal formulation implements the same scheme, not just a similar one.

:func:`stability_audit` evaluates both sides of the discrete energy bound

    ||T^m||_inf^2 <= (2 e^D / K) * { K/2 ||xi1||_1^2 + a/2 ||eta1||^2
        + dt/2 sum_k ||F||^2 + (2N+1)/(8 sqrt(K z0)) dt sum_k (h F_{M_s})^2
        + K^{3/2} (2N+1)/(2 sqrt(z0)) dt sum_k Q^2
        + sqrt(K) z0^{3/2}/(4(a+b)) dt sum_k sum_n a_n (R / b_n)^2 }

for every reachable m, using the weighted discrete norms of
:func:`dplheat.grid.discrete_norms`.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NumericalError, ValidationError
from .grid import Grid
from .pade import PadeAbc, default_z0
from .problems import HomogenizedProblem, builtin_problem, homogenize, recover
from .stepping import SolverState, run

AUDIT_TOL = 1e-10


# ---------------------------------------------------------------------------
# dense oracle


def dense_oracle_step(state: SolverState, hp: HomogenizedProblem, grid: Grid,
                      pade: PadeAbc) -> SolverState:
    """Advance one step by solving the uneliminated discrete system densely.

    Unknown layout: [T^k (M_s+1) | W^k (M_s+1) | sigma^k (N) | Z^k (N)].
    Rows: interior balance (M_s-1), left Dirichlet midpoint (1), boundary
    balance (1), aux relations (N), velocity/temperature coupling on every
    cell (M_s), the same coupling at the left node (1), and the aux
    derivative coupling (N).
    """
    a, b, K, z0 = hp.a, hp.b, hp.K, pade.z0
    h, dt = grid.h, grid.dt
    Ms, N = grid.M_s, pade.N
    a_n, b_n = pade.a, pade.b
    ab_n = a_n / b_n
    S1 = pade.sum_ab
    g0 = np.sqrt(K * z0) / h

    T, W, sig, Z = state.T, state.W, state.sigma, state.Z
    x = grid.x_nodes()
    t_mid = (state.k + 0.5) * dt
    F_mid = np.asarray(hp.F(x, t_mid), dtype=np.float64) + np.zeros_like(x)
    Q_mid = float(hp.Q(t_mid))
    R_mid = float(hp.R(t_mid))

    nT = Ms + 1
    size = 2 * nT + 2 * N
    iT = 0
    iW = nT
    iS = 2 * nT
    iZ = 2 * nT + N
    A = np.zeros((size, size))
    r = np.zeros(size)
    row = 0

    h2 = h * h
    for i in range(1, Ms):
        A[row, iW + i] += 0.5 + a / dt
        for j, wgt in ((i - 1, 1.0), (i, -2.0), (i + 1, 1.0)):
            A[row, iT + j] += -(K / 2.0) * wgt / h2
            A[row, iW + j] += -(K * b / 2.0) * wgt / h2
        r[row] = ((a / dt - 0.5) * W[i]
                  + (K / 2.0) * (T[i + 1] - 2.0 * T[i] + T[i - 1]) / h2
                  + (K * b / 2.0) * (W[i + 1] - 2.0 * W[i] + W[i - 1]) / h2
                  + F_mid[i])
        row += 1

    A[row, iT + 0] = 0.5
    r[row] = -0.5 * T[0]
    row += 1

    A[row, iW + Ms] += 0.5 + a / dt
    A[row, iT + Ms] += K / h2
    A[row, iT + Ms - 1] += -K / h2
    A[row, iW + Ms] += K * b / h2
    A[row, iW + Ms - 1] += -K * b / h2
    A[row, iW + Ms] += g0 * S1
    for n in range(N):
        A[row, iS + n] += -g0 * z0 * ab_n[n]
    r[row] = ((a / dt - 0.5) * W[Ms]
              - (K / h2) * (T[Ms] - T[Ms - 1])
              - (K * b / h2) * (W[Ms] - W[Ms - 1])
              - g0 * S1 * W[Ms]
              + g0 * z0 * float(np.dot(ab_n, sig))
              + (2.0 * K / h) * Q_mid + F_mid[Ms])
    row += 1

    for n in range(N):
        A[row, iS + n] += z0 * (1.0 - b_n[n]) / 2.0 + b_n[n] * ((a + b) / 2.0 + a * b / dt)
        A[row, iZ + n] += b_n[n] / 2.0
        A[row, iW + Ms] += -0.5
        r[row] = (-(z0 * (1.0 - b_n[n]) / 2.0 + b_n[n] * ((a + b) / 2.0 - a * b / dt)) * sig[n]
                  - (b_n[n] / 2.0) * Z[n] + 0.5 * W[Ms] + R_mid)
        row += 1

    for i in range(1, Ms + 1):
        A[row, iW + i] += 0.5 / h
        A[row, iW + i - 1] += -0.5 / h
        A[row, iT + i] += -1.0 / (h * dt)
        A[row, iT + i - 1] += 1.0 / (h * dt)
        r[row] = (-0.5 * (W[i] - W[i - 1]) / h
                  - (T[i] - T[i - 1]) / (h * dt))
        row += 1

    A[row, iW + 0] += 0.5
    A[row, iT + 0] += -1.0 / dt
    r[row] = -0.5 * W[0] - T[0] / dt
    row += 1

    for n in range(N):
        A[row, iS + n] += 0.5
        A[row, iZ + n] += -1.0 / dt
        r[row] = -0.5 * sig[n] - Z[n] / dt
        row += 1

    assert row == size
    try:
        u = np.linalg.solve(A, r)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"oracle system singular at step {state.k + 1}: {exc}") from exc
    return SolverState(
        k=state.k + 1,
        T=u[iT:iT + nT].copy(),
        W=u[iW:iW + nT].copy(),
        sigma=u[iS:iS + N].copy(),
        Z=u[iZ:iZ + N].copy(),
    )


def scheme_residuals(prev: SolverState, nxt: SolverState, hp: HomogenizedProblem,
                     grid: Grid, pade: PadeAbc) -> Dict[str, float]:
    """Relative residual of every discrete equation family for one step.

    Each residual is normalized by the largest magnitude among the terms of
    its equation, so values near machine epsilon mean the step satisfies the
    scheme to round-off regardless of solution scale.
    """
    a, b, K, z0 = hp.a, hp.b, hp.K, pade.z0
    h, dt, Ms = grid.h, grid.dt, grid.M_s
    a_n, b_n, ab_n, S1 = pade.a, pade.b, pade.a / pade.b, pade.sum_ab

    x = grid.x_nodes()
    t_mid = (prev.k + 0.5) * dt
    F_mid = np.asarray(hp.F(x, t_mid), dtype=np.float64) + np.zeros_like(x)
    Q_mid = float(hp.Q(t_mid))
    R_mid = float(hp.R(t_mid))

    Tm = 0.5 * (nxt.T + prev.T)
    dT = (nxt.T - prev.T) / dt
    Wm = 0.5 * (nxt.W + prev.W)
    dW = (nxt.W - prev.W) / dt
    sm = 0.5 * (nxt.sigma + prev.sigma)
    ds = (nxt.sigma - prev.sigma) / dt
    Zm = 0.5 * (nxt.Z + prev.Z)
    dZ = (nxt.Z - prev.Z) / dt

    def rel(res, *terms):
        scale = max((float(np.max(np.abs(t))) for t in terms), default=0.0)
        return float(np.max(np.abs(res))) / max(scale, 1e-30)

    out = {}
    d2Tm = (Tm[2:] - 2.0 * Tm[1:-1] + Tm[:-2]) / h**2
    d2Wm = (Wm[2:] - 2.0 * Wm[1:-1] + Wm[:-2]) / h**2
    res_int = Wm[1:-1] + a * dW[1:-1] - K * (d2Tm + b * d2Wm) - F_mid[1:-1]
    out["interior"] = rel(res_int, Wm[1:-1], a * dW[1:-1], K * d2Tm, K * b * d2Wm, F_mid[1:-1])

    out["left_dirichlet"] = rel(np.array([Tm[0]]), prev.T, nxt.T)

    dxT = (Tm[Ms] - Tm[Ms - 1]) / h
    dxW = (Wm[Ms] - Wm[Ms - 1]) / h
    flux = -dxT - b * dxW - np.sqrt(z0 / K) * (S1 * Wm[Ms] - z0 * float(np.dot(ab_n, sm))) + Q_mid
    res_bdy = Wm[Ms] + a * dW[Ms] - (2.0 * K / h) * flux - F_mid[Ms]
    out["boundary"] = rel(
        np.array([res_bdy]),
        np.array([Wm[Ms], a * dW[Ms], 2.0 * K / h * dxT, 2.0 * K / h * b * dxW,
                  2.0 * np.sqrt(K * z0) * S1 * Wm[Ms], 2.0 * K / h * Q_mid, F_mid[Ms]]),
    )

    res_aux = (z0 * (1.0 - b_n) * sm + b_n * (Zm + (a + b) * sm + a * b * ds)
               - Wm[Ms] - R_mid)
    out["aux"] = rel(res_aux, z0 * (1.0 - b_n) * sm, b_n * Zm, b_n * (a + b) * sm,
                     a * b * b_n * ds, np.array([Wm[Ms], R_mid]))

    res_cpl = (Wm[1:] - Wm[:-1]) / h - (dT[1:] - dT[:-1]) / h
    out["coupling"] = rel(res_cpl, Wm / h, dT / h)

    out["left_coupling"] = rel(np.array([Wm[0] - dT[0]]), Wm, dT)

    out["aux_coupling"] = rel(sm - dZ, sm, dZ)
    return out


# ---------------------------------------------------------------------------
# stability audit


@dataclass
class StabilityAudit:
    """Per-step evaluation of the discrete energy bound."""

    lhs: np.ndarray          # ||T^m||_inf^2, m = 1..M_t
    rhs: np.ndarray          # bound at the same m
    tol: float = AUDIT_TOL

    @property
    def ok(self) -> np.ndarray:
        return self.lhs <= self.rhs * (1.0 + self.tol)

    @property
    def passed(self) -> bool:
        return bool(np.all(self.ok))

    @property
    def margin(self) -> float:
        """Smallest rhs/lhs ratio; inf when the solution stays exactly zero."""
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(self.lhs > 0, self.rhs / self.lhs, np.inf)
        return float(np.min(ratios)) if len(ratios) else math.inf


def stability_audit(trajectory: Sequence[np.ndarray], hp: HomogenizedProblem,
                    grid: Grid, pade: PadeAbc) -> StabilityAudit:
    """Audit a solved trajectory against the energy bound.

    ``trajectory`` holds the reduced temperature fields T^0 .. T^m in step
    order (as produced by :func:`solve_trajectory`); the data sums on the
    right-hand side are recomputed from the problem record.
    """
    if len(trajectory) < 2:
        raise ValidationError("trajectory must contain the initial field and at least one step")
    m_max = len(trajectory) - 1
    if m_max > grid.M_t:
        raise ValidationError("trajectory is longer than the grid allows")
    a, b, K, z0, N = hp.a, hp.b, hp.K, pade.z0, pade.N
    h, dt = grid.h, grid.dt
    x = grid.x_nodes()

    def weighted_l2(u):
        return float(np.sqrt(h * np.sum(u[1:-1] ** 2) + 0.5 * h * (u[0] ** 2 + u[-1] ** 2)))

    xi = np.asarray(trajectory[0], dtype=np.float64)
    xi_h1 = float(np.sqrt(h * np.sum(((xi[1:] - xi[:-1]) / h) ** 2)))
    eta = np.asarray(hp.eta1(x), dtype=np.float64) + np.zeros_like(x)
    base = K / 2.0 * xi_h1**2 + a / 2.0 * weighted_l2(eta) ** 2

    lhs = np.empty(m_max)
    rhs = np.empty(m_max)
    acc = 0.0
    gain = 2.0 * math.exp(hp.D) / K
    for k in range(1, m_max + 1):
        t_mid = (k - 0.5) * dt
        F_mid = np.asarray(hp.F(x, t_mid), dtype=np.float64) + np.zeros_like(x)
        Q_mid = float(hp.Q(t_mid))
        R_mid = float(hp.R(t_mid))
        acc += dt / 2.0 * weighted_l2(F_mid) ** 2
        acc += (2 * N + 1) / (8.0 * math.sqrt(K * z0)) * dt * (h * F_mid[-1]) ** 2
        acc += K**1.5 * (2 * N + 1) / (2.0 * math.sqrt(z0)) * dt * Q_mid**2
        acc += (math.sqrt(K) / (4.0 * (a + b))) * z0**1.5 * dt * float(
            np.sum(pade.a * (R_mid / pade.b) ** 2)
        )
        lhs[k - 1] = float(np.max(np.abs(trajectory[k]))) ** 2
        rhs[k - 1] = gain * (base + acc)
    return StabilityAudit(lhs=lhs, rhs=rhs)


def solve_trajectory(hp: HomogenizedProblem, grid: Grid, pade: Optional[PadeAbc],
                     mode: str = "abc", backend=None) -> List[np.ndarray]:
    """Run the scheme, keeping a copy of the reduced field after every step."""
    fields: List[np.ndarray] = []
    run(hp, grid, pade, mode=mode, backend=backend,
        on_step=lambda s: fields.append(s.T.copy()))
    return fields


def random_smooth_instance(rng: np.random.Generator, dt_over_h: float):
    """Draw a random smooth-data homogenized problem with the given dt/h ratio.

    Used by the stability-audit property tests: coefficients, domain size,
    grid, expansion order, and all data functions are randomized, with the
    left-end compatibility eta1(0) = 0 enforced exactly.
    """
    a = float(10.0 ** rng.uniform(-1.0, 0.5))
    b = float(10.0 ** rng.uniform(-1.0, 0.5))
    K = float(10.0 ** rng.uniform(-0.5, 0.5))
    D = 1.0
    M_t = int(rng.integers(4, 17))
    dt = D / M_t
    h = dt / dt_over_h
    M_s = int(np.clip(round(rng.uniform(0.5, 3.0) / h), 2, 400))
    x_r = M_s * h
    grid = Grid(x_r=x_r, D=D, M_s=M_s, M_t=M_t)
    N = int(rng.integers(1, 9))
    pade = PadeAbc.make(N, default_z0(a, b))

    amp = rng.normal(size=5)
    freq = rng.uniform(0.3, 2.5, size=3)

    def xi1(x):
        return amp[0] * np.sin(np.pi * np.asarray(x) / x_r)

    def eta1(x):
        return amp[1] * np.sin(2.0 * np.pi * np.asarray(x) / x_r)

    def F(x, t):
        return amp[2] * np.cos(freq[0] * np.asarray(x) + freq[1] * t)

    def Q(t):
        return float(amp[3] * np.cos(freq[2] * t))

    def R(t):
        return float(amp[4] * np.sin(freq[2] * t))

    hp = HomogenizedProblem(a=a, b=b, K=K, x_r=x_r, D=D, F=F, xi1=xi1,
                            eta1=eta1, Q=Q, R=R, phi=lambda t: 0.0,
                            name="random-smooth")
    return hp, grid, pade


# ---------------------------------------------------------------------------
# convergence


@dataclass
class ConvergenceReport:
    """Errors and observed orders along a refinement ladder."""

    mode: str                       # "ht", "t", or "s"
    steps: List[Tuple[float, float]]  # (h, dt) per level
    errors: List[float]
    problem: str = ""

    @property
    def rates(self) -> List[Optional[float]]:
        """log2(E_j / E_{j+1}) aligned with levels; None for the first."""
        out: List[Optional[float]] = [None]
        for j in range(1, len(self.errors)):
            prev, cur = self.errors[j - 1], self.errors[j]
            if prev > 0 and cur > 0:
                out.append(math.log2(prev / cur))
            else:
                out.append(None)
        return out

    @property
    def rate_t(self) -> Optional[List[Optional[float]]]:
        return self.rates if self.mode in ("ht", "t") else None

    @property
    def rate_s(self) -> Optional[List[Optional[float]]]:
        return self.rates if self.mode in ("ht", "s") else None


#: step-size couplings of the three ladder modes
_LADDER = {
    "ht": lambda base: (base, base),
    "t": lambda base: (base / 50.0, base),
    "s": lambda base: (base, base / 50.0),
}


def convergence_study(problem, *, mode: str = "ht", levels: int = 5,
                      coarsest: float = 1.0 / 8.0, N: int = 5, z0=None,
                      backend=None) -> ConvergenceReport:
    """Solve on a refinement ladder and measure errors against the exact solution.

    ``mode`` fixes the coupling along the ladder: "ht" refines h = dt
    together, "t" refines dt with h = dt/50 (temporal order in isolation),
    "s" refines h with dt = h/50.  Errors are measured at the final time in
    physical variables over the interior and right-boundary nodes.
    """
    if mode not in _LADDER:
        raise ValidationError(f"mode must be one of {sorted(_LADDER)}, got {mode!r}")
    if levels < 1:
        raise ValidationError(f"levels must be >= 1, got {levels}")
    p = builtin_problem(problem) if isinstance(problem, str) else problem
    if p.exact is None:
        raise ValidationError("convergence_study needs a problem with an exact solution")
    if z0 is None or z0 == "auto":
        z0 = default_z0(p.a, p.b)
    pade = PadeAbc.make(N, z0)
    hp = homogenize(p, pade)

    steps: List[Tuple[float, float]] = []
    errors: List[float] = []
    for j in range(levels):
        base = coarsest / 2**j
        h, dt = _LADDER[mode](base)
        grid = Grid.from_steps(p.x_r, p.D, h, dt)
        state, _ = run(hp, grid, pade, mode="abc", backend=backend)
        x = grid.x_nodes()
        T_phys = recover(state.T, p.phi, p.D)
        err = float(np.max(np.abs(np.asarray(p.exact(x, p.D))[1:] - T_phys[1:])))
        steps.append((h, dt))
        errors.append(err)
    return ConvergenceReport(mode=mode, steps=steps, errors=errors, problem=p.name)


# ---------------------------------------------------------------------------
# domain truncation comparison


@dataclass
class TruncationComparison:
    """Absorbing boundary on a short domain vs Dirichlet wall on a long one."""

    x: np.ndarray                    # common nodes, [0, abc_x_r]
    times: List[float]
    T_abc: Dict[float, np.ndarray]   # physical temperature, short domain
    T_dir: Dict[float, np.ndarray]   # physical temperature, long domain (restricted)
    max_abs: Dict[float, float]
    max_rel: Dict[float, float]
    saturation_rel: Dict[float, float] = field(default_factory=dict)


def domain_truncation_compare(h: float, dt: float, times: Sequence[float],
                              problem: str = "example2", abc_x_r: float = 1.0,
                              dir_x_r: float = 20.0,
                              saturation_x_r: Optional[float] = None,
                              N: int = 5, z0=None, backend=None,
                              **overrides) -> TruncationComparison:
    """Compare the short-domain absorbing run against a long Dirichlet run.

    The Dirichlet wall at ``dir_x_r`` emulates the unbounded tail by brute
    force; pass ``saturation_x_r`` (e.g. an even larger wall) to verify that
    the emulation is converged in the window of interest.  Discrepancies are
    reported per requested time as sup-norm over [0, abc_x_r], absolute and
    relative to the Dirichlet field's sup-norm.
    """
    times = [float(t) for t in times]

    def posed_on(x_right):
        if isinstance(problem, str):
            return builtin_problem(problem, x_r=x_right, **overrides)
        return replace(problem, x_r=x_right)

    def dirichlet_snaps(x_right):
        p = posed_on(x_right)
        hp = homogenize(p, None)
        grid = Grid.from_steps(p.x_r, p.D, h, dt)
        _, snaps = run(hp, grid, None, mode="dirichlet", snapshot_times=times,
                       backend=backend)
        return p, grid, {t: recover(T, p.phi, t) for t, T in snaps.items()}

    p_abc = posed_on(abc_x_r)
    z0_val = default_z0(p_abc.a, p_abc.b) if z0 in (None, "auto") else float(z0)
    pade = PadeAbc.make(N, z0_val)
    hp_abc = homogenize(p_abc, pade)
    grid_abc = Grid.from_steps(p_abc.x_r, p_abc.D, h, dt)
    _, snaps_abc = run(hp_abc, grid_abc, pade, mode="abc", snapshot_times=times,
                       backend=backend)
    T_abc = {t: recover(T, p_abc.phi, t) for t, T in snaps_abc.items()}

    _, grid_dir, T_dir_full = dirichlet_snaps(dir_x_r)
    n_common = grid_dir.index_of_point(abc_x_r)
    if n_common != grid_abc.M_s:
        raise ValidationError("short and long grids do not share nodes on the window")
    T_dir = {t: T_dir_full[t][: n_common + 1] for t in times}

    max_abs, max_rel = {}, {}
    for t in times:
        diff = float(np.max(np.abs(T_dir[t] - T_abc[t])))
        scale = float(np.max(np.abs(T_dir[t])))
        max_abs[t] = diff
        max_rel[t] = diff / scale if scale > 0 else (0.0 if diff == 0 else math.inf)

    saturation_rel: Dict[float, float] = {}
    if saturation_x_r is not None:
        _, grid_sat, T_sat_full = dirichlet_snaps(saturation_x_r)
        n_sat = grid_sat.index_of_point(abc_x_r)
        for t in times:
            diff = float(np.max(np.abs(T_dir[t] - T_sat_full[t][: n_sat + 1])))
            scale = float(np.max(np.abs(T_dir[t])))
            saturation_rel[t] = diff / scale if scale > 0 else (0.0 if diff == 0 else math.inf)

    return TruncationComparison(
        x=grid_abc.x_nodes(), times=times, T_abc=T_abc, T_dir=T_dir,
        max_abs=max_abs, max_rel=max_rel, saturation_rel=saturation_rel,
    )
