"""Acceptance suite: one test per headline requirement, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; the whole suite is sized to finish in well under the stated budgets
(the two long ladders march ~6M cell-updates each).
"""

import time
import warnings

import numpy as np
import pytest

from dplheat import (
    Grid,
    PadeAbc,
    builtin_problem,
    cli,
    convergence_study,
    default_z0,
    dense_oracle_step,
    discrete_norms,
    domain_truncation_compare,
    homogenize,
    init_state,
    pade_coefficients,
    run,
    scheme_residuals,
    solve_trajectory,
    stability_audit,
)
from dplheat.stepping import advance
from dplheat.verification import random_smooth_instance

PARAM_SETS = [(1.0, 0.2), (2.0, 3.0)]

# Error magnitudes reported for this configuration by an independent
# implementation whose expansion order and expansion point are unknown;
# agreement is therefore required only within one order of magnitude.
REFERENCE_COUPLED_ERRORS = {
    (1.0, 0.2): [5.170190e-03, 1.273184e-03, 3.159761e-04, 7.870948e-05, 1.964211e-05],
    (2.0, 3.0): [8.902904e-03, 2.258402e-03, 5.687662e-04, 1.427173e-04, 3.574537e-05],
}


def _report(num, name, ok, detail, started, budget):
    wall = time.perf_counter() - started
    line = f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'} — {detail} [{wall:.1f}s]"
    print(line)
    assert ok, line
    assert wall < budget, f"criterion {num} exceeded its {budget:.0f}s budget: {wall:.1f}s"


def test_criterion_1_coupled_refinement():
    started = time.perf_counter()
    ok = True
    details = []
    for (a, b) in PARAM_SETS:
        p = builtin_problem("example1", a=a, b=b)
        report = convergence_study(p, mode="ht", levels=5, coarsest=1.0 / 8.0,
                                   N=5, z0="auto")
        rates = report.rates[1:]
        errors = report.errors
        ok &= all(r >= 1.85 for r in rates)
        ok &= 1.90 <= rates[-1] <= 2.10
        ok &= all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))
        for e1, e2 in [(errors[-3], errors[-2]), (errors[-2], errors[-1])]:
            ok &= 3.3 <= e1 / e2 <= 4.7
        for mine, ref in zip(errors, REFERENCE_COUPLED_ERRORS[(a, b)]):
            ok &= 0.1 <= mine / ref <= 10.0
        details.append(f"(a={a:g},b={b:g}) finest rate {rates[-1]:.4f}, "
                       f"E {errors[0]:.2e}->{errors[-1]:.2e}")
    _report(1, "coupled h=dt refinement", ok, "; ".join(details), started, 30.0)


def test_criterion_2_temporal_refinement():
    started = time.perf_counter()
    ok = True
    details = []
    for (a, b) in PARAM_SETS:
        p = builtin_problem("example1", a=a, b=b)
        report = convergence_study(p, mode="t", levels=5, coarsest=1.0 / 8.0,
                                   N=5, z0="auto")
        rate = report.rates[-1]
        ok &= 1.95 <= rate <= 2.05
        details.append(f"(a={a:g},b={b:g}) finest temporal rate {rate:.4f}")
    _report(2, "temporal refinement, h=dt/50", ok, "; ".join(details), started, 300.0)


def test_criterion_3_spatial_refinement():
    started = time.perf_counter()
    ok = True
    details = []
    for (a, b) in PARAM_SETS:
        p = builtin_problem("example1", a=a, b=b)
        report = convergence_study(p, mode="s", levels=5, coarsest=1.0 / 8.0,
                                   N=5, z0="auto")
        rate = report.rates[-1]
        ok &= 1.95 <= rate <= 2.05
        details.append(f"(a={a:g},b={b:g}) finest spatial rate {rate:.4f}")
    _report(3, "spatial refinement, dt=h/50", ok, "; ".join(details), started, 300.0)


def test_criterion_4_oracle_equivalence():
    started = time.perf_counter()
    p = builtin_problem("example1")
    worst_diff = 0.0
    worst_res = 0.0
    for M_s in (4, 8, 16):
        for N in (1, 2, 4):
            pade = PadeAbc.make(N, default_z0(p.a, p.b))
            hp = homogenize(p, pade)
            grid = Grid(x_r=p.x_r, D=p.D, M_s=M_s, M_t=10)
            state = init_state(hp, grid, pade)
            for _ in range(10):
                fast = advance(state, hp, grid, pade)
                dense = dense_oracle_step(state, hp, grid, pade)
                for name in ("T", "W", "sigma", "Z"):
                    diff = np.max(np.abs(getattr(fast, name) - getattr(dense, name)))
                    worst_diff = max(worst_diff, float(diff))
                res = scheme_residuals(state, fast, hp, grid, pade)
                worst_res = max(worst_res, max(res.values()))
                state = fast
    ok = worst_diff <= 1e-10 and worst_res <= 1e-11
    _report(4, "eliminated step = dense coupled step", ok,
            f"max component diff {worst_diff:.2e}, max residual {worst_res:.2e}",
            started, 60.0)


def test_criterion_5_stability_audit():
    started = time.perf_counter()
    ok = True
    margins = []
    for (a, b) in PARAM_SETS:
        p = builtin_problem("example1", a=a, b=b)
        pade = PadeAbc.make(5, default_z0(a, b))
        hp = homogenize(p, pade)
        grid = Grid.from_steps(p.x_r, p.D, 1.0 / 16.0, 1.0 / 16.0)
        audit = stability_audit(solve_trajectory(hp, grid, pade), hp, grid, pade)
        ok &= audit.passed
        margins.append(audit.margin)
    rng = np.random.default_rng(20260819)
    for j in range(20):
        hp, grid, pade = random_smooth_instance(rng, (0.1, 1.0, 10.0)[j % 3])
        audit = stability_audit(solve_trajectory(hp, grid, pade), hp, grid, pade)
        ok &= audit.passed
        margins.append(audit.margin)
    _report(5, "energy bound holds at every step", ok,
            f"22 trajectories audited, min margin {min(margins):.2f}x",
            started, 60.0)


def test_criterion_6_domain_truncation():
    started = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # example2's benign 2e-10 source tail
        c = domain_truncation_compare(1.0 / 64.0, 1.0 / 64.0,
                                      [14.0, 16.0, 18.0, 20.0],
                                      problem="example2", abc_x_r=1.0,
                                      dir_x_r=20.0, saturation_x_r=25.0,
                                      N=5, z0="auto")
    ok = True
    for t in c.times:
        ok &= c.max_rel[t] <= 0.05
        # the long-domain reference itself must be converged in the window
        ok &= c.saturation_rel[t] < c.max_rel[t]
    worst = max(c.max_rel.values())
    sat = max(c.saturation_rel.values())
    _report(6, "absorbing cut matches the long domain", ok,
            f"worst rel discrepancy {worst:.2e}, reference saturation {sat:.2e}",
            started, 120.0)


def test_criterion_7_property_suites(tmp_path):
    started = time.perf_counter()
    ok = True

    # rational-approximant invariants for every order
    for N in range(1, 17):
        a, b = pade_coefficients(N)
        ok &= bool(np.all(a > 0) and np.all((b > 0) & (b < 1)))
        ok &= bool(np.all(np.diff(b) < 0))
        ok &= bool(np.allclose(a, 2.0 * (1.0 - b) / (2 * N + 1), rtol=1e-14))
        s1 = 1.0 + float(np.sum(a / b))
        ok &= abs(s1 - (2 * N + 1)) < 1e-12 * (2 * N + 1)

    # max-norm embedding on unit-or-shorter domains, 1000 random fields
    rng = np.random.default_rng(7)
    for _ in range(1000):
        m = int(rng.integers(2, 80))
        x_r = float(rng.uniform(0.02, 1.0))
        u = rng.normal(size=m + 1)
        u[0] = 0.0
        _, h1, inf = discrete_norms(u, x_r / m)
        ok &= inf <= h1 * (1 + 1e-12)

    # zero data propagates to exactly zero trajectories in both modes
    z = lambda x, t=None: np.zeros_like(np.asarray(x, dtype=float))
    from dplheat import HomogenizedProblem
    hp0 = HomogenizedProblem(a=0.7, b=1.3, K=2.0, x_r=1.5, D=1.0, F=z, xi1=z,
                             eta1=z, Q=lambda t: 0.0, R=lambda t: 0.0,
                             phi=lambda t: 0.0)
    grid0 = Grid(x_r=1.5, D=1.0, M_s=12, M_t=9)
    s_abc, _ = run(hp0, grid0, PadeAbc.make(3, 2.0))
    s_dir, _ = run(hp0, grid0, None, mode="dirichlet")
    ok &= bool(np.all(s_abc.T == 0.0) and np.all(s_abc.W == 0.0)
               and np.all(s_abc.sigma == 0.0) and np.all(s_abc.Z == 0.0))
    ok &= bool(np.all(s_dir.T == 0.0) and np.all(s_dir.W == 0.0))

    # determinism: repeated runs byte-identical, in memory and on disk
    p = builtin_problem("example1")
    pade = PadeAbc.make(5, default_z0(p.a, p.b))
    hp = homogenize(p, pade)
    grid = Grid.from_steps(p.x_r, p.D, 1.0 / 16.0, 1.0 / 16.0)
    s1, _ = run(hp, grid, pade)
    s2, _ = run(hp, grid, pade)
    ok &= bool(np.array_equal(s1.T, s2.T) and np.array_equal(s1.W, s2.W))
    args = ["solve", "--problem", "example1", "--h", "0.125", "--dt", "0.125",
            "--times", "1"]
    assert cli.main(args + ["--out", str(tmp_path / "r1")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "r2")]) == 0
    ok &= (tmp_path / "r1" / "solution.csv").read_bytes() \
        == (tmp_path / "r2" / "solution.csv").read_bytes()

    _report(7, "invariants, embedding, zero data, determinism", ok,
            "orders 1..16, 1000 fields, 2 zero trajectories, byte-equal reruns",
            started, 60.0)
