"""Grid construction, discrete operators, norms, and the tridiagonal solver."""

import numpy as np
import pytest

from dplheat import (
    Grid,
    GridAlignmentError,
    TridiagonalSystem,
    ValidationError,
    ZeroPivotError,
    delta_x2,
    discrete_norms,
    thomas_solve,
)


def test_grid_steps_and_nodes():
    g = Grid(x_r=7.0, D=1.0, M_s=56, M_t=8)
    assert g.h == pytest.approx(0.125)
    assert g.dt == pytest.approx(0.125)
    x = g.x_nodes()
    t = g.t_nodes()
    assert len(x) == 57 and x[0] == 0.0 and x[-1] == 7.0
    assert len(t) == 9 and t[-1] == 1.0


def test_from_steps_rejects_misaligned():
    g = Grid.from_steps(7.0, 1.0, 0.125, 0.25)
    assert (g.M_s, g.M_t) == (56, 4)
    with pytest.raises(ValidationError):
        Grid.from_steps(7.0, 1.0, 0.3, 0.25)
    with pytest.raises(ValidationError):
        Grid.from_steps(7.0, 1.0, 0.125, -0.1)
    with pytest.raises(ValidationError):
        Grid.from_steps(7.0, 1.0, 9.0, 0.25)  # step longer than the domain


def test_grid_validation():
    with pytest.raises(ValidationError):
        Grid(x_r=0.0, D=1.0, M_s=4, M_t=4)
    with pytest.raises(ValidationError):
        Grid(x_r=1.0, D=1.0, M_s=1, M_t=4)
    with pytest.raises(ValidationError):
        Grid(x_r=1.0, D=float("inf"), M_s=4, M_t=4)
    with pytest.raises(ValidationError):
        Grid(x_r=1.0, D=1.0, M_s=4, M_t=0)


def test_index_lookup():
    g = Grid(x_r=1.0, D=20.0, M_s=20, M_t=200)
    assert g.index_of_point(0.5) == 10
    assert g.index_of_time(14.0) == 140
    with pytest.raises(GridAlignmentError):
        g.index_of_point(0.513)
    with pytest.raises(GridAlignmentError):
        g.index_of_time(20.05)
    with pytest.raises(GridAlignmentError):
        g.index_of_time(-0.1)


def test_delta_x2_frozen_and_quadratic():
    assert delta_x2(np.array([0.0, 1.0, 0.0]), 1, 0.5) == pytest.approx(-8.0)
    # exact on quadratics: d2/dx2 (3x^2 - x + 2) = 6
    x = np.linspace(0.0, 2.0, 11)
    v = 3.0 * x**2 - x + 2.0
    for i in range(1, 10):
        assert delta_x2(v, i, x[1] - x[0]) == pytest.approx(6.0, rel=1e-12)
    with pytest.raises(ValidationError):
        delta_x2(v, 0, 0.2)
    with pytest.raises(ValidationError):
        delta_x2(v, 10, 0.2)


def test_discrete_norms_frozen():
    l2, h1, inf = discrete_norms(np.array([0.0, 1.0, 2.0]), 0.5)
    assert l2 == pytest.approx(np.sqrt(1.5))
    assert h1 == pytest.approx(2.0)
    assert inf == 2.0
    with pytest.raises(ValidationError):
        discrete_norms(np.array([0.5, 1.0]), 0.5)  # must vanish at the left end


def test_infinity_norm_below_h1_on_short_domains():
    """With u(0)=0, |u|_inf <= sqrt(x_r) * |u|_h1; no x_r factor needed for x_r <= 1."""
    rng = np.random.default_rng(42)
    for _ in range(1000):
        m = int(rng.integers(2, 60))
        x_r = float(rng.uniform(0.05, 1.0))
        h = x_r / m
        u = rng.normal(size=m + 1)
        u[0] = 0.0
        _, h1, inf = discrete_norms(u, h)
        assert inf <= h1 * (1 + 1e-12)
    # the sharp bound carries sqrt(x_r) on longer domains
    for _ in range(200):
        m = int(rng.integers(2, 60))
        x_r = float(rng.uniform(1.0, 30.0))
        u = rng.normal(size=m + 1)
        u[0] = 0.0
        _, h1, inf = discrete_norms(u, x_r / m)
        assert inf <= np.sqrt(x_r) * h1 * (1 + 1e-12)


def test_thomas_matches_dense_on_dominant_systems():
    rng = np.random.default_rng(123)
    for _ in range(200):
        n = int(rng.integers(1, 40))
        lower = rng.normal(size=n - 1)
        upper = rng.normal(size=n - 1)
        diag = np.abs(np.concatenate(([0.0], lower))) \
            + np.abs(np.concatenate((upper, [0.0]))) \
            + rng.uniform(0.5, 2.0, size=n)
        diag *= rng.choice([-1.0, 1.0], size=n)
        rhs = rng.normal(size=n)
        sys = TridiagonalSystem(lower=lower, diag=diag, upper=upper, rhs=rhs)
        assert sys.is_diagonally_dominant()
        x = thomas_solve(sys)
        np.testing.assert_allclose(sys.dense() @ x, rhs, atol=1e-10 * max(1, np.abs(rhs).max()))


def test_thomas_zero_pivot():
    sys = TridiagonalSystem(
        lower=np.array([1.0]), diag=np.array([1.0, 1.0]),
        upper=np.array([1.0]), rhs=np.array([1.0, 1.0]))
    # elimination pivot in row 1 is 1 - 1*1 = 0
    with pytest.raises(ZeroPivotError) as info:
        thomas_solve(sys)
    assert info.value.row == 1
    assert not sys.is_diagonally_dominant()


def test_tridiagonal_shape_validation():
    with pytest.raises(ValidationError):
        TridiagonalSystem(lower=np.zeros(2), diag=np.zeros(2),
                          upper=np.zeros(1), rhs=np.zeros(2))
