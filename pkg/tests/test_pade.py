"""Tests for the rational sqrt approximant behind the absorbing boundary."""

import math

import numpy as np
import pytest

from dplheat import PadeAbc, PadePoleError, ValidationError, default_z0
from dplheat.pade import pade_coefficients, pade_sqrt


def test_coefficients_n1_closed_form():
    # b_1 = cos^2(pi/3) = 1/4, a_1 = (2/3) sin^2(pi/3) = 1/2
    a, b = pade_coefficients(1)
    assert a[0] == pytest.approx(0.5, abs=1e-15)
    assert b[0] == pytest.approx(0.25, abs=1e-15)


def test_coefficients_n2_frozen():
    a, b = pade_coefficients(2)
    np.testing.assert_allclose(
        a, [0.13819660112501053, 0.3618033988749895], rtol=0, atol=1e-16)
    np.testing.assert_allclose(
        b, [0.6545084971874737, 0.09549150281252627], rtol=0, atol=1e-16)


def test_sum_telescopes_to_odd_integer():
    """1 + sum a_n/b_n collapses to 2N+1 for every order."""
    for N in range(1, 17):
        pade = PadeAbc.make(N, 1.0)
        assert abs(pade.sum_ab - (2 * N + 1)) < 1e-12 * (2 * N + 1)
        # and a_n = 2(1 - b_n)/(2N+1) ties the two arrays together
        np.testing.assert_allclose(
            pade.a, 2.0 * (1.0 - pade.b) / (2 * N + 1), rtol=1e-14)


def test_coefficient_ranges():
    for N in (1, 2, 3, 5, 9, 16):
        a, b = pade_coefficients(N)
        assert np.all(a > 0)
        assert np.all((b > 0) & (b < 1))
        assert np.all(np.diff(b) < 0)


def test_exact_at_expansion_point():
    for z0 in (0.5, 1.0, 2.4, 12.0):
        pade = PadeAbc.make(4, z0)
        assert pade_sqrt(z0, pade) == pytest.approx(math.sqrt(z0), abs=1e-15)


def test_value_n1_by_hand():
    # u = -1, term = 0.5*(-1)/(1 + 0.25) = -0.4, result = 1.4
    pade = PadeAbc.make(1, 1.0)
    assert pade_sqrt(2.0, pade) == pytest.approx(1.4, abs=1e-15)


def test_saturates_at_odd_multiple():
    """For z far above z0 the approximant levels off at sqrt(z0)*(2N+1)."""
    for N in (1, 3, 5):
        pade = PadeAbc.make(N, 2.0)
        cap = math.sqrt(2.0) * (2 * N + 1)
        assert pade_sqrt(1e12, pade) == pytest.approx(cap, rel=1e-9)
        # and never exceeds the cap on the way up
        for z in np.geomspace(2.0, 1e12, 40):
            assert pade_sqrt(float(z), pade) <= cap * (1 + 1e-12)


def test_accuracy_improves_with_order():
    """Relative error shrinks like rho^(2N+1) with rho = |1-sqrt(z/z0)|/(1+sqrt(z/z0))."""
    rng = np.random.default_rng(20260819)
    for _ in range(100):
        z0 = float(10.0 ** rng.uniform(-0.3, 1.3))
        z = float(z0 * 10.0 ** rng.uniform(-1.3, 1.3))
        lo = PadeAbc.make(3, z0)
        hi = PadeAbc.make(12, z0)
        err_lo = abs(pade_sqrt(z, lo) - math.sqrt(z)) / math.sqrt(z)
        err_hi = abs(pade_sqrt(z, hi) - math.sqrt(z)) / math.sqrt(z)
        assert err_hi <= err_lo * (1 + 1e-9) + 1e-15
        r = math.sqrt(z / z0)
        rho = abs(1 - r) / (1 + r)
        assert err_hi <= 10.0 * rho ** 25 + 1e-15


def test_accurate_near_expansion_point():
    rng = np.random.default_rng(7)
    pade = PadeAbc.make(12, 2.4)
    for _ in range(50):
        z = float(pade.z0 * rng.uniform(0.6, 1.6))
        assert abs(pade_sqrt(z, pade) - math.sqrt(z)) < 1e-12 * math.sqrt(z)


def test_pole_is_detected():
    # denominator 1 - b_1 (1 - z/z0) vanishes at z = z0 (1 - 1/b_1) = -3
    pade = PadeAbc.make(1, 1.0)
    with pytest.raises(PadePoleError) as info:
        pade_sqrt(-3.0, pade)
    assert info.value.n == 1
    assert info.value.z == -3.0


def test_default_z0_values():
    assert default_z0(1.0, 0.2) == pytest.approx(2.4, abs=1e-15)
    assert default_z0(2.0, 3.0) == pytest.approx(12.0, abs=1e-15)
    assert default_z0(0.0, 1.0) == 2.0


def test_validation():
    with pytest.raises(ValidationError):
        pade_coefficients(0)
    with pytest.raises(ValidationError):
        pade_coefficients(2.5)
    with pytest.raises(ValidationError):
        PadeAbc.make(3, 0.0)
    with pytest.raises(ValidationError):
        PadeAbc.make(3, float("nan"))
    with pytest.raises(ValidationError):
        default_z0(-0.1, 1.0)
    a, b = pade_coefficients(2)
    with pytest.raises(ValidationError):
        PadeAbc(N=2, z0=1.0, a=a, b=b[::-1].copy(), sum_ab=5.0)  # not decreasing
