import numpy as np
import pytest
from scipy.integrate import quad

from acaction import potential


def test_well_values():
    assert potential.well_value(1.0) == 0.0
    assert potential.well_value(-1.0) == 0.0
    assert potential.well_value(0.0) == 0.25
    assert potential.well_value(3.0) == 16.0


def test_well_derivative_values():
    assert potential.well_derivative(1.0) == 0.0
    assert potential.well_derivative(0.0) == 0.0
    assert potential.well_derivative(2.0) == 6.0


def test_well_nonfinite_rejected():
    with pytest.raises(ValueError):
        potential.well_value(np.nan)
    with pytest.raises(ValueError):
        potential.well_derivative(np.inf)


def test_well_is_even_and_nonnegative():
    r = np.linspace(-3, 3, 301)
    w = potential.well_value(r)
    assert np.all(w >= 0)
    np.testing.assert_allclose(w, potential.well_value(-r), rtol=0, atol=0)


def test_well_derivative_matches_finite_differences():
    r = np.linspace(-2.5, 2.5, 41)
    h = 1e-6
    fd = (potential.well_value(r + h) - potential.well_value(r - h)) / (2 * h)
    np.testing.assert_allclose(potential.well_derivative(r), fd, rtol=0, atol=5e-9)


def test_well_second_derivative_matches_finite_differences():
    r = np.linspace(-2.0, 2.0, 37)
    h = 1e-5
    fd = (potential.well_derivative(r + h) - potential.well_derivative(r - h)) / (2 * h)
    np.testing.assert_allclose(potential.well_second_derivative(r), fd, rtol=0, atol=1e-8)


def test_surface_tension_against_quadrature_oracle():
    # independent oracle: adaptive quadrature of sqrt(2 W) over [-1, 1]
    oracle, err = quad(lambda s: np.sqrt(2.0 * potential.well_value(s)), -1.0, 1.0, epsabs=1e-13)
    assert err < 1e-12
    assert abs(potential.surface_tension() - oracle) < 1e-12
    assert abs(potential.surface_tension() - 0.9428090416) < 1e-9
    assert potential.SURFACE_TENSION == potential.surface_tension()


def test_surface_tension_consistency_with_primitive():
    c0 = potential.surface_tension()
    assert abs(c0 - (potential.well_primitive(1.0) - potential.well_primitive(-1.0))) < 1e-15
    assert abs(c0 - 2.0 * potential.well_primitive(1.0)) < 1e-15


def test_well_primitive_values():
    assert potential.well_primitive(0.0) == 0.0
    oracle, _ = quad(lambda s: (1.0 - s * s) / np.sqrt(2.0), 0.0, 1.0)
    assert abs(potential.well_primitive(1.0) - oracle) < 1e-12
    assert abs(potential.well_primitive(1.0) - 0.4714045208) < 1e-9
    assert abs(potential.well_primitive(-1.0) + potential.well_primitive(1.0)) < 1e-15


def test_well_primitive_monotone_outside_wells():
    r = np.linspace(-2.5, 2.5, 401)
    g = potential.well_primitive(r)
    assert np.all(np.diff(g) > 0)
    # oracle for an overshoot value: quadrature of |1 - s^2|/sqrt(2)
    oracle, _ = quad(lambda s: abs(1.0 - s * s) / np.sqrt(2.0), 0.0, 1.7)
    assert abs(potential.well_primitive(1.7) - oracle) < 1e-10


def test_well_primitive_derivative_is_sqrt_2w():
    # rel. err < 1e-8 away from the wells where sqrt(2W) vanishes
    r = np.concatenate([np.linspace(-0.95, 0.95, 41), np.linspace(1.05, 2.0, 11)])
    h = 1e-6
    fd = (potential.well_primitive(r + h) - potential.well_primitive(r - h)) / (2 * h)
    target = np.sqrt(2.0 * potential.well_value(r))
    np.testing.assert_allclose(fd, target, rtol=1e-8)


def test_optimal_profile_limits_and_oddness():
    assert potential.optimal_profile(0.0) == 0.0
    assert abs(potential.optimal_profile(40.0) - 1.0) < 1e-15
    s = np.linspace(-4, 4, 33)
    np.testing.assert_allclose(
        potential.optimal_profile(-s), -potential.optimal_profile(s), rtol=0, atol=0
    )


def test_optimal_profile_solves_layer_equation():
    # closed-form residual; cross-checked with finite differences below
    s = 0.7
    residual = abs(
        potential.optimal_profile_curvature(s)
        - potential.well_derivative(potential.optimal_profile(s))
    )
    assert residual < 1e-12
    h = 1e-5
    q = potential.optimal_profile
    fd2 = (q(s + h) - 2 * q(s) + q(s - h)) / h**2
    assert abs(fd2 - potential.well_derivative(q(s))) < 1e-5


def test_profile_equipartition_identity():
    # (1/2) q'(s)^2 == W(q(s)); q' = (1 - q^2)/sqrt(2) in closed form
    s = np.linspace(-6, 6, 100)
    q = potential.optimal_profile(s)
    qprime = (1.0 - q**2) / np.sqrt(2.0)
    np.testing.assert_allclose(0.5 * qprime**2, potential.well_value(q), rtol=0, atol=1e-12)
