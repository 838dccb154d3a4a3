import numpy as np
import pytest

from acaction.mesh import (
    Grid,
    ScalarField,
    gradient,
    gradient_pairing,
    gradient_squared,
    integrate,
    laplacian,
)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid.line(1.0, 2)
    with pytest.raises(ValueError):
        Grid((1.0,), (11,), bc="dirichlet")
    with pytest.raises(ValueError):
        Grid((-1.0,), (11,))


def test_grid_spacing_conventions():
    g = Grid.line(2.0, 11, bc="neumann")
    assert g.spacings == (0.2,)
    gp = Grid.line(2.0, 10, bc="periodic")
    assert gp.spacings == (0.2,)
    g2 = Grid.box((1.0, 3.0), (11, 31))
    assert g2.spacings == (0.1, 0.1)
    assert g2.dim == 2


def test_field_validation():
    g = Grid.line(1.0, 5)
    with pytest.raises(ValueError):
        ScalarField(g, np.zeros(4))
    with pytest.raises(ValueError):
        ScalarField(g, np.array([0.0, 1.0, np.nan, 0.0, 0.0]))


def test_gradient_constant_and_linear():
    g = Grid.line(1.0, 21)
    zero = gradient(ScalarField.constant(g, 3.5))[0]
    assert np.all(zero.values == 0.0)
    f = ScalarField.from_function(g, lambda x: x)
    gx = gradient(f)[0].values
    np.testing.assert_allclose(gx[1:-1], 1.0, rtol=0, atol=1e-13)


def test_gradient_exact_on_quadratics_interior():
    g = Grid.line(1.0, 21)
    f = ScalarField.from_function(g, lambda x: x**2)
    gx = gradient(f)[0].values
    i = 10  # x = 0.5
    assert abs(gx[i] - 1.0) < 1e-13


def test_laplacian_linear_and_quadratic():
    g = Grid.line(1.0, 21)
    lin = laplacian(ScalarField.from_function(g, lambda x: 2 * x + 1)).values
    np.testing.assert_allclose(lin[1:-1], 0.0, rtol=0, atol=1e-11)
    quad = laplacian(ScalarField.from_function(g, lambda x: x**2)).values
    np.testing.assert_allclose(quad[1:-1], 2.0, rtol=0, atol=1e-9)


def test_laplacian_2d_quadratic():
    g = Grid.box((1.0, 1.0), (17, 19))
    f = ScalarField.from_function(g, lambda x, y: x**2 + y**2)
    lap = laplacian(f).values
    np.testing.assert_allclose(lap[1:-1, 1:-1], 4.0, rtol=0, atol=1e-9)


def test_integrate_measures_and_linears():
    g = Grid.line(2.0, 41)
    assert abs(integrate(ScalarField.constant(g, 1.0)) - 2.0) < 1e-14
    g1 = Grid.line(1.0, 101)
    f = ScalarField.from_function(g1, lambda x: x)
    assert abs(integrate(f) - 0.5) < 1e-12


def test_integrate_sine_quadrature_oracle():
    g = Grid.line(1.0, 201)
    f = ScalarField.from_function(g, lambda x: np.sin(np.pi * x))
    assert abs(integrate(f) - 2.0 / np.pi) < 1e-4


def test_integrate_periodic_rectangle_rule():
    # exact for trigonometric polynomials below the Nyquist mode
    g = Grid.line(1.0, 32, bc="periodic")
    f = ScalarField.from_function(g, lambda x: 1.0 + np.cos(2 * np.pi * x))
    assert abs(integrate(f) - 1.0) < 1e-13


@pytest.mark.parametrize("bc", ["neumann", "periodic"])
@pytest.mark.parametrize("dim", [1, 2])
def test_summation_by_parts_exact(bc, dim):
    rng = np.random.default_rng(42)
    if dim == 1:
        g = Grid.line(1.3, 33, bc=bc)
        f = ScalarField(g, rng.standard_normal(g.shape))
        k = ScalarField(g, rng.standard_normal(g.shape))
    else:
        g = Grid.box((1.0, 0.7), (17, 13), bc=bc)
        f = ScalarField(g, rng.standard_normal(g.shape))
        k = ScalarField(g, rng.standard_normal(g.shape))
    lhs = integrate(ScalarField(g, f.values * laplacian(k).values))
    rhs = -gradient_pairing(f, k)
    assert abs(lhs - rhs) < 1e-10


def test_gradient_squared_matches_pairing():
    rng = np.random.default_rng(7)
    g = Grid.line(1.0, 29)
    f = ScalarField(g, rng.standard_normal(g.shape))
    lhs = integrate(gradient_squared(f))
    rhs = gradient_pairing(f, f)
    assert abs(lhs - rhs) < 1e-12


def test_operators_are_linear():
    rng = np.random.default_rng(3)
    g = Grid.box((1.0, 1.0), (9, 11), bc="periodic")
    a = rng.standard_normal(g.shape)
    b = rng.standard_normal(g.shape)
    lap_sum = laplacian(ScalarField(g, a + 2.0 * b)).values
    lap_parts = laplacian(ScalarField(g, a)).values + 2.0 * laplacian(ScalarField(g, b)).values
    np.testing.assert_allclose(lap_sum, lap_parts, rtol=1e-12, atol=1e-12)
    neg = gradient(ScalarField(g, -a))[0].values
    pos = gradient(ScalarField(g, a))[0].values
    np.testing.assert_array_equal(neg, -pos)
