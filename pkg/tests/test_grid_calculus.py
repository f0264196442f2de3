import numpy as np
import pytest
from numpy import testing

from pseudoanalytic.errors import DomainMismatch, DomainTooSmall, NonFiniteField, PathNotOnGrid
from pseudoanalytic.grid_calculus import (
    BiquaternionField,
    GridDomain,
    ScalarField,
    VectorField,
    axis_path_integral,
    dirac_left,
    dirac_right,
    div,
    grad,
    interior,
    interior_norm,
    laplacian,
    leibniz_residual,
    relative_residual,
    rot,
)


def _quadratic(domain):
    return ScalarField.from_function(domain, lambda x, y, z: x**2 + 2 * y * z - 3 * z + 1)


def test_domain_validation():
    with pytest.raises(DomainTooSmall):
        GridDomain.cube((0, 0, 0), (1, 1, 1), 4)
    with pytest.raises(ValueError):
        GridDomain((0, 0, 0), (1, 0, 1), (5, 5, 5))
    d = GridDomain((0, 0, 0), (1, 2, 4), (5, 9, 17))
    assert d.spacing == (0.25, 0.25, 0.25)
    assert d.node_count == 5 * 9 * 17


def test_index_of_requires_a_node(unit_box):
    d = unit_box(5)
    assert d.index_of((0.25, 0.5, 1.0)) == (1, 2, 4)
    assert d.node((1, 2, 4)) == (0.25, 0.5, 1.0)
    with pytest.raises(PathNotOnGrid):
        d.index_of((0.3, 0.5, 1.0))
    with pytest.raises(PathNotOnGrid):
        d.index_of((1.25, 0.5, 1.0))


def test_fields_reject_non_finite_values(unit_box):
    values = np.zeros((5, 5, 5))
    values[2, 2, 2] = np.inf
    with pytest.raises(NonFiniteField):
        ScalarField(unit_box(5), values)


def test_field_arithmetic_checks_domains(unit_box):
    a = ScalarField.from_function(unit_box(5), lambda x, y, z: x)
    b = ScalarField.from_function(unit_box(6), lambda x, y, z: x)
    with pytest.raises(DomainMismatch):
        a + b
    v = VectorField.zeros(unit_box(5))
    with pytest.raises(TypeError):
        a + v
    testing.assert_allclose((a * 2 - a).values, a.values)


def test_gradient_is_exact_on_quadratics(unit_box):
    d = unit_box(7)
    x, y, z = d.mesh()
    g = grad(_quadratic(d))
    testing.assert_allclose(g.values, np.stack([2 * x, 2 * z, 2 * y - 3]), atol=1e-12)


def test_laplacian_is_exact_on_quadratics(unit_box):
    d = unit_box(7)
    phi = ScalarField.from_function(d, lambda x, y, z: x**2 + y**2 + z**2 + x * y)
    testing.assert_allclose(laplacian(phi).data, 6.0, atol=1e-10)


def test_rot_grad_and_div_rot_vanish(unit_box, smooth_scalar):
    d = unit_box(13)
    phi = smooth_scalar(d)
    assert rot(grad(phi)).max_abs() < 1e-10
    field = VectorField.from_function(d, lambda x, y, z: (np.sin(y * z), np.exp(x) * z, np.cos(x * y)))
    assert div(rot(field)).max_abs() < 1e-10


def test_dirac_square_is_minus_laplacian(unit_box, smooth_scalar):
    d = unit_box(13)
    phi = smooth_scalar(d)
    dd = dirac_left(dirac_left(phi))
    testing.assert_allclose(dd.values[0], -laplacian(phi).data, atol=1e-9)
    assert np.abs(dd.values[1:]).max() < 1e-9


def test_dirac_operators_on_a_vector_field(unit_box):
    d = unit_box(7)
    q = VectorField.from_function(d, lambda x, y, z: (y, z, x))
    left, right = dirac_left(q), dirac_right(q)
    # D Q = -div Q + rot Q, D_r Q = -div Q - rot Q
    testing.assert_allclose(left.values[0], 0.0, atol=1e-12)
    testing.assert_allclose(left.values[1:], -1.0 * np.ones((3, 7, 7, 7)), atol=1e-12)
    testing.assert_allclose(right.values[1:], np.ones((3, 7, 7, 7)), atol=1e-12)


def test_dirac_square_refines_at_second_order():
    residuals = []
    for n, exclude in ((17, 2), (33, 4)):
        d = GridDomain.cube((0, 0, 0), (1, 1, 1), n)
        phi = ScalarField.from_function(d, lambda x, y, z: np.sin(x) * np.cos(y) * np.exp(z))
        # -Δφ = φ for this φ
        err = dirac_left(dirac_left(phi)).values[0] - phi.data
        residuals.append(interior_norm(err, exclude) / interior_norm(phi.data, exclude))
    assert 3.5 <= residuals[0] / residuals[1] <= 4.5


def test_leibniz_rule_is_exact_for_linear_fields(unit_box):
    d = unit_box(6)
    p = BiquaternionField.from_function(d, lambda x, y, z: (1 + x, y, 2j * z, x - y))
    q = BiquaternionField.from_function(d, lambda x, y, z: (z, 1j * x, 3.0, y + z))
    assert leibniz_residual(p, q).max_abs() < 1e-10


def _polynomial_field(domain, coefficients):
    """Complex quadratic polynomial in every component."""
    x, y, z = domain.mesh()
    monomials = np.stack([np.ones_like(x), x, y, z, x * x, y * y, z * z, x * y, y * z, z * x])
    return BiquaternionField(domain, np.einsum("cm,m...->c...", coefficients, monomials))


def test_leibniz_residual_refines_at_second_order(unit_box, rng):
    cp, cq = (rng.normal(size=(4, 10)) + 1j * rng.normal(size=(4, 10)) for _ in range(2))
    coarse, fine = (
        leibniz_residual(_polynomial_field(d, cp), _polynomial_field(d, cq)).data for d in (unit_box(17), unit_box(33))
    )
    # compared on the nodes both grids share
    coarse, fine = np.abs(coarse[2:-2, 2:-2, 2:-2]), np.abs(fine[4:-4:2, 4:-4:2, 4:-4:2])
    assert np.linalg.norm(fine) > 0
    assert 3.5 <= np.linalg.norm(coarse) / np.linalg.norm(fine) <= 4.5


def test_interior_and_relative_norms(unit_box):
    d = unit_box(9)
    values = np.ones((1, *d.shape))
    assert interior(values, 2).shape == (1, 5, 5, 5)
    with pytest.raises(DomainTooSmall):
        interior(values, 5)
    assert relative_residual(np.zeros(d.shape), np.zeros(d.shape), exclude=2, spatial_ndim=3) == 0.0
    assert relative_residual(values, values, values, exclude=2) == pytest.approx(0.5)


def test_axis_path_integral_recovers_a_potential(unit_box):
    d = unit_box(9)
    phi = _quadratic(d)
    g = grad(phi)
    base = (2, 3, 4)
    got = axis_path_integral(g.values, d.spacing, base, (0, 1, 2), c=1.5)
    testing.assert_allclose(got, phi.data - phi.data[base] + 1.5, atol=1e-12)
    other = axis_path_integral(g.values, d.spacing, base, (2, 0, 1))
    testing.assert_allclose(other, phi.data - phi.data[base], atol=1e-12)


def test_rounding_noise_terms_fall_back_to_absolute_norm(rng):
    noise = 1e-15 * rng.normal(size=(9, 9, 9))
    assert relative_residual(noise, noise, exclude=2) < 1e-12
