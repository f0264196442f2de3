import numpy as np
import pytest
from numpy import testing

from pseudoanalytic.errors import CompatibilityViolated, NonvanishingViolation, NotAGeneratingPair, PathNotOnGrid
from pseudoanalytic.grid_calculus import relative_residual
from pseudoanalytic.vekua2d import (
    ComplexField2D,
    GeneratingPair,
    antiderivative_2d,
    associated_potential,
    bers_derivative_2d,
    bers_derivative_2d_second_form,
    characteristic_coefficients,
    conjugate_2d,
    conjugate_2d_inverse,
    d_z,
    d_zbar,
    decompose,
    factorization_residual_2d,
    fg_antiderivative_residual,
    fg_integral,
    generating_pair,
    main_vekua_residual,
    operator_A,
    operator_Abar,
    schrodinger_residual_2d,
    staircase_path,
    v1_residual_2d,
)

SQRT2 = np.sqrt(2.0)


def _exp_f(domain):
    return ComplexField2D.from_function(domain, lambda x, y: np.exp(x) + 0 * y)


def _exp_solution(domain):
    """Conjugate completion of e^{√2 x} cos y for f = e^x."""
    f = _exp_f(domain)
    W1 = ComplexField2D.from_function(domain, lambda x, y: np.exp(SQRT2 * x) * np.cos(y))
    return f, W1, conjugate_2d(W1, f)


def _rel2d(residual, *terms):
    return relative_residual(residual, *terms, exclude=2, spatial_ndim=2)


def test_complex_derivatives_of_z(unit_square):
    domain = unit_square(9)
    z = ComplexField2D.from_function(domain, lambda x, y: x + 1j * y)
    testing.assert_allclose(d_z(z).values, 1.0, atol=1e-12)
    testing.assert_allclose(d_zbar(z).values, 0.0, atol=1e-12)
    testing.assert_allclose(d_z(z.conj()).values, 0.0, atol=1e-12)
    testing.assert_allclose(d_zbar(z.conj()).values, 1.0, atol=1e-12)


def test_pair_must_be_positively_oriented(unit_square):
    domain = unit_square(9)
    one = ComplexField2D(domain, 1.0)
    with pytest.raises(NotAGeneratingPair):
        GeneratingPair(one, one)
    x = ComplexField2D.from_function(domain, lambda x, y: x)
    with pytest.raises(NonvanishingViolation):
        generating_pair(x)


def test_trivial_pair_has_vanishing_characteristics(unit_square):
    pair = generating_pair(ComplexField2D(unit_square(9), 1.0))
    testing.assert_allclose(pair.G.values, 1j)
    for coefficient in characteristic_coefficients(pair):
        testing.assert_allclose(coefficient.values, 0.0, atol=1e-12)


def test_exponential_pair_characteristics_and_successor(unit_square):
    f = _exp_f(unit_square(33))
    a, b, A, B = characteristic_coefficients(generating_pair(f))
    testing.assert_allclose(a.values, 0.0, atol=1e-3)
    testing.assert_allclose(A.values, 0.0, atol=1e-3)
    testing.assert_allclose(b.values, 0.5, atol=1e-3)
    testing.assert_allclose(B.values, 0.5, atol=1e-3)
    # f depends on x only, so (1/f, i f) is the successor pair: a1 = a, b1 = -B
    a1, b1, _, _ = characteristic_coefficients(generating_pair(1.0 / f))
    testing.assert_allclose(a1.values, a.values, atol=1e-3)
    testing.assert_allclose(b1.values, -B.values, atol=1e-3)


def test_decompose_recovers_real_coordinates(unit_square, rng):
    domain = unit_square(9)
    pair = generating_pair(_exp_f(domain))
    W = ComplexField2D(domain, rng.normal(size=domain.shape) + 1j * rng.normal(size=domain.shape))
    phi, psi = decompose(W, pair)
    testing.assert_allclose(phi.values.imag, 0.0)
    testing.assert_allclose((phi * pair.F + psi * pair.G).values, W.values, rtol=1e-12, atol=1e-12)


def test_derivative_of_z_squared(unit_square):
    domain = unit_square(17)
    one = ComplexField2D(domain, 1.0)
    z = ComplexField2D.from_function(domain, lambda x, y: x + 1j * y)
    testing.assert_allclose(bers_derivative_2d(z * z, one).values, 2 * z.values, atol=1e-10)


def test_operator_A_integrates_the_z_derivative(unit_square):
    domain = unit_square(17, origin=(-1.0, -1.0))
    x, y = domain.mesh()
    Phi = ComplexField2D.from_function(domain, lambda x, y: x + 1j * y)
    testing.assert_allclose(operator_A(Phi).values, x**2 - y**2, atol=1e-12)
    testing.assert_allclose(operator_Abar(Phi.conj()).values, x**2 - y**2, atol=1e-12)
    with pytest.raises(CompatibilityViolated):
        operator_A(ComplexField2D.from_function(domain, lambda x, y: 1j * x))


def test_harmonic_conjugate_for_trivial_f(unit_square):
    domain = unit_square(64)
    x, y = domain.mesh()
    W1 = ComplexField2D.from_function(domain, lambda x, y: x**2 - y**2)
    W = conjugate_2d(W1, ComplexField2D(domain, 1.0))
    testing.assert_allclose(W.values.real, x**2 - y**2, atol=1e-10)
    testing.assert_allclose(W.values.imag, 2 * x * y, atol=1e-10)


def test_exponential_conjugate_solves_the_vekua_system(unit_square, h2_bound):
    domain = unit_square(33)
    f, W1, W = _exp_solution(domain)
    bound = h2_bound(domain)
    testing.assert_allclose(W.values.real, W1.values.real)
    assert main_vekua_residual(W, f) <= bound
    Wd = bers_derivative_2d(W, f)
    assert v1_residual_2d(Wd, f) <= bound
    assert schrodinger_residual_2d(W.imag, associated_potential(f)) <= bound
    assert _rel2d(bers_derivative_2d_second_form(W, f).values - Wd.values, Wd.values) <= bound


def test_inverse_conjugate_recovers_the_real_part(unit_square, h2_bound):
    domain = unit_square(33)
    f, W1, W = _exp_solution(domain)
    back = conjugate_2d_inverse(W.imag, f)
    # the real part is fixed up to c f; the path integral vanishes at the origin node
    c = W1.values[0, 0] / f.values[0, 0]
    assert _rel2d(back.values.real + c * f.values - W1.values, W1.values) <= h2_bound(domain)
    assert main_vekua_residual(back, f) <= h2_bound(domain)


@pytest.mark.parametrize("order", ["V1bar_V", "V1_Vbar"])
def test_planar_factorization(order, unit_square, h2_bound):
    domain = unit_square(33)
    f = _exp_f(domain)
    phi = ComplexField2D.from_function(domain, lambda x, y: np.sin(x) * np.cos(y))
    # (Δ - q) φ / 4 with Δφ = -2φ and q = 1
    reference = phi * -0.75
    assert factorization_residual_2d(phi, f, order=order, reference=reference) <= h2_bound(domain)


def test_antiderivative_of_one_is_z(unit_square):
    domain = unit_square(17, origin=(0.5, -0.5))
    one = ComplexField2D(domain, 1.0)
    x, y = domain.mesh()
    w = antiderivative_2d(one, one)
    testing.assert_allclose(w.values, (x - 0.5) + 1j * (y + 0.5), atol=1e-12)


def test_antiderivative_inverts_the_exponential_derivative(unit_square, h2_bound):
    domain = unit_square(33)
    f, _, W = _exp_solution(domain)
    Phi = bers_derivative_2d(W, f)
    w = antiderivative_2d(Phi, f)
    assert main_vekua_residual(w, f) <= h2_bound(domain)
    back = bers_derivative_2d(w, f)
    assert _rel2d(back.values - Phi.values, Phi.values) <= h2_bound(domain)


def test_fg_integral_is_path_independent(unit_square, h2_bound):
    domain = unit_square(33)
    f, _, W = _exp_solution(domain)
    pair = generating_pair(f)
    Wd = bers_derivative_2d(W, f)
    x_first = staircase_path(domain, (2, 3), (28, 25), first_axis=0)
    y_first = staircase_path(domain, (2, 3), (28, 25), first_axis=1)
    assert x_first[0] == y_first[0] == (2, 3)
    assert x_first[-1] == y_first[-1] == (28, 25)
    a, b = fg_integral(Wd, pair, x_first), fg_integral(Wd, pair, y_first)
    assert abs(a - b) <= h2_bound(domain) * abs(a)
    assert fg_antiderivative_residual(W, f, x_first) <= h2_bound(domain)


def test_staircase_must_stay_on_grid(unit_square):
    with pytest.raises(PathNotOnGrid):
        staircase_path(unit_square(9), (0, 0), (9, 2))
