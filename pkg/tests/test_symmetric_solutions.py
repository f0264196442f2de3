import numpy as np
import pytest
from numpy import testing

from pseudoanalytic.errors import AxisInDomain, NotHarmonic, NotOrthogonal, NotParallel
from pseudoanalytic.grid_calculus import ScalarField, dirac_left, field_mul, interior_norm
from pseudoanalytic.symmetric_solutions import (
    HarmonicFunctionSpec,
    HarmonicKind,
    closed_form_psi,
    cylindrical_triplet,
    factorizer_from_profile,
    orthogonal_solution,
    parallel_solution,
    radial_factorizer,
    schrodinger_from_symmetry,
    triplet_vekua_residual,
)
from pseudoanalytic.vekua_ops import d_minus_m_residual, op_V1bar, schrodinger_residual, v1bar_residual


@pytest.mark.parametrize(
    ("text", "kind", "coefficients"),
    [
        ("log-r-cyl", HarmonicKind.LOG_R_CYL, (1.0, 0.0, 0.0)),
        ("z", HarmonicKind.Z_COORD, (1.0, 0.0, 0.0)),
        ("x2", HarmonicKind.LINEAR, (0.0, 1.0, 0.0)),
        ("linear:1,-2,0.5", HarmonicKind.LINEAR, (1.0, -2.0, 0.5)),
    ],
)
def test_parse_harmonic_spec(text, kind, coefficients):
    spec = HarmonicFunctionSpec.parse(text)
    assert spec.kind is kind
    assert spec.coefficients == coefficients


def test_unknown_harmonic_spec():
    with pytest.raises(ValueError):
        HarmonicFunctionSpec.parse("sinh")


def test_singular_harmonics_need_a_box_away_from_the_axis(unit_box):
    with pytest.raises(AxisInDomain):
        HarmonicFunctionSpec.parse("theta-cyl").evaluate(unit_box(9))
    with pytest.raises(AxisInDomain):
        HarmonicFunctionSpec.parse("inv-r-sph").gradient(unit_box(9))
    with pytest.raises(AxisInDomain):
        factorizer_from_profile("r-cyl", unit_box(9))


def test_custom_harmonic_is_validated(unit_box):
    domain = unit_box(9)
    good = HarmonicFunctionSpec.custom(ScalarField.from_function(domain, lambda x, y, z: x * y - z))
    good.validate(domain)
    bad = HarmonicFunctionSpec.custom(ScalarField.from_function(domain, lambda x, y, z: x**2))
    with pytest.raises(NotHarmonic):
        bad.validate(domain)


def test_parallel_gradients_give_exact_solutions(cyl_box, h2_bound):
    domain = cyl_box(17)
    F = factorizer_from_profile("r-cyl", domain)
    F_par, G_par = parallel_solution(F, HarmonicFunctionSpec.parse("log-r-cyl"))
    assert v1bar_residual(F_par, F) <= h2_bound(domain)
    assert d_minus_m_residual(G_par, F) <= h2_bound(domain)


@pytest.mark.parametrize("rho", ["theta-cyl", "z"])
def test_orthogonal_gradients_give_exact_solutions(rho, cyl_box, h2_bound):
    domain = cyl_box(17)
    F = factorizer_from_profile("r-cyl", domain)
    F_orth, G_orth = orthogonal_solution(F, HarmonicFunctionSpec.parse(rho))
    assert v1bar_residual(F_orth, F) <= h2_bound(domain)
    assert d_minus_m_residual(G_orth, F) <= h2_bound(domain)


def test_pairing_preconditions(cyl_box):
    F = factorizer_from_profile("r-cyl", cyl_box(9))
    with pytest.raises(NotParallel):
        parallel_solution(F, HarmonicFunctionSpec.parse("z"))
    with pytest.raises(NotOrthogonal):
        orthogonal_solution(F, HarmonicFunctionSpec.parse("log-r-cyl"))


def test_triplet_determinant_and_representation(cyl_box, rng):
    domain = cyl_box(9)
    F = factorizer_from_profile("r-cyl", domain)
    T = cylindrical_triplet(F)
    x, y, _ = domain.mesh()
    r = np.sqrt(x**2 + y**2)
    testing.assert_allclose(T.determinant(), 1.0 / r, rtol=1e-10)
    phis = tuple(ScalarField(domain, rng.normal(size=domain.shape)) for _ in range(3))
    back = T.represent(T.compose(phis))
    for a, b in zip(back, phis):
        testing.assert_allclose(a.values, b.values, atol=1e-10)


def test_triplet_coordinates_carry_the_successor_operator(cyl_box, h2_bound):
    domain = cyl_box(17)
    F = factorizer_from_profile("r-cyl", domain)
    T = cylindrical_triplet(F)
    phis = (
        ScalarField.from_function(domain, lambda x, y, z: z + 0 * x),
        ScalarField.from_function(domain, lambda x, y, z: 0.5 * x + 0 * z),
        ScalarField.from_function(domain, lambda x, y, z: y * z),
    )
    w = T.compose(phis)
    # every Fk solves (D + M) Fk = 0, so (D + M) w = Σ (D φk) Fk
    expected = sum(
        (field_mul(dirac_left(phi), Fk) for phi, Fk in zip(phis[1:], T.elements[1:])),
        field_mul(dirac_left(phis[0]), T.F1),
    )
    rel = interior_norm(op_V1bar(w, F) - expected, 2) / interior_norm(expected, 2)
    assert rel <= h2_bound(domain)
    constant = tuple(ScalarField(domain, np.full(domain.shape, v)) for v in (1.0, -2.0, 0.5))
    assert triplet_vekua_residual(*constant, T) == 0.0


def test_schrodinger_from_cylindrical_symmetry(cyl_box, h2_bound):
    domain = cyl_box(17)
    F = factorizer_from_profile("r-cyl", domain)
    rho = HarmonicFunctionSpec.parse("log-r-cyl")
    psi = schrodinger_from_symmetry(F, rho)
    assert schrodinger_residual(psi, F.q) <= h2_bound(domain)
    particular, kernel = closed_form_psi("r-cyl", rho, domain)
    c = (psi.data[0, 0, 0] - particular[0, 0, 0]) / kernel[0, 0, 0]
    expected = particular + c * kernel
    assert np.max(np.abs(psi.data - expected)) <= h2_bound(domain) * np.max(np.abs(expected))


def test_schrodinger_from_spherical_symmetry(sph_box, h2_bound):
    domain = sph_box(17)
    F = factorizer_from_profile("inv-r-sph", domain)
    rho = HarmonicFunctionSpec.parse("inv-r-sph")
    psi = schrodinger_from_symmetry(F, rho)
    assert schrodinger_residual(psi, F.q) <= h2_bound(domain)
    particular, kernel = closed_form_psi("inv-r-sph", rho, domain)
    c = (psi.data[0, 0, 0] - particular[0, 0, 0]) / kernel[0, 0, 0]
    testing.assert_allclose(psi.data, particular + c * kernel, atol=h2_bound(domain))


def test_radial_factorizer_matches_profile(cyl_box):
    domain = cyl_box(9)
    F = radial_factorizer(domain, lambda r: r)
    testing.assert_allclose(F.f.values, factorizer_from_profile("r-cyl", domain).f.values)


def test_no_closed_form_for_custom_harmonics(unit_box):
    domain = unit_box(9)
    rho = HarmonicFunctionSpec.custom(ScalarField.from_function(domain, lambda x, y, z: x))
    assert closed_form_psi("one", rho, domain) is None
    assert closed_form_psi("x1", HarmonicFunctionSpec.parse("x1"), domain) is None
