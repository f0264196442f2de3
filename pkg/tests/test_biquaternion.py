import numpy as np
import pytest
from numpy import testing

from pseudoanalytic.biquaternion import (
    E0,
    E1,
    E2,
    E3,
    Biquaternion,
    complex_conj_components,
    hamilton_product,
    mul,
    quat_conj,
    quat_conj_components,
    right_mul,
    sc,
    vec,
)
from pseudoanalytic.errors import NonFiniteField


def _random(rng, n):
    return rng.normal(size=(4, n)) + 1j * rng.normal(size=(4, n))


def test_basis_relations():
    units = (E1, E2, E3)
    for e in units:
        assert (e * e).isclose(-E0)
    assert (E1 * E2).isclose(E3)
    assert (E2 * E3).isclose(E1)
    assert (E3 * E1).isclose(E2)
    for a in units:
        for b in units:
            if a is not b:
                assert (a * b).isclose(-(b * a))


def test_imaginary_unit_commutes_with_basis():
    i = Biquaternion.scalar(1j)
    for e in (E1, E2, E3):
        assert (i * e).isclose(e * i)


def test_associativity(rng):
    p, q, r = (_random(rng, 10_000) for _ in range(3))
    lhs = hamilton_product(hamilton_product(p, q), r)
    rhs = hamilton_product(p, hamilton_product(q, r))
    testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.abs(lhs).max())


def test_quaternionic_conjugation_reverses_products(rng):
    p, q = _random(rng, 10_000), _random(rng, 10_000)
    lhs = quat_conj_components(hamilton_product(p, q))
    rhs = hamilton_product(quat_conj_components(q), quat_conj_components(p))
    testing.assert_allclose(lhs, rhs, atol=1e-12 * np.abs(lhs).max())


def test_complex_conjugation_is_multiplicative(rng):
    p, q = _random(rng, 1000), _random(rng, 1000)
    lhs = complex_conj_components(hamilton_product(p, q))
    rhs = hamilton_product(complex_conj_components(p), complex_conj_components(q))
    testing.assert_allclose(lhs, rhs, atol=1e-12 * np.abs(lhs).max())


def test_scalar_part_is_a_trace(rng):
    p, q = _random(rng, 10_000), _random(rng, 10_000)
    testing.assert_allclose(hamilton_product(p, q)[0], hamilton_product(q, p)[0], atol=1e-12 * np.abs(p).max() ** 2)


def test_product_formula_matches_dot_and_cross():
    p = Biquaternion.from_parts(1, 2j, 0, 1)
    q = Biquaternion.from_parts(0, 1, 1j, 2)
    pv, qv = p.vector, q.vector
    expected0 = p.q0 * q.q0 - np.dot(pv, qv)
    expected_v = p.q0 * qv + q.q0 * pv + np.cross(pv, qv)
    prod = mul(p, q)
    testing.assert_allclose(prod.q0, expected0)
    testing.assert_allclose(prod.vector, expected_v)


def test_zero_divisors_exist():
    a = Biquaternion.from_parts(1, 1j)
    b = Biquaternion.from_parts(1, -1j)
    assert (a * b).isclose(Biquaternion.scalar(0))


def test_conjugations_and_parts():
    q = Biquaternion.from_parts(1 + 1j, 2, 3j, -4)
    assert quat_conj(q).isclose(Biquaternion.from_parts(1 + 1j, -2, -3j, 4))
    assert sc(q) == 1 + 1j
    assert vec(q).isclose(Biquaternion.from_parts(0, 2, 3j, -4))
    assert (q - vec(q)).isclose(Biquaternion.scalar(1 + 1j))


def test_right_multiplication_operator():
    p = Biquaternion.from_parts(0, 1, 2, 3)
    q = Biquaternion.from_parts(1, 0, 1j, 0)
    assert right_mul(p)(q).isclose(q * p)
    assert not right_mul(p)(q).isclose(p * q)


def test_scaling_from_both_sides():
    q = Biquaternion.from_parts(1, 2, 3, 4)
    assert (2j * q).isclose(q * 2j)
    testing.assert_allclose((2 * q).components, [2, 4, 6, 8])


def test_non_finite_components_are_rejected():
    with pytest.raises(NonFiniteField):
        Biquaternion.from_parts(np.nan, 0, 0, 0)


def test_components_are_read_only():
    q = Biquaternion.from_parts(1, 2, 3, 4)
    with pytest.raises(ValueError):
        q.components[0] = 5
