from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qtoda.series import (
    TYPE_A,
    TYPE_B,
    ConeMembershipError,
    ConeVariant,
    TruncatedSeries,
    VariantMismatchError,
    add,
    cone_coords,
    constant,
    degree,
    in_cone,
    iter_cone_monomials,
    monomial,
    monomials_of_degree,
    mul,
    mul_monomial,
    ordered_exponents,
    scale,
    shift,
    zero,
)


A2 = ConeVariant(TYPE_A, 2)
A3 = ConeVariant(TYPE_A, 3)
B1 = ConeVariant(TYPE_B, 1)
B2 = ConeVariant(TYPE_B, 2)


def test_cone_coords_type_a():
    mono = cone_coords((-1, 1), A2)
    assert mono.coords == (1,)
    assert mono.degree == 1
    assert cone_coords((-3, 1, 2), A3).coords == (3, 2)


def test_cone_coords_type_b():
    assert cone_coords((0, -1), B2).coords == (0, 1)
    # x_1^{-1} は次数 N+1-1 = 2
    assert cone_coords((-1, 0), B2).degree == 2
    assert cone_coords((-2,), B1).degree == 2


def test_cone_membership_error_names_the_coordinate():
    with pytest.raises(ConeMembershipError) as info:
        cone_coords((1, -1), A2)
    assert info.value.coordinate == "a1"
    assert info.value.value == -1
    with pytest.raises(ConeMembershipError) as info:
        cone_coords((0, -1), A2)
    assert info.value.coordinate == "b"
    assert not in_cone((1,), B1)
    assert in_cone((-1,), B1)


def test_variant_validation():
    with pytest.raises(ValueError):
        ConeVariant("TypeC", 2)
    with pytest.raises(ValueError):
        ConeVariant(TYPE_A, 0)
    assert A3.generators().shape == (2, 3)
    assert B2.generators().tolist() == [[-1, 1], [0, -1]]


def test_monomials_of_degree():
    assert monomials_of_degree(A3, 1) == [(-1, 1, 0), (0, -1, 1)]
    assert monomials_of_degree(A2, 0) == [(0, 0)]
    assert len(monomials_of_degree(B2, 2)) == 3
    assert monomials_of_degree(ConeVariant(TYPE_A, 1), 0) == [(0,)]
    assert monomials_of_degree(ConeVariant(TYPE_A, 1), 2) == []
    degrees = [cone_coords(m, B2).degree for m in iter_cone_monomials(B2, 3)]
    assert degrees == sorted(degrees)


def test_series_drops_zero_and_out_of_order_terms():
    f = TruncatedSeries(A2, 1, {(0, 0): 1, (-1, 1): 0, (-2, 2): 5})
    assert f.terms == {(0, 0): Fraction(1)}
    assert len(f) == 1
    assert not f.is_zero()
    assert zero(A2, 3).is_zero()


def test_series_rejects_exponents_outside_the_cone():
    with pytest.raises(ConeMembershipError):
        TruncatedSeries(A2, 2, {(1, -1): 1})


def test_mul_truncates():
    u = (-1, 1)
    f = add(constant(A2, 2), monomial(A2, 2, u))
    g = mul(f, f)
    assert g.terms == {(-2, 2): 1, (-1, 1): 2, (0, 0): 1}
    h = mul(f.truncate(1), f)
    assert h.order == 1
    assert h.terms == {(-1, 1): 2, (0, 0): 1}


def test_mul_monomial_order():
    f = constant(B1, 1)
    g = mul_monomial(f, (-1,), order=2)
    assert g.order == 2
    assert g.terms == {(-1,): 1}
    with pytest.raises(ValueError):
        mul_monomial(f, (-1,), order=3)
    with pytest.raises(ConeMembershipError):
        mul_monomial(f, (1,))


def test_shift():
    f = monomial(A2, 1, (-1, 1), 3)
    assert shift(f, 2, 1, Fraction(1, 2)).coefficient((-1, 1)) == Fraction(3, 2)
    assert shift(f, 1, 1, Fraction(1, 2)).coefficient((-1, 1)) == 6
    assert shift(f, 1, -1, Fraction(1, 2)).coefficient((-1, 1)) == Fraction(3, 2)
    with pytest.raises(ValueError):
        shift(f, 3, 1, 2)


def test_embed():
    f = add(constant(A2, 2), monomial(A2, 2, (-1, 1), 4))
    assert f.embed(B2).terms == {(-1, 1): 4, (0, 0): 1}
    assert f.embed(A3).terms == {(-1, 1, 0): 4, (0, 0, 0): 1}
    assert f.embed(A3).order == 2
    with pytest.raises(VariantMismatchError):
        f.embed(B2).embed(A2)
    with pytest.raises(ValueError):
        f.embed(ConeVariant(TYPE_A, 1))


def test_variant_mismatch():
    with pytest.raises(VariantMismatchError):
        add(constant(A2, 1), constant(B2, 1))


def test_operators_and_equality():
    f = add(constant(B1, 2), monomial(B1, 2, (-1,), "1/3"))
    assert f - f == zero(B1, 2)
    assert -f == scale(f, -1)
    assert f + f == scale(f, 2)
    assert f * constant(B1, 2) == f
    assert f != f.truncate(1)


def test_json():
    f = add(constant(B1, 2), monomial(B1, 2, (-1,), Fraction(21, 25)))
    data = f.to_json()
    assert data == {
        "variant": "TypeB",
        "n": 1,
        "order": 2,
        "terms": [
            {"exponent": [-1], "coefficient": "21/25"},
            {"exponent": [0], "coefficient": "1"},
        ],
    }
    assert TruncatedSeries.from_json(data) == f


def test_ordered_exponents():
    exps = [(0, -1), (-1, 0), (-1, 1), (0, 0)]
    assert ordered_exponents(B2, exps) == [(0, 0), (-1, 1), (0, -1), (-1, 0)]


def _series(variant, order):
    monos = list(iter_cone_monomials(variant, order))
    coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=5)
    return st.dictionaries(st.sampled_from(monos), coeffs, max_size=5).map(
        lambda terms: TruncatedSeries(variant, order, terms)
    )


@given(f=_series(B2, 3), g=_series(B2, 3), h=_series(B2, 3))
@settings(max_examples=30, deadline=None)
def test_ring_axioms(f, g, h):
    assert mul(f, g) == mul(g, f)
    assert mul(f, add(g, h)) == add(mul(f, g), mul(f, h))
    assert mul(mul(f, g), h) == mul(f, mul(g, h))
    assert mul(f, constant(B2, 3)) == f


@given(f=_series(A3, 3), c=st.fractions(min_value=-3, max_value=3, max_denominator=4))
@settings(max_examples=30, deadline=None)
def test_shift_is_linear(f, c):
    q = Fraction(2, 5)
    assert shift(scale(f, c), 2, 1, q) == scale(shift(f, 2, 1, q), c)
    assert shift(shift(f, 3, 1, q), 3, -1, q) == f


@given(f=_series(A3, 3), g=_series(A3, 3), axis=st.integers(1, 3), sign=st.sampled_from([1, -1]))
@settings(max_examples=30, deadline=None)
def test_shift_is_multiplicative_type_a(f, g, axis, sign):
    q = Fraction(2, 5)
    assert shift(mul(f, g), axis, sign, q) == mul(shift(f, axis, sign, q), shift(g, axis, sign, q))


@given(f=_series(B2, 3), g=_series(B2, 3), axis=st.integers(1, 2))
@settings(max_examples=30, deadline=None)
def test_shift_is_multiplicative_type_b(f, g, axis):
    q = Fraction(3, 7)
    assert shift(mul(f, g), axis, 1, q) == mul(shift(f, axis, 1, q), shift(g, axis, 1, q))


def test_cone_coords_type_b_three_variables():
    mono = cone_coords((-1, -1, -1), ConeVariant(TYPE_B, 3))
    assert mono.coords == (1, 2, 3)
    assert mono.degree == 6


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_type_b_prefactor_degree(n):
    variant = ConeVariant(TYPE_B, n)
    for theta in itertools.product(range(4), repeat=n):
        expected = sum((n + 1 - i) * t for i, t in enumerate(theta, start=1))
        assert degree([-t for t in theta], variant) == expected, theta


@pytest.mark.parametrize("variant", [A3, B2, ConeVariant(TYPE_B, 3)])
def test_degree_is_additive(variant):
    monos = list(iter_cone_monomials(variant, 3))
    for u, v in itertools.product(monos, repeat=2):
        w = tuple(a + b for a, b in zip(u, v))
        assert degree(w, variant) == degree(u, variant) + degree(v, variant)
