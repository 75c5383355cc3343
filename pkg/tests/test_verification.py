from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from qtoda.coefficients import (
    contiguity_weight,
    d_toda,
    e_branch,
    partition_summand,
    recursion_weight,
    reduced_recursion_summand,
    typeb_summand,
)
from qtoda.eigenfunctions import f_A_direct, f_A_inverted
from qtoda.series import TYPE_A, TYPE_B, ConeVariant, TruncatedSeries, add, monomial
from qtoda.verification import (
    CHECKS,
    IDENTITY_DRAWS,
    run_suite,
    select_checks,
    verify_branching,
    verify_contiguity,
    verify_dN_relation,
    verify_e_recursion,
    verify_eigen,
    verify_partition_identity,
    verify_reduced_recursion,
    verify_summand_action,
    verify_symmetry,
    verify_typeB_identity,
)


nonzero = st.fractions(min_value=-9, max_value=9, max_denominator=7).filter(lambda v: v != 0)


# ---- 固有方程式 ----

@pytest.mark.parametrize("n,order", [(1, 3), (2, 4), (3, 4)])
def test_eigen_type_a_passes(make_point, n, order):
    report = verify_eigen(TYPE_A, make_point(n, order), order)
    assert report.passed
    assert report.first_failure is None
    assert report.trusted_degree == order


@pytest.mark.parametrize("n,order", [(1, 3), (2, 4)])
def test_eigen_type_b_passes(make_point, n, order):
    assert verify_eigen(TYPE_B, make_point(n, order), order).passed


def test_eigen_perturbation_is_reported(first_point):
    p = first_point(3, 3)
    f = f_A_direct(p, 3)
    m = (0, -1, 1)
    broken = TruncatedSeries(f.variant, f.order, {**f.terms, m: f.coefficient(m) + 1})
    report = verify_eigen(TYPE_A, p, 3, f=broken)
    assert not report.passed
    assert report.first_failure["exponent"] == [0, -1, 1]
    assert report.first_failure["degree"] == 1
    assert report.first_failure["residual"] != "0"


def test_eigen_rejects_short_series(first_point):
    p = first_point(2, 3)
    with pytest.raises(ValueError):
        verify_eigen(TYPE_A, p, 3, f=f_A_direct(p, 2))
    with pytest.raises(ValueError):
        verify_eigen("TypeC", p, 3)


# ---- 分岐公式 ----

@pytest.mark.parametrize("n,order", [(1, 3), (2, 4)])
def test_branching_passes(make_point, n, order):
    assert verify_branching(make_point(n, order), order).passed


def test_branching_wrong_sign_fails_at_prefactor_degree(first_point):
    p = first_point(2, 3)

    def flipped(theta, pt):
        value = e_branch(theta, pt)
        return -value if tuple(theta) == (0, 1) else value

    report = verify_branching(p, 3, coefficient=flipped)
    assert not report.passed
    assert report.first_failure["exponent"] == [0, -1]
    assert report.first_failure["degree"] == 1


# ---- contiguity ----

@pytest.mark.parametrize("n,order", [(1, 3), (2, 3), (2, 4), (3, 4)])
def test_contiguity_passes(make_point, n, order):
    assert verify_contiguity(make_point(n, order), order).passed


def test_contiguity_mutation(first_point):
    p = first_point(3, 3)

    def doubled(k, pt):
        value = contiguity_weight(k, pt)
        return 2 * value if k == pt.n else value

    report = verify_contiguity(p, 3, weight=doubled)
    assert not report.passed
    # 定数項は k = N の項だけから来る
    assert report.first_failure["exponent"] == [0, 0, 0]
    assert report.first_failure["rhs"] == "2"


# ---- 対称性 ----

@pytest.mark.parametrize("n", [1, 2, 3])
def test_symmetry_passes(make_point, n):
    assert verify_symmetry(make_point(n, 4), 4).passed


def test_symmetry_mutation(first_point):
    p = first_point(3, 3)
    variant = ConeVariant(TYPE_A, 3)

    def broken(pt, order):
        return add(f_A_inverted(pt, order), monomial(variant, order, (0, -1, 1)))

    report = verify_symmetry(p, 3, builder=broken)
    assert not report.passed
    assert report.first_failure["exponent"] == [0, -1, 1]


# ---- 分岐和の 1 項への作用 ----

@pytest.mark.parametrize("n,theta", [(1, (0,)), (1, (2,)), (2, (0, 0)), (2, (1, 0)), (2, (0, 2)), (3, (0, 1, 1))])
def test_summand_action_passes(make_point, n, theta):
    report = verify_summand_action(theta, make_point(n, 4), 4)
    assert report.passed
    assert report.params["theta"] == list(theta)


def test_summand_action_mutation(first_point):
    p = first_point(2, 2)
    variant = ConeVariant(TYPE_A, 2)

    def broken(pt, order):
        return add(f_A_direct(pt, order), monomial(variant, order, (-1, 1)))

    report = verify_summand_action((0, 0), p, 2, builder=broken)
    assert not report.passed
    assert report.first_failure["exponent"] == [-1, 1]


def test_summand_action_rejects_heavy_theta(first_point):
    with pytest.raises(ValueError):
        verify_summand_action((1, 0), first_point(2, 1), 1)


# ---- d_N の関係式 ----

@pytest.mark.parametrize("theta", [(0,), (1,), (3,)])
def test_dN_relation_n2(make_point, theta):
    assert verify_dN_relation(theta, make_point(2, 3)).passed


@pytest.mark.parametrize("n", [2, 3, 4])
def test_dN_relation_sweep(make_point, n):
    p = make_point(n, 3)
    for theta in itertools.product(range(4), repeat=n - 1):
        assert verify_dN_relation(theta, p).passed, theta


def test_dN_relation_mutation(first_point):
    p = first_point(2, 3)

    def broken(theta, pt):
        value = d_toda(theta, pt)
        return 2 * value if tuple(theta) == (0,) else value

    assert not verify_dN_relation((1,), p, coefficient=broken).passed


def test_dN_relation_needs_two_variables(first_point):
    with pytest.raises(ValueError):
        verify_dN_relation((), first_point(1, 3))


# ---- 分岐係数の漸化式 ----

@pytest.mark.parametrize("n,theta", [(1, (1,)), (1, (3,)), (2, (1, 0)), (2, (0, 2)), (2, (2, 3))])
def test_e_recursion_passes(make_point, n, theta):
    assert verify_e_recursion(theta, make_point(n, 3)).passed


@pytest.mark.parametrize("n", [1, 2, 3])
def test_e_recursion_sweep(make_point, n):
    p = make_point(n, 3)
    for theta in itertools.product(range(4), repeat=n):
        if any(theta):
            assert verify_e_recursion(theta, p).passed, theta


def test_e_recursion_mutation(first_point):
    p = first_point(2, 3)

    def flipped(theta, k, pt):
        return -recursion_weight(theta, k, pt)

    assert not verify_e_recursion((1, 0), p, weight=flipped).passed


def test_e_recursion_rejects_zero_theta(first_point):
    with pytest.raises(ValueError):
        verify_e_recursion((0, 0), first_point(2, 3))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_reduced_recursion_passes(make_point, n):
    p = make_point(n, 3)
    for theta in [(0,) * n, (1,) * n, tuple(range(n)), tuple(range(n, 0, -1))]:
        assert verify_reduced_recursion(theta, p).passed, theta


def test_reduced_recursion_mutation(first_point):
    p = first_point(2, 3)

    def dropped(k, theta, pt):
        return Fraction(0) if k == pt.n else reduced_recursion_summand(k, theta, pt)

    assert not verify_reduced_recursion((1, 1), p, summand=dropped).passed


# ---- 有理恒等式 ----

def test_partition_identity_examples():
    assert verify_partition_identity([Fraction(2, 3)], [Fraction(5), Fraction(7, 2)]).passed
    assert verify_partition_identity([1, 1, 1], [2, 3, 5, 7]).passed
    assert verify_partition_identity([], [3]).passed


@given(data=st.data(), n=st.integers(3, 5))
@settings(max_examples=10, deadline=None)
def test_partition_identity_random(data, n):
    s = data.draw(st.lists(nonzero, min_size=n, max_size=n, unique=True))
    a = data.draw(st.lists(nonzero, min_size=n - 1, max_size=n - 1))
    assert verify_partition_identity(a, s).passed


def test_partition_identity_mutation():
    def doubled(k, a, s):
        value = partition_summand(k, a, s)
        return 2 * value if k == 1 else value

    report = verify_partition_identity([2, 3], [5, 7, 11], summand=doubled)
    assert not report.passed
    assert report.params == {"a": ["2", "3"], "s": ["5", "7", "11"]}


def test_partition_identity_rejects_coincident_s():
    with pytest.raises(ValueError):
        verify_partition_identity([2], [3, 3])


def test_typeb_identity_examples():
    assert verify_typeB_identity([Fraction(3, 2)], [Fraction(5)]).passed
    report = verify_typeB_identity([1, 1, 1], [2, 3, 5])
    assert report.passed


@given(data=st.data(), n=st.integers(2, 4))
@settings(max_examples=10, deadline=None)
def test_typeb_identity_random(data, n):
    s = data.draw(st.lists(nonzero, min_size=n, max_size=n, unique=True))
    assume(all(s[i] * s[k] != 1 for i in range(n) for k in range(i + 1, n)))
    big_q = data.draw(st.lists(nonzero, min_size=n, max_size=n))
    assert verify_typeB_identity(big_q, s).passed


def test_typeb_identity_mutation():
    def doubled(k, big_q, s):
        value = typeb_summand(k, big_q, s)
        return 2 * value if k == 1 else value

    assert not verify_typeB_identity([2, 3], [5, 7], summand=doubled).passed


def test_typeb_identity_rejects_excluded_values():
    with pytest.raises(ValueError):
        verify_typeB_identity([2, 3], [2, Fraction(1, 2)])
    with pytest.raises(ValueError):
        verify_typeB_identity([0, 3], [2, 3])


# ---- 一括実行 ----

def test_select_checks():
    assert select_checks(None) == CHECKS
    assert select_checks(["symmetry", "eigen-A"]) == ("eigen-A", "symmetry")
    with pytest.raises(ValueError):
        select_checks(["eigen-C"])
    with pytest.raises(ValueError):
        select_checks([" "])


def test_run_suite_n1_runs_every_applicable_check():
    reports = run_suite(1, 2, points=2, seed=7)
    names = [r.check for r in reports]
    expected = [c for c in CHECKS if c != "dN-relation"]
    assert names == [c for c in expected for _ in range(2)]
    assert all(r.passed for r in reports), [r.to_json() for r in reports if not r.passed]
    assert all(r.seed == 7 for r in reports)
    identity = [r for r in reports if r.check == "partition-identity"]
    assert identity[0].params == {"draws": IDENTITY_DRAWS, "batch": 1, "cases": IDENTITY_DRAWS}


def test_run_suite_n2_subset_passes():
    reports = run_suite(2, 3, points=2, seed=3, checks=["branching", "dN-relation", "e-recursion"])
    assert [r.check for r in reports] == ["branching", "branching", "dN-relation", "dN-relation",
                                          "e-recursion", "e-recursion"]
    assert all(r.passed for r in reports)


def test_run_suite_is_deterministic():
    first = [r.to_json() for r in run_suite(2, 2, points=2, seed=5, checks=["eigen-B", "typeB-identity"])]
    second = [r.to_json() for r in run_suite(2, 2, points=2, seed=5, checks=["eigen-B", "typeB-identity"])]
    assert first == second


def test_run_suite_report_json_keys():
    report = run_suite(1, 1, points=1, seed=0, checks=["eigen-A"])[0]
    assert list(report.to_json()) == ["check", "n", "order", "params", "seed", "pass", "firstFailure", "trustedDegree"]


@pytest.mark.parametrize("kwargs", [
    {"n": 0, "order": 2},
    {"n": 2, "order": -1},
    {"n": 2, "order": 2, "points": 0},
    {"n": 2, "order": 2, "seed": -1},
    {"n": 2, "order": 2, "checks": ["nope"]},
    {"n": 1, "order": 2, "checks": ["dN-relation"]},
])
def test_run_suite_rejects_bad_arguments(kwargs):
    with pytest.raises(ValueError):
        run_suite(**kwargs)
