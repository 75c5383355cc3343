"""
恒等式の厳密検査。

役割
- 固有方程式・分岐公式・contiguity 関係・係数の漸化式・有理恒等式・対称性を
  パラメータ点で厳密に検査し、結果を `Report` にまとめる
- `run_suite`: 乱択した複数の一般点で全検査（または指定した検査）を固定順に実行

設計のポイント
- 合否は「差が有理数として厳密に 0 か」だけで決める（許容誤差は持たない）
- 失敗時は最初の不一致（級数なら (次数, 辞書順) で最小の単項式、掃引なら最初の添字）を記録
- 各検査は係数関数・構成関数を差し替えられる（陰性対照で壊した入力を流し込む）
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .coefficients import (
    branching_weights,
    bump,
    contiguity_weight,
    d_toda,
    e_branch,
    iter_weighted,
    partition_summand,
    recursion_eigen_gap,
    recursion_weight,
    reduced_recursion_summand,
    typeb_summand,
    weighted_degree,
)
from .eigenfunctions import CoefficientFn, f_A_direct, f_A_inverted, f_B_branching, solve_eigen
from .operators import apply, build_toda_A, build_toda_B
from .scalars import DEFAULT_RETRIES, ParamPoint, exact_div, format_rational, random_point, random_rationals
from .series import (
    TYPE_A,
    TYPE_B,
    ConeVariant,
    TruncatedSeries,
    VariantMismatchError,
    add,
    degree,
    mul_monomial,
    ordered_exponents,
    scale,
    shift,
    zero,
)


logger = logging.getLogger(__name__)

DEFAULT_POINTS = 3
SWEEP_MAX_ENTRY = 3
IDENTITY_DRAWS = 10

# run_suite の実行順（出力順もこの順）
CHECKS: Tuple[str, ...] = (
    "eigen-A",
    "eigen-B",
    "branching",
    "contiguity",
    "dN-relation",
    "e-recursion",
    "reduced-recursion",
    "summand-action",
    "partition-identity",
    "typeB-identity",
    "symmetry",
)

SeriesBuilder = Callable[[ParamPoint, int], TruncatedSeries]
WeightFn = Callable[[int, ParamPoint], Fraction]
RecursionWeightFn = Callable[[Sequence[int], int, ParamPoint], Fraction]


@dataclass(frozen=True)
class Report:
    """1 つの検査結果。`to_json` のキー名は出力形式に合わせる。"""

    check: str
    n: int
    order: Optional[int]
    params: Mapping
    passed: bool
    first_failure: Optional[Dict] = None
    trusted_degree: Optional[int] = None
    seed: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "n": self.n,
            "order": self.order,
            "params": dict(self.params),
            "seed": self.seed,
            "pass": self.passed,
            "firstFailure": self.first_failure,
            "trustedDegree": self.trusted_degree,
        }


def _fmt(values: Iterable[Fraction]) -> List[str]:
    return [format_rational(v) for v in values]


def _first_mismatch(lhs: TruncatedSeries, rhs: TruncatedSeries, order: int) -> Optional[Dict]:
    if lhs.variant != rhs.variant:
        raise VariantMismatchError(f"{lhs.variant} vs {rhs.variant}")
    var = lhs.variant
    bad = [
        m
        for m in set(lhs.terms) | set(rhs.terms)
        if degree(m, var) <= order and lhs.coefficient(m) != rhs.coefficient(m)
    ]
    if not bad:
        return None
    m = ordered_exponents(var, bad)[0]
    return {
        "exponent": list(m),
        "degree": degree(m, var),
        "lhs": format_rational(lhs.coefficient(m)),
        "rhs": format_rational(rhs.coefficient(m)),
    }


def _series_report(check: str, p: ParamPoint, order: int, lhs: TruncatedSeries, rhs: TruncatedSeries,
                   extra: Optional[Mapping] = None) -> Report:
    failure = _first_mismatch(lhs, rhs, order)
    params = dict(p.to_json())
    if extra:
        params.update(extra)
    return Report(check, p.n, order, params, failure is None, failure, order)


def _scalar_report(check: str, n: int, params: Mapping, lhs: Fraction, rhs: Fraction,
                   order: Optional[int] = None) -> Report:
    if lhs == rhs:
        return Report(check, n, order, params, True)
    failure = {"lhs": format_rational(lhs), "rhs": format_rational(rhs)}
    return Report(check, n, order, params, False, failure)


def _check_theta(theta: Sequence[int], length: int) -> Tuple[int, ...]:
    theta = tuple(int(t) for t in theta)
    if len(theta) != length:
        raise ValueError(f"theta must have length {length}, got {len(theta)}")
    if any(t < 0 for t in theta):
        raise ValueError("theta entries must be non-negative")
    return theta


# ---- 級数の検査 ----

def verify_eigen(variant: str, p: ParamPoint, order: int, f: Optional[TruncatedSeries] = None) -> Report:
    """r = op f - eigenvalue f の係数が次数 order まですべて 0 かを検査。

    f を省略すると TypeA は f_A_direct、TypeB は f_B_branching を使う。
    作用素の単項式因子は次数 1 以下なので、order まで厳密な f から r も order まで厳密。
    """
    if variant == TYPE_A:
        op, check = build_toda_A(p), "eigen-A"
        f = f if f is not None else f_A_direct(p, order)
    elif variant == TYPE_B:
        op, check = build_toda_B(p), "eigen-B"
        f = f if f is not None else f_B_branching(p, order)
    else:
        raise ValueError(f"unknown cone variant: {variant!r}")
    if f.variant != op.variant:
        raise VariantMismatchError(f"series on {f.variant} for the {variant} operator")
    if f.order < order:
        raise ValueError(f"series is only known through degree {f.order} < {order}")
    f = f.truncate(order)
    residual = add(apply(op, f), scale(f, -op.eigenvalue))
    report = _series_report(check, p, order, residual, zero(f.variant, order))
    if report.first_failure is not None:
        failure = dict(report.first_failure)
        failure["residual"] = failure.pop("lhs")
        failure.pop("rhs")
        report = replace(report, first_failure=failure)
    return report


def verify_branching(p: ParamPoint, order: int, coefficient: CoefficientFn = e_branch) -> Report:
    """分岐公式で作った B_N 型級数が、作用素から解いた級数と一致するか。"""
    lhs = f_B_branching(p, order, coefficient=coefficient)
    rhs = solve_eigen(build_toda_B(p), order)
    return _series_report("branching", p, order, lhs, rhs)


def verify_contiguity(p: ParamPoint, order: int, weight: WeightFn = contiguity_weight) -> Report:
    """f^A(x_1..x_{N-1}, q x_N | s) = sum_k w_k (x_N/x_k) f^A(x | q^{-eps_k} s)。"""
    n = p.n
    f = f_A_direct(p, order)
    lhs = shift(f, n, 1, p.q)
    rhs = zero(f.variant, order)
    for k in range(1, n + 1):
        lift = n - k
        if lift > order:
            continue
        inner = f_A_direct(p.bumped(k, -1), order - lift)
        factor = [0] * n
        factor[n - 1] += 1
        factor[k - 1] -= 1
        rhs = add(rhs, scale(mul_monomial(inner, factor, order=order), weight(k, p)))
    return _series_report("contiguity", p, order, lhs, rhs)


def verify_symmetry(p: ParamPoint, order: int, builder: SeriesBuilder = f_A_inverted) -> Report:
    """反転した点から作った f^A が f_A_direct と係数ごとに一致するか。"""
    return _series_report("symmetry", p, order, builder(p, order), f_A_direct(p, order))


def verify_summand_action(theta: Sequence[int], p: ParamPoint, order: int,
                          builder: SeriesBuilder = f_A_direct) -> Report:
    """分岐和の 1 項 h = x^{-theta} f^A(x|q^{-theta} s) への B_N 作用素の作用。

    D h = Lambda_theta h - s_N x_N^{-1} T_{q,x_N} h,
    Lambda_theta = sum_i (q^{-theta_i} s_i + q^{theta_i} s_i^{-1})
    """
    n = p.n
    theta = _check_theta(theta, n)
    w = weighted_degree(branching_weights(n), theta)
    if w > order:
        raise ValueError(f"prefactor degree {w} exceeds order {order}")
    variant = ConeVariant(TYPE_B, n)
    inner = builder(p.lowered(theta), order - w).embed(variant)
    h = mul_monomial(inner, tuple(-t for t in theta), order=order)
    lhs = apply(build_toda_B(p), h)
    q, s = p.q, p.s
    lam = sum((q ** (-t) * v + q ** t / v for t, v in zip(theta, s)), Fraction(0))
    down = [0] * n
    down[n - 1] = -1
    rhs = add(scale(h, lam), scale(mul_monomial(shift(h, n, 1, q), down), -s[n - 1]))
    return _series_report("summand-action", p, order, lhs, rhs, {"theta": list(theta)})


# ---- 係数の恒等式 ----

def verify_dN_relation(theta: Sequence[int], p: ParamPoint, coefficient: CoefficientFn = d_toda,
                       weight: WeightFn = contiguity_weight) -> Report:
    """q^{sum theta} = sum_{k<N, theta_k>=1} w_k d(theta-eps_k | q^{-eps_k}s)/d(theta|s)
    + d(theta | q^{-eps_N}s)/d(theta|s)。"""
    n = p.n
    if n < 2:
        raise ValueError("the d_N relation needs N >= 2")
    theta = _check_theta(theta, n - 1)
    base = coefficient(theta, p)
    lhs = p.q ** sum(theta)
    rhs = Fraction(0)
    for k in range(1, n):
        if theta[k - 1] == 0:
            continue
        lowered = coefficient(bump(theta, k, -1), p.bumped(k, -1))
        rhs += weight(k, p) * exact_div(lowered, base, "d_toda")
    rhs += exact_div(coefficient(theta, p.bumped(n, -1)), base, "d_toda")
    params = dict(p.to_json(), theta=list(theta))
    return _scalar_report("dN-relation", n, params, lhs, rhs)


def verify_e_recursion(theta: Sequence[int], p: ParamPoint, coefficient: CoefficientFn = e_branch,
                       weight: RecursionWeightFn = recursion_weight) -> Report:
    """分岐係数の漸化式 gap(theta) e(theta) = sum_{theta_k>=1} w_k(theta) e(theta - eps_k)。"""
    n = p.n
    theta = _check_theta(theta, n)
    if not any(theta):
        raise ValueError("the recursion is stated for theta != 0")
    lhs = recursion_eigen_gap(theta, p) * coefficient(theta, p)
    rhs = Fraction(0)
    for k in range(1, n + 1):
        if theta[k - 1] == 0:
            continue
        rhs += weight(theta, k, p) * coefficient(bump(theta, k, -1), p)
    params = dict(p.to_json(), theta=list(theta))
    return _scalar_report("e-recursion", n, params, lhs, rhs)


def verify_reduced_recursion(theta: Sequence[int], p: ParamPoint,
                             summand: Callable[[int, Sequence[int], ParamPoint], Fraction] = reduced_recursion_summand) -> Report:
    """漸化式を e(theta) で割った形: gap(theta) = sum_k (k 番目の有理項)。"""
    n = p.n
    theta = _check_theta(theta, n)
    lhs = recursion_eigen_gap(theta, p)
    rhs = sum((summand(k, theta, p) for k in range(1, n + 1)), Fraction(0))
    params = dict(p.to_json(), theta=list(theta))
    return _scalar_report("reduced-recursion", n, params, lhs, rhs)


def _distinct(values: Sequence[Fraction]) -> bool:
    return len(set(values)) == len(values)


def verify_partition_identity(a: Sequence[Fraction], s: Sequence[Fraction],
                              summand: Callable[[int, Sequence[Fraction], Sequence[Fraction]], Fraction] = partition_summand) -> Report:
    """prod_{i<N} a_i = sum_k (s_k/s_N) prod_{i<N}(1 - a_i s_k/s_i) / prod_{i!=k}(1 - s_k/s_i)。"""
    a = tuple(Fraction(v) for v in a)
    s = tuple(Fraction(v) for v in s)
    n = len(s)
    if n < 1 or len(a) != n - 1:
        raise ValueError("expected N values of s and N-1 values of a")
    if not _distinct(s) or any(v == 0 for v in s):
        raise ValueError("s values must be non-zero and pairwise distinct")
    lhs = Fraction(1)
    for v in a:
        lhs *= v
    rhs = sum((summand(k, a, s) for k in range(1, n + 1)), Fraction(0))
    return _scalar_report("partition-identity", n, {"a": _fmt(a), "s": _fmt(s)}, lhs, rhs)


def verify_typeB_identity(big_q: Sequence[Fraction], s: Sequence[Fraction],
                          summand: Callable[[int, Sequence[Fraction], Sequence[Fraction]], Fraction] = typeb_summand) -> Report:
    """sum_i ((1-Q_i) s_i + (1-Q_i^{-1}) s_i^{-1})
    = sum_k s_k prod_i (1-Q_i s_i/s_k)(1-Q_i^{-1}/s_i s_k) / prod_{i!=k} (1-s_i/s_k)(1-1/s_i s_k)。"""
    big_q = tuple(Fraction(v) for v in big_q)
    s = tuple(Fraction(v) for v in s)
    n = len(s)
    if n < 1 or len(big_q) != n:
        raise ValueError("expected N values of Q and N values of s")
    if any(v == 0 for v in big_q) or any(v == 0 for v in s):
        raise ValueError("Q and s values must be non-zero")
    if not _typeb_admissible(s):
        raise ValueError("s values must satisfy s_i != s_k and s_i s_k != 1 for i != k")
    lhs = sum(((1 - qi) * si + (1 - 1 / qi) / si for qi, si in zip(big_q, s)), Fraction(0))
    rhs = sum((summand(k, big_q, s) for k in range(1, n + 1)), Fraction(0))
    return _scalar_report("typeB-identity", n, {"Q": _fmt(big_q), "s": _fmt(s)}, lhs, rhs)


def _typeb_admissible(s: Sequence[Fraction]) -> bool:
    return all(s[i] != s[k] and s[i] * s[k] != 1 for i in range(len(s)) for k in range(i + 1, len(s)))


# ---- 一括実行 ----

def _merge(check: str, n: int, order: Optional[int], params: Mapping, reports: Iterable[Report],
           trusted: Optional[int] = None) -> Report:
    # reports は遅延評価。最初の失敗で打ち切る
    count = 0
    for r in reports:
        count += 1
        if not r.passed:
            failure = {"params": dict(r.params)}
            failure.update(r.first_failure or {})
            return Report(check, n, order, dict(params, cases=count), False, failure, trusted)
    return Report(check, n, order, dict(params, cases=count), True, None, trusted)


def _sweep(length: int, skip_zero: bool = False) -> Iterable[Tuple[int, ...]]:
    for theta in itertools.product(range(SWEEP_MAX_ENTRY + 1), repeat=length):
        if skip_zero and not any(theta):
            continue
        yield theta


def _draw_distinct(rng: np.random.Generator, size: int, ok: Callable[[Sequence[Fraction]], bool]) -> Tuple[Fraction, ...]:
    while True:
        values = random_rationals(rng, size)
        if ok(values):
            return values


def _run_partition(rng: np.random.Generator, n: int) -> Iterable[Report]:
    for _ in range(IDENTITY_DRAWS):
        a = random_rationals(rng, n - 1)
        s = _draw_distinct(rng, n, _distinct)
        yield verify_partition_identity(a, s)


def _run_typeb(rng: np.random.Generator, n: int) -> Iterable[Report]:
    for _ in range(IDENTITY_DRAWS):
        big_q = random_rationals(rng, n)
        s = _draw_distinct(rng, n, _typeb_admissible)
        yield verify_typeB_identity(big_q, s)


def _run_check(name: str, p: ParamPoint, order: int, rng: np.random.Generator, batch: int) -> Report:
    n = p.n
    if name == "eigen-A":
        return verify_eigen(TYPE_A, p, order)
    if name == "eigen-B":
        return verify_eigen(TYPE_B, p, order)
    if name == "branching":
        return verify_branching(p, order)
    if name == "contiguity":
        return verify_contiguity(p, order)
    if name == "symmetry":
        return verify_symmetry(p, order)
    if name == "dN-relation":
        cases = (verify_dN_relation(t, p) for t in _sweep(n - 1))
        return _merge(name, n, None, p.to_json(), cases)
    if name == "e-recursion":
        cases = (verify_e_recursion(t, p) for t in _sweep(n, skip_zero=True))
        return _merge(name, n, None, p.to_json(), cases)
    if name == "reduced-recursion":
        cases = (verify_reduced_recursion(t, p) for t in _sweep(n))
        return _merge(name, n, None, p.to_json(), cases)
    if name == "summand-action":
        cases = (verify_summand_action(t, p, order) for t in iter_weighted(branching_weights(n), order))
        return _merge(name, n, order, p.to_json(), cases, trusted=order)
    if name == "partition-identity":
        return _merge(name, n, None, {"draws": IDENTITY_DRAWS, "batch": batch}, _run_partition(rng, n))
    if name == "typeB-identity":
        return _merge(name, n, None, {"draws": IDENTITY_DRAWS, "batch": batch}, _run_typeb(rng, n))
    raise ValueError(f"unknown check: {name!r}")


def select_checks(checks: Optional[Iterable[str]]) -> Tuple[str, ...]:
    """指定された検査名を実行順に並べ直す。None なら全検査。"""
    if checks is None:
        return CHECKS
    wanted = {c.strip() for c in checks if c.strip()}
    unknown = sorted(wanted - set(CHECKS))
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(unknown)} (choose from {', '.join(CHECKS)})")
    if not wanted:
        raise ValueError("no checks selected")
    return tuple(c for c in CHECKS if c in wanted)


def run_suite(
    n: int,
    order: int,
    points: int = DEFAULT_POINTS,
    seed: int = 0,
    checks: Optional[Iterable[str]] = None,
    q: Optional[Fraction] = None,
    s: Optional[Sequence[Fraction]] = None,
    max_retries: int = DEFAULT_RETRIES,
) -> List[Report]:
    """`points` 個の一般点を 1 つの乱数列から引き、検査を固定順で実行する。

    一般性は max(order, SWEEP_MAX_ENTRY) まで確認するので、添字の掃引で
    シフトした点も確認済みの範囲に収まる。
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if order < 0:
        raise ValueError("order must be >= 0")
    if points < 1:
        raise ValueError("points must be >= 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    if s is not None and len(s) != n:
        raise ValueError(f"expected {n} values of s, got {len(s)}")
    selected = select_checks(checks)
    skipped = [c for c in selected if c == "dN-relation" and n < 2]
    if skipped and len(skipped) == len(selected):
        raise ValueError(f"{', '.join(skipped)} needs N >= 2")

    rng = np.random.default_rng(seed)
    bound = max(order, SWEEP_MAX_ENTRY)
    pts = [random_point(n, bound, rng, q=q, s=s, max_retries=max_retries) for _ in range(points)]
    for idx, p in enumerate(pts):
        logger.info("point %d: q=%s s=%s", idx + 1, format_rational(p.q), " ".join(_fmt(p.s)))

    reports: List[Report] = []
    for name in selected:
        if name in skipped:
            logger.info("skipping %s for N = 1", name)
            continue
        for idx, p in enumerate(pts):
            draw_rng = np.random.default_rng([seed, CHECKS.index(name), idx])
            report = replace(_run_check(name, p, order, draw_rng, idx + 1), seed=seed)
            logger.info("%s point %d: %s", name, idx + 1, "pass" if report.passed else "FAIL")
            reports.append(report)
    return reports
