"""
q-Toda 固有関数の構成。

役割
- `f_A_direct`: 行列添字の和による A_{N-1} 型固有関数
- `f_A_recursive`: A_{N-2} 型への再帰（最終列ぶんの係数 d_toda で展開）
- `f_A_inverted`: 変数とパラメータを反転・逆順にした構成（対称性の検査用）
- `f_B_branching`: 分岐係数 e_branch による B_N 型固有関数
- `solve_eigen`: 作用素から次数ごとに係数を解く独立な構成（照合の基準）

設計のポイント
- 同じ (点, 次数) の A 型固有関数は分岐和・漸化式の中で何度も現れるのでメモ化する
- 和の順序は添字の列挙順で固定（結果は決定的）
- 分岐和の添字は前因子の錐次数 sum (N+1-i) theta_i <= M で打ち切り、
  内側の A 型級数は M から前因子の次数を引いた次数まで計算する
"""

from __future__ import annotations

import logging
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Sequence

from .coefficients import (
    branching_weights,
    c_toda,
    d_toda,
    e_branch,
    iter_theta_matrices,
    iter_weighted,
    recursion_weights,
    weighted_degree,
)
from .operators import DifferenceOperator
from .scalars import DegeneratePointError, ParamPoint
from .series import (
    TYPE_A,
    TYPE_B,
    ConeVariant,
    Exponent,
    TruncatedSeries,
    add,
    constant,
    in_cone,
    monomials_of_degree,
    mul_monomial,
    remap_exponents,
    scale,
    zero,
)


logger = logging.getLogger(__name__)

CoefficientFn = Callable[[Sequence[int], ParamPoint], Fraction]


def _check_order(order: int) -> int:
    if order < 0:
        raise ValueError("order must be non-negative")
    return int(order)


@lru_cache(maxsize=512)
def _direct_cached(p: ParamPoint, order: int) -> TruncatedSeries:
    variant = ConeVariant(TYPE_A, p.n)
    terms: Dict[Exponent, Fraction] = {}
    for theta in iter_theta_matrices(p.n, order):
        m = theta.exponent()
        terms[m] = terms.get(m, Fraction(0)) + c_toda(theta, p)
    return TruncatedSeries(variant, order, terms)


def f_A_direct(p: ParamPoint, order: int) -> TruncatedSeries:
    """A_{N-1} 型 q-Toda 固有関数（行列添字の和）。定数項は 1。"""
    return _direct_cached(p, _check_order(order))


@lru_cache(maxsize=512)
def _recursive_cached(p: ParamPoint, order: int) -> TruncatedSeries:
    n = p.n
    variant = ConeVariant(TYPE_A, n)
    if n == 1:
        return constant(variant, order)
    out = zero(variant, order)
    inner_point = p.restricted(n - 1)
    for theta in iter_weighted(recursion_weights(n), order):
        weight = d_toda(theta, p)
        if weight == 0:
            continue
        w = weighted_degree(recursion_weights(n), theta)
        inner = _recursive_cached(inner_point.lowered(theta), order - w).embed(variant)
        prefactor = tuple(-t for t in theta) + (sum(theta),)
        out = add(out, scale(mul_monomial(inner, prefactor, order=order), weight))
    return out


def f_A_recursive(p: ParamPoint, order: int) -> TruncatedSeries:
    """A_{N-1} 型固有関数を A_{N-2} 型の和で組み立てる。N = 1 は定数 1。

    f^{A_{N-1}}(x|s) = sum_theta d_toda(theta) prod_i (x_N/x_i)^{theta_i} f^{A_{N-2}}(x|q^{-theta} s)
    """
    return _recursive_cached(p, _check_order(order))


def f_A_inverted(p: ParamPoint, order: int) -> TruncatedSeries:
    """f^A((x_{N-i+1}^{-1}) | (s_{N-i+1}^{-1})) を指数の反転で作る。"""
    order = _check_order(order)
    flipped = f_A_direct(p.inverted(), order)
    return remap_exponents(flipped, lambda m: tuple(-v for v in reversed(m)))


def f_B_branching(p: ParamPoint, order: int, coefficient: CoefficientFn = e_branch) -> TruncatedSeries:
    """B_N 型固有関数を分岐公式で組み立てる。

    f^{B_N}(x|s) = sum_theta e(theta) prod_i x_i^{-theta_i} f^{A_{N-1}}(x|q^{-theta} s)

    `coefficient` は e_branch の差し替え口（検査の陰性対照で使う）。
    """
    order = _check_order(order)
    variant = ConeVariant(TYPE_B, p.n)
    weights = branching_weights(p.n)
    out = zero(variant, order)
    for theta in iter_weighted(weights, order):
        e = coefficient(theta, p)
        if e == 0:
            continue
        w = weighted_degree(weights, theta)
        logger.debug("branching term theta=%s degree=%d", list(theta), w)
        inner = f_A_direct(p.lowered(theta), order - w).embed(variant)
        prefactor = tuple(-t for t in theta)
        out = add(out, scale(mul_monomial(inner, prefactor, order=order), e))
    return out


def solve_eigen(op: DifferenceOperator, order: int) -> TruncatedSeries:
    """定数項 1 で (op - eigenvalue) f = 0 を次数 order まで満たす級数を次数ごとに解く。

    次数 d の単項式 m について
        c_m = -(次数 d-1 の係数からの上げ項の寄与) / (diag(m) - eigenvalue)
    除数が 0 なら `DegeneratePointError`。
    """
    order = _check_order(order)
    variant = op.variant
    coeffs: Dict[Exponent, Fraction] = {(0,) * variant.n: Fraction(1)}
    raising = op.raising_terms()
    for d in range(1, order + 1):
        solved = 0
        for m in monomials_of_degree(variant, d):
            acc = Fraction(0)
            for t in raising:
                src = tuple(a - b for a, b in zip(m, t.multiplier.exponents))
                if not in_cone(src, variant):
                    continue
                c = coeffs.get(src)
                if c:
                    acc += t.scalar * op.q ** (t.sign * src[t.axis - 1]) * c
            divisor = op.diagonal(m) - op.eigenvalue
            if divisor == 0:
                raise DegeneratePointError(f"eigen divisor vanishes at exponent {list(m)}")
            if acc == 0:
                continue
            coeffs[m] = -acc / divisor
            solved += 1
        logger.debug("solve_eigen %s degree %d: %d non-zero coefficients", variant.tag, d, solved)
    return TruncatedSeries(variant, order, coeffs)

