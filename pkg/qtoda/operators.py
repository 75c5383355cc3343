"""
A_{N-1} / B_N 型 q-Toda 差分作用素。

役割
- 作用素を「スカラー x 単項式 x シフト」の項の並びに展開して保持
- 打ち切り級数への作用 `apply`

設計のポイント
- (1 - x_{i+1}/x_i) などの因子は構築時に分配し、次数 0 の項（対角）と
  次数 1 の項（上げ）を明示的に分ける。固有関数の逐次解法はこの区別に依存する
- スカラーは構築時にパラメータ点で評価済み（記号的な作用素代数は持たない）
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .scalars import ParamPoint
from .series import (
    TYPE_A,
    TYPE_B,
    ConeMonomial,
    ConeVariant,
    Exponent,
    TruncatedSeries,
    VariantMismatchError,
    add,
    cone_coords,
    mul_monomial,
    scale,
    shift,
    zero,
)


@dataclass(frozen=True)
class OperatorTerm:
    """scalar * x^multiplier * T_{q,x_axis}^{sign}"""

    scalar: Fraction
    multiplier: ConeMonomial
    axis: int
    sign: int

    def __post_init__(self) -> None:
        if self.multiplier.degree not in (0, 1):
            raise ValueError("operator multipliers must have cone degree 0 or 1")
        if self.sign not in (1, -1):
            raise ValueError("shift sign must be +1 or -1")

    @property
    def raising(self) -> bool:
        return self.multiplier.degree == 1


@dataclass(frozen=True)
class DifferenceOperator:
    variant: ConeVariant
    q: Fraction
    terms: Tuple[OperatorTerm, ...]
    eigenvalue: Fraction

    def diagonal(self, m: Sequence[int]) -> Fraction:
        """次数 0 の項が単項式 x^m に掛ける値。"""
        return sum(
            (t.scalar * self.q ** (t.sign * m[t.axis - 1]) for t in self.terms if not t.raising),
            Fraction(0),
        )

    def raising_terms(self) -> List[OperatorTerm]:
        return [t for t in self.terms if t.raising]


def _unit(n: int, *pairs: Tuple[int, int]) -> Exponent:
    m = [0] * n
    for axis, value in pairs:
        m[axis - 1] += value
    return tuple(m)


def _term(variant: ConeVariant, scalar: Fraction, multiplier: Exponent, axis: int, sign: int) -> OperatorTerm:
    return OperatorTerm(Fraction(scalar), cone_coords(multiplier, variant), axis, sign)


def build_toda_A(p: ParamPoint) -> DifferenceOperator:
    """sum_{i<N} s_i (1 - x_{i+1}/x_i) T_{q,x_i} + s_N T_{q,x_N}。固有値は sum s_i。"""
    n, s = p.n, p.s
    variant = ConeVariant(TYPE_A, n)
    none = (0,) * n
    terms: List[OperatorTerm] = []
    for i in range(1, n):
        terms.append(_term(variant, s[i - 1], none, i, 1))
        terms.append(_term(variant, -s[i - 1], _unit(n, (i + 1, 1), (i, -1)), i, 1))
    terms.append(_term(variant, s[n - 1], none, n, 1))
    return DifferenceOperator(variant, p.q, tuple(terms), sum(s, Fraction(0)))


def build_toda_B(p: ParamPoint) -> DifferenceOperator:
    """B_N 型 q-Toda 作用素。固有値は sum (s_i + s_i^{-1})。"""
    n, s = p.n, p.s
    variant = ConeVariant(TYPE_B, n)
    none = (0,) * n
    terms: List[OperatorTerm] = []
    for i in range(1, n):
        terms.append(_term(variant, s[i - 1], none, i, 1))
        terms.append(_term(variant, -s[i - 1], _unit(n, (i + 1, 1), (i, -1)), i, 1))
    terms.append(_term(variant, s[n - 1], none, n, 1))
    terms.append(_term(variant, -s[n - 1], _unit(n, (n, -1)), n, 1))
    terms.append(_term(variant, 1 / s[0], none, 1, -1))
    for i in range(2, n + 1):
        terms.append(_term(variant, 1 / s[i - 1], none, i, -1))
        terms.append(_term(variant, -1 / s[i - 1], _unit(n, (i, 1), (i - 1, -1)), i, -1))
    eigenvalue = sum((v + 1 / v for v in s), Fraction(0))
    return DifferenceOperator(variant, p.q, tuple(terms), eigenvalue)


def apply(op: DifferenceOperator, f: TruncatedSeries) -> TruncatedSeries:
    """作用素を級数に作用させる。結果の order は f.order。

    次数 1 の項は f の次数 order-1 以下だけから次数 order の係数を作るので、
    f が order まで厳密なら結果も order まで厳密。
    """
    if f.variant != op.variant:
        raise VariantMismatchError(f"operator on {op.variant} applied to series on {f.variant}")
    out = zero(f.variant, f.order)
    for t in op.terms:
        moved = mul_monomial(shift(f, t.axis, t.sign, op.q), t.multiplier)
        out = add(out, scale(moved, t.scalar))
    return out
