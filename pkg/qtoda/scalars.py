"""
厳密有理数演算と q-Pochhammer 記号、パラメータ点の一般性判定。

役割
- 有理数は `fractions.Fraction` で保持し、丸めは一切しない
- q-Pochhammer 記号 `(a;q)_n` の評価（(a, q) ごとにメモ化）
- パラメータ点 (q, s_1..s_N) の生成と、分母・固有値除数が消えないことの検査

設計のポイント
- 記号計算はせず、生成的な有理点で評価して恒等式を検査する（複数点で繰り返す）
- 一般性の検査は「到達しうる指数範囲」を広めに走査する（シフト済みの点も含む）
- 例外は `QTodaError` を根とし、検査失敗は違反リストを持った `GenericityError`
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np


logger = logging.getLogger(__name__)

RationalLike = Union[int, Fraction, str]

DEFAULT_RETRIES = 32
QPOCH_CACHE_SIZE = 1024

# s_i を素数比で作るときの最小の候補数（N が大きければ篩を広げる）
MIN_PRIME_POOL = 14

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


class QTodaError(Exception):
    """パッケージ共通の基底例外。"""


class DegeneratePointError(QTodaError, ZeroDivisionError):
    """分母（または固有値除数）が 0 になった。非一般点を意味する。"""


@dataclass(frozen=True)
class Violation:
    """一般性検査で 0 になった因子。

    kind は "q" / "s" / "q-power" / "ratio" / "product" / "eigen-A" / "eigen-B"。
    """

    kind: str
    factor: str
    exponent: Optional[int] = None
    indices: Tuple[int, ...] = ()

    def __str__(self) -> str:
        return f"{self.factor} = 0"


class GenericityError(QTodaError):
    """パラメータ点が一般的でない。`violations` に原因因子の一覧を持つ。"""

    def __init__(self, violations: Sequence[Violation]):
        self.violations: List[Violation] = list(violations)
        head = ", ".join(str(v) for v in self.violations[:3])
        more = "" if len(self.violations) <= 3 else f" (+{len(self.violations) - 3} more)"
        super().__init__(f"non-generic parameter point: {head}{more}")


def parse_rational(text: str) -> Fraction:
    """"num/den" または整数の文字列を有理数へ。小数表記は受け付けない。"""
    s = text.strip()
    match = _RATIONAL_RE.match(s)
    if not match:
        raise ValueError(f"not a rational literal: {text!r} (expected 'num/den')")
    if match.group(1) is not None and int(match.group(1)[1:]) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(s)


def format_rational(value: Fraction) -> str:
    """有理数を既約の "num/den"（整数なら "num"）で表す。"""
    return str(Fraction(value))


def to_rational(value: RationalLike) -> Fraction:
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted")
    return Fraction(value)


@lru_cache(maxsize=QPOCH_CACHE_SIZE)
def _qpoch_prefix(a: Fraction, q: Fraction) -> List[Fraction]:
    # prefix[k] = (a;q)_k。qpoch が必要な長さまで後ろに伸ばす
    return [Fraction(1)]


def qpoch(a: RationalLike, q: RationalLike, n: int) -> Fraction:
    """q-Pochhammer 記号 `(a;q)_n = prod_{k=1}^n (1 - q^{k-1} a)`。n = 0 は空積で 1。"""
    if n < 0:
        raise ValueError("qpoch length must be non-negative")
    a, q, n = to_rational(a), to_rational(q), int(n)
    prefix = _qpoch_prefix(a, q)
    if len(prefix) <= n:
        k = len(prefix) - 1
        step = q ** k
        value = prefix[-1]
        for _ in range(k, n):
            value *= 1 - step * a
            step *= q
            prefix.append(value)
    return prefix[n]


def exact_div(num: Fraction, den: Fraction, what: str = "denominator") -> Fraction:
    """厳密除算。分母が 0 なら `DegeneratePointError`。"""
    if den == 0:
        raise DegeneratePointError(f"{what} vanishes at this parameter point")
    return num / den


@dataclass(frozen=True)
class ParamPoint:
    """パラメータ点 (q, s_1..s_N)。

    `order_bound` は一般性を確認済みの打ち切り次数。シフトで派生させた点
    （`lowered`, `shifted` など）は親の走査範囲に含まれるので同じ値を引き継ぐ。
    """

    q: Fraction
    s: Tuple[Fraction, ...]
    order_bound: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", to_rational(self.q))
        object.__setattr__(self, "s", tuple(to_rational(v) for v in self.s))
        if not self.s:
            raise ValueError("a parameter point needs N >= 1 values of s")
        if self.q in (0, 1, -1):
            raise ValueError(f"q must not be 0, 1 or -1 (got {self.q})")
        if any(v == 0 for v in self.s):
            raise ValueError("every s_i must be non-zero")
        if self.order_bound < 0:
            raise ValueError("order_bound must be non-negative")

    @property
    def n(self) -> int:
        return len(self.s)

    def with_s(self, s: Sequence[Fraction]) -> "ParamPoint":
        return ParamPoint(self.q, tuple(s), self.order_bound)

    def shifted(self, powers: Sequence[int]) -> "ParamPoint":
        """s_i -> q^{powers_i} s_i。"""
        if len(powers) != self.n:
            raise ValueError("shift vector length must equal N")
        return self.with_s(self.q ** int(k) * v for k, v in zip(powers, self.s))

    def lowered(self, theta: Sequence[int]) -> "ParamPoint":
        """s_i -> q^{-theta_i} s_i（分岐公式・漸化式の引数シフト）。"""
        return self.shifted([-int(t) for t in theta])

    def bumped(self, k: int, power: int) -> "ParamPoint":
        """q^{power * eps_k} . s（k は 1 始まり）。"""
        powers = [0] * self.n
        powers[k - 1] = power
        return self.shifted(powers)

    def restricted(self, n: int) -> "ParamPoint":
        """先頭 n 個の s だけを持つ点（A_{N-2} への再帰用）。"""
        return self.with_s(self.s[:n])

    def inverted(self) -> "ParamPoint":
        """(s_N^{-1}, ..., s_1^{-1})。f^A の対称性で使う。"""
        return self.with_s(1 / v for v in reversed(self.s))

    def to_json(self) -> dict:
        return {"q": format_rational(self.q), "s": [format_rational(v) for v in self.s]}


def scan_range(order_bound: int) -> int:
    """一般性検査で走査する q 指数の範囲 |k| <= R。

    係数の内部シフトと、分岐公式の q^{-theta} シフトを合わせても収まる幅。
    """
    return 3 * order_bound + 2


def find_violations(q: RationalLike, s: Sequence[RationalLike], n: int, order_bound: int) -> List[Violation]:
    """0 になる因子を列挙して返す（空なら一般点）。"""
    if n < 1:
        raise ValueError("n must be >= 1")
    if order_bound < 0:
        raise ValueError("order_bound must be non-negative")
    q = to_rational(q)
    s = tuple(to_rational(v) for v in s)
    if len(s) != n:
        raise ValueError(f"expected {n} values of s, got {len(s)}")

    if q == 0:
        return [Violation("q", "q")]
    zero_s = [Violation("s", f"s{i + 1}", indices=(i + 1,)) for i, v in enumerate(s) if v == 0]
    if zero_s:
        return zero_s

    found: List[Violation] = []
    r = scan_range(order_bound)
    powers = {k: q ** k for k in range(-r, r + 1)}

    for k in range(1, r + 1):
        if powers[k] == 1:
            found.append(Violation("q-power", f"1 - q^{k}", exponent=k))

    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            ratio = s[j] / s[i]
            for k in range(-r, r + 1):
                if powers[k] * ratio == 1:
                    found.append(Violation("ratio", f"1 - q^{k}*s{j + 1}/s{i + 1}", exponent=k, indices=(j + 1, i + 1)))

    for i in range(n):
        for j in range(i, n):
            prod = s[i] * s[j]
            for k in range(-r, r + 1):
                if powers[k] == prod:
                    found.append(Violation("product", f"1 - q^{k}/(s{i + 1}*s{j + 1})", exponent=k, indices=(i + 1, j + 1)))

    if not found:
        found.extend(_eigen_divisor_violations(q, s, order_bound))
    return found


def _eigen_divisor_violations(q: Fraction, s: Tuple[Fraction, ...], order_bound: int) -> List[Violation]:
    # 循環 import を避けるため遅延 import
    from .series import TYPE_A, TYPE_B, ConeVariant, iter_cone_monomials

    found: List[Violation] = []
    n = len(s)
    for tag, kind in ((TYPE_A, "eigen-A"), (TYPE_B, "eigen-B")):
        variant = ConeVariant(tag, n)
        for m in iter_cone_monomials(variant, order_bound):
            if not any(m):
                continue
            div = sum((v * (q ** e - 1) for v, e in zip(s, m)), Fraction(0))
            if tag == TYPE_B:
                div += sum((q ** (-e) - 1) / v for v, e in zip(s, m))
            if div == 0:
                found.append(Violation(kind, f"eigen divisor at exponent {list(m)}", indices=tuple(m)))
    return found


def genericity_check(q: RationalLike, s: Sequence[RationalLike], n: int, order_bound: int) -> ParamPoint:
    """一般性を確認して `ParamPoint` を返す。違反があれば `GenericityError`。

    order_bound で得た証明書は、それ以下の次数でもそのまま有効（単調）。
    """
    violations = find_violations(q, s, n, order_bound)
    if violations:
        raise GenericityError(violations)
    return ParamPoint(to_rational(q), tuple(to_rational(v) for v in s), order_bound)


def _draw_q(rng: np.random.Generator) -> Fraction:
    num = int(rng.integers(1, 10))
    den = int(rng.integers(num + 1, num + 12))
    return Fraction(num, den)


@lru_cache(maxsize=16)
def prime_table(count: int) -> Tuple[int, ...]:
    """小さい順に count 個の素数。足りなければ篩の上限を倍にして引き直す。"""
    if count < 0:
        raise ValueError("count must be non-negative")
    limit = max(16, 2 * count)
    while True:
        sieve = np.ones(limit + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, int(limit ** 0.5) + 1):
            if sieve[p]:
                sieve[p * p :: p] = False
        primes = np.flatnonzero(sieve)
        if len(primes) >= count:
            return tuple(int(p) for p in primes[:count])
        limit *= 2


def _draw_s(n: int, rng: np.random.Generator) -> Tuple[Fraction, ...]:
    pool = prime_table(max(MIN_PRIME_POOL, 2 * n))
    picks = [int(p) for p in rng.choice(np.asarray(pool), size=2 * n, replace=False)]
    flips = rng.integers(0, 2, size=n)
    out = []
    for i in range(n):
        num, den = picks[i], picks[n + i]
        out.append(Fraction(num, den) if flips[i] else Fraction(num * den))
    return tuple(out)


def random_point(
    n: int,
    order_bound: int,
    rng: np.random.Generator,
    q: Optional[Fraction] = None,
    s: Optional[Sequence[Fraction]] = None,
    max_retries: int = DEFAULT_RETRIES,
) -> ParamPoint:
    """乱択で一般点を作る。q / s が与えられていればそれを使う。

    失敗したら引き直す（最大 `max_retries` 回）。使い切ったら `GenericityError`。
    """
    violations: List[Violation] = []
    for attempt in range(max_retries):
        cand_q = q if q is not None else _draw_q(rng)
        cand_s = tuple(s) if s is not None else _draw_s(n, rng)
        violations = find_violations(cand_q, cand_s, n, order_bound)
        if not violations:
            return ParamPoint(cand_q, cand_s, order_bound)
        logger.debug("redraw %d: %s", attempt + 1, violations[0])
        if q is not None and s is not None:
            break
    raise GenericityError(violations)


def random_rationals(rng: np.random.Generator, size: int, bound: int = 9, max_den: int = 7) -> Tuple[Fraction, ...]:
    """恒等式検査用の非零有理数ベクトル。"""
    out = []
    while len(out) < size:
        num = int(rng.integers(-bound, bound + 1))
        if num == 0:
            continue
        out.append(Fraction(num, int(rng.integers(1, max_den + 1))))
    return tuple(out)
