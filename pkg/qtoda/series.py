"""
単項式錐上の打ち切り形式級数。

役割
- 錐 (TypeA: x_{i+1}/x_i, TypeB: それに 1/x_N を加えたもの) の座標計算
- 打ち切り級数の加法・スカラー倍・積・単項式倍・q シフト
- JSON への直列化

設計のポイント
- 項は指数ベクトル（`Tuple[int, ...]`）をキーとする dict。辞書順で保持して出力を決定的にする
- 次数 = 錐座標の和。作用素の単項式因子はすべて次数 0 か 1 になる
- 「order M」は次数 M 以下の係数が厳密であることを表し、積は M を超える項を捨てる
- 軸番号は 1 始まり（T_{q,x_i} の i と同じ）
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .scalars import RationalLike, format_rational, parse_rational, to_rational


TYPE_A = "TypeA"
TYPE_B = "TypeB"

Exponent = Tuple[int, ...]


class ConeMembershipError(ValueError):
    """指数ベクトルが錐に入っていない。最初に見つかった負の座標を持つ。"""

    def __init__(self, exponent: Exponent, coordinate: str, value: int):
        self.exponent = exponent
        self.coordinate = coordinate
        self.value = value
        super().__init__(f"exponent {list(exponent)} is outside the cone: {coordinate} = {value}")


class VariantMismatchError(ValueError):
    """異なる錐（または変数の数）の級数同士を演算しようとした。"""


@dataclass(frozen=True)
class ConeVariant:
    tag: str
    n: int

    def __post_init__(self) -> None:
        if self.tag not in (TYPE_A, TYPE_B):
            raise ValueError(f"unknown cone variant: {self.tag!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def rank(self) -> int:
        return self.n - 1 if self.tag == TYPE_A else self.n

    def generators(self) -> np.ndarray:
        """錐の生成元を行に並べた整数行列（rank x n）。"""
        rows = []
        for i in range(self.n - 1):
            g = np.zeros(self.n, dtype=np.int64)
            g[i], g[i + 1] = -1, 1
            rows.append(g)
        if self.tag == TYPE_B:
            g = np.zeros(self.n, dtype=np.int64)
            g[-1] = -1
            rows.append(g)
        return np.array(rows, dtype=np.int64).reshape(self.rank, self.n)


@dataclass(frozen=True)
class ConeMonomial:
    exponents: Exponent
    coords: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.coords)


@lru_cache(maxsize=65536)
def _coords(m: Exponent, variant: ConeVariant) -> ConeMonomial:
    # 生成元は格子基底なので、座標は部分和の符号反転で一意に決まる
    prefix = -np.cumsum(np.asarray(m, dtype=np.int64))
    a = [int(v) for v in prefix[:-1]]
    b = int(prefix[-1])
    for idx, v in enumerate(a):
        if v < 0:
            raise ConeMembershipError(m, f"a{idx + 1}", v)
    if variant.tag == TYPE_A:
        if b != 0:
            raise ConeMembershipError(m, "b", b)
        return ConeMonomial(m, tuple(a))
    if b < 0:
        raise ConeMembershipError(m, "b", b)
    return ConeMonomial(m, tuple(a) + (b,))


def cone_coords(m: Sequence[int], variant: ConeVariant) -> ConeMonomial:
    """指数ベクトル m の錐座標を返す。錐の外なら `ConeMembershipError`。"""
    m = tuple(int(v) for v in m)
    if len(m) != variant.n:
        raise ValueError(f"exponent length {len(m)} does not match N = {variant.n}")
    return _coords(m, variant)


def in_cone(m: Sequence[int], variant: ConeVariant) -> bool:
    try:
        cone_coords(m, variant)
    except ConeMembershipError:
        return False
    return True


def degree(m: Sequence[int], variant: ConeVariant) -> int:
    return cone_coords(m, variant).degree


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def monomials_of_degree(variant: ConeVariant, d: int) -> List[Exponent]:
    """次数ちょうど d の錐単項式（指数ベクトル、辞書順）。"""
    gens = variant.generators()
    out = []
    for coords in _compositions(d, variant.rank):
        if variant.rank == 0:
            out.append((0,) * variant.n)
            continue
        m = np.asarray(coords, dtype=np.int64) @ gens
        out.append(tuple(int(v) for v in m))
    return sorted(out)


def iter_cone_monomials(variant: ConeVariant, max_degree: int) -> Iterator[Exponent]:
    """次数 max_degree 以下の錐単項式を次数順に列挙する。"""
    for d in range(max_degree + 1):
        yield from monomials_of_degree(variant, d)


class TruncatedSeries:
    """錐上の打ち切り級数（不変）。"""

    __slots__ = ("_variant", "_order", "_terms")

    def __init__(self, variant: ConeVariant, order: int, terms: Optional[Mapping[Sequence[int], RationalLike]] = None):
        if order < 0:
            raise ValueError("order must be non-negative")
        clean: Dict[Exponent, Fraction] = {}
        for m, c in (terms or {}).items():
            key = tuple(int(v) for v in m)
            value = to_rational(c)
            if cone_coords(key, variant).degree > order:
                continue
            clean[key] = clean.get(key, Fraction(0)) + value
        self._variant = variant
        self._order = order
        self._terms = {m: c for m, c in sorted(clean.items()) if c != 0}

    @classmethod
    def _trusted(cls, variant: ConeVariant, order: int, terms: Mapping[Exponent, Fraction]) -> "TruncatedSeries":
        # 内部用: 錐の所属と次数は呼び出し側で保証済み
        out = cls.__new__(cls)
        out._variant = variant
        out._order = order
        out._terms = {m: c for m, c in sorted(terms.items()) if c != 0}
        return out

    @property
    def variant(self) -> ConeVariant:
        return self._variant

    @property
    def order(self) -> int:
        return self._order

    @property
    def n(self) -> int:
        return self._variant.n

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return MappingProxyType(self._terms)

    def coefficient(self, m: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(m), Fraction(0))

    def degree_of(self, m: Sequence[int]) -> int:
        return degree(m, self._variant)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self._variant == other._variant and self._order == other._order and self._terms == other._terms

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        shown = ", ".join(f"{list(m)}: {c}" for m, c in list(self._terms.items())[:6])
        more = ", ..." if len(self._terms) > 6 else ""
        return f"TruncatedSeries({self._variant.tag}, n={self.n}, order={self._order}, {{{shown}{more}}})"

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return add(self, other)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return add(self, scale(other, -1))

    def __neg__(self) -> "TruncatedSeries":
        return scale(self, -1)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return mul(self, other)

    def truncate(self, order: int) -> "TruncatedSeries":
        """次数 order 以下だけを残す（order は元の order 以下）。"""
        if order > self._order:
            raise ValueError("cannot raise the order of a truncated series")
        var = self._variant
        return TruncatedSeries._trusted(var, order, {m: c for m, c in self._terms.items() if degree(m, var) <= order})

    def embed(self, variant: ConeVariant) -> "TruncatedSeries":
        """TypeA の級数を変数を増やした TypeA、または TypeB の錐へ読み替える。

        指数は末尾に 0 を足して延長する。次数は変わらない。
        """
        if variant.n < self.n:
            raise ValueError("cannot embed into fewer variables")
        if self._variant.tag == TYPE_B and variant.tag == TYPE_A:
            raise VariantMismatchError("a TypeB series does not embed into a TypeA cone")
        pad = (0,) * (variant.n - self.n)
        terms = {}
        for m, c in self._terms.items():
            key = m + pad
            cone_coords(key, variant)
            terms[key] = c
        return TruncatedSeries._trusted(variant, self._order, terms)

    def to_json(self) -> dict:
        return {
            "variant": self._variant.tag,
            "n": self.n,
            "order": self._order,
            "terms": [{"exponent": list(m), "coefficient": format_rational(c)} for m, c in self._terms.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TruncatedSeries":
        variant = ConeVariant(data["variant"], int(data["n"]))
        terms = {tuple(t["exponent"]): parse_rational(str(t["coefficient"])) for t in data["terms"]}
        return cls(variant, int(data["order"]), terms)


def zero(variant: ConeVariant, order: int) -> TruncatedSeries:
    return TruncatedSeries._trusted(variant, order, {})


def constant(variant: ConeVariant, order: int, value: RationalLike = 1) -> TruncatedSeries:
    return TruncatedSeries(variant, order, {(0,) * variant.n: value})


def monomial(variant: ConeVariant, order: int, m: Sequence[int], value: RationalLike = 1) -> TruncatedSeries:
    return TruncatedSeries(variant, order, {tuple(m): value})


def _check_same(f: TruncatedSeries, g: TruncatedSeries) -> None:
    if f.variant != g.variant:
        raise VariantMismatchError(f"{f.variant} vs {g.variant}")


def add(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """係数ごとの和。order は小さい方。"""
    _check_same(f, g)
    order = min(f.order, g.order)
    var = f.variant
    terms: Dict[Exponent, Fraction] = {}
    for src in (f, g):
        for m, c in src.terms.items():
            if degree(m, var) <= order:
                terms[m] = terms.get(m, Fraction(0)) + c
    return TruncatedSeries._trusted(var, order, terms)


def scale(f: TruncatedSeries, c: RationalLike) -> TruncatedSeries:
    c = to_rational(c)
    if c == 0:
        return zero(f.variant, f.order)
    return TruncatedSeries._trusted(f.variant, f.order, {m: c * v for m, v in f.terms.items()})


def mul(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """コーシー積。次数 min(order_f, order_g) を超える項は捨てる。"""
    _check_same(f, g)
    order = min(f.order, g.order)
    var = f.variant
    left = [(m, c, degree(m, var)) for m, c in f.terms.items()]
    right = [(m, c, degree(m, var)) for m, c in g.terms.items()]
    terms: Dict[Exponent, Fraction] = {}
    for u, cu, du in left:
        if du > order:
            continue
        for v, cv, dv in right:
            if du + dv > order:
                continue
            key = tuple(a + b for a, b in zip(u, v))
            terms[key] = terms.get(key, Fraction(0)) + cu * cv
    return TruncatedSeries._trusted(var, order, terms)


def mul_monomial(f: TruncatedSeries, g: Union[Sequence[int], ConeMonomial], order: Optional[int] = None) -> TruncatedSeries:
    """単項式 x^g を掛ける。g が錐の外なら `ConeMembershipError`。

    結果の order は既定で f.order。f が order d まで厳密なら x^g f は
    d + deg(g) まで厳密なので、呼び出し側はそこまで order を上げてよい。
    """
    exps = g.exponents if isinstance(g, ConeMonomial) else tuple(int(v) for v in g)
    shift_deg = cone_coords(exps, f.variant).degree
    order = f.order if order is None else order
    if order > f.order + shift_deg:
        raise ValueError("requested order exceeds what the factor series determines")
    var = f.variant
    terms = {}
    for m, c in f.terms.items():
        if degree(m, var) + shift_deg > order:
            continue
        terms[tuple(a + b for a, b in zip(m, exps))] = c
    return TruncatedSeries._trusted(var, order, terms)


def shift(f: TruncatedSeries, axis: int, sign: int, q: RationalLike) -> TruncatedSeries:
    """T_{q,x_axis}^{sign}: 指数 m の係数に q^{sign * m_axis} を掛ける。"""
    if not 1 <= axis <= f.n:
        raise ValueError(f"axis must be in 1..{f.n}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    q = to_rational(q)
    return TruncatedSeries._trusted(f.variant, f.order, {m: c * q ** (sign * m[axis - 1]) for m, c in f.terms.items()})


def remap_exponents(f: TruncatedSeries, fn: Callable[[Exponent], Sequence[int]], variant: Optional[ConeVariant] = None) -> TruncatedSeries:
    """指数ベクトルを fn で写した級数（次数を保つ写像に限る）。"""
    var = variant or f.variant
    terms = {}
    for m, c in f.terms.items():
        key = tuple(int(v) for v in fn(m))
        if cone_coords(key, var).degree != degree(m, f.variant):
            raise ValueError("exponent map does not preserve the cone degree")
        terms[key] = c
    return TruncatedSeries._trusted(var, f.order, terms)


def ordered_exponents(variant: ConeVariant, exponents: Iterable[Exponent]) -> List[Exponent]:
    """(次数, 辞書順) で並べる。検証レポートの「最初の不一致」に使う。"""
    return sorted(set(exponents), key=lambda m: (degree(m, variant), m))
