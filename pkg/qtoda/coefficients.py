"""
q-Toda 固有関数の明示的な係数族。

役割
- `c_toda`: A_{N-1} 型固有関数の行列添字 Theta ごとの係数
- `d_toda`: c_toda の商（最終列ぶん）の閉じた形
- `e_branch`: B_N 型から A_{N-1} 型への分岐係数
- 検証で使う重み（contiguity 重み、漸化式の重み、有理恒等式の各項）

設計のポイント
- すべてパラメータ点での厳密評価。分母が 0 なら `DegeneratePointError`
- 負の成分を持つ添字の d / e は 0 とみなす（和の台が Z_{>=0} のため）
- 添字の列挙は深さ優先・行優先で決定的
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Mapping, Sequence, Tuple

from .scalars import ParamPoint, exact_div, qpoch
from .series import Exponent


ThetaVector = Tuple[int, ...]


def _check_vector(theta: Sequence[int], length: int, name: str = "theta") -> ThetaVector:
    theta = tuple(int(t) for t in theta)
    if len(theta) != length:
        raise ValueError(f"{name} must have length {length}, got {len(theta)}")
    return theta


@dataclass(frozen=True)
class ThetaMatrix:
    """狭義上三角の非負整数行列 (theta_{ij})_{i<j}。添字は 1 始まり。"""

    n: int
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.n or any(len(row) != self.n for row in self.entries):
            raise ValueError("entries must be an n x n matrix")
        for i, row in enumerate(self.entries):
            for j, v in enumerate(row):
                if v < 0:
                    raise ValueError("entries must be non-negative")
                if j <= i and v != 0:
                    raise ValueError("ThetaMatrix must be strictly upper triangular")

    @classmethod
    def from_upper(cls, n: int, values: Mapping[Tuple[int, int], int]) -> "ThetaMatrix":
        rows = [[0] * n for _ in range(n)]
        for (i, j), v in values.items():
            rows[i - 1][j - 1] = int(v)
        return cls(n, tuple(tuple(r) for r in rows))

    @classmethod
    def zero(cls, n: int) -> "ThetaMatrix":
        return cls.from_upper(n, {})

    def at(self, i: int, j: int) -> int:
        if 1 <= i <= self.n and 1 <= j <= self.n:
            return self.entries[i - 1][j - 1]
        return 0

    @property
    def degree(self) -> int:
        return sum((j - i) * self.at(i, j) for i in range(1, self.n + 1) for j in range(i + 1, self.n + 1))

    def exponent(self) -> Exponent:
        """prod_{i<j} (x_j/x_i)^{theta_ij} の指数ベクトル。"""
        m = [0] * self.n
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                v = self.at(i, j)
                m[j - 1] += v
                m[i - 1] -= v
        return tuple(m)

    def last_column(self) -> ThetaVector:
        return tuple(self.at(i, self.n) for i in range(1, self.n))

    def truncated(self) -> "ThetaMatrix":
        """最終行・最終列を落とした (n-1) 次の行列。"""
        return ThetaMatrix(self.n - 1, tuple(row[: self.n - 1] for row in self.entries[: self.n - 1]))


def iter_weighted(weights: Sequence[int], max_degree: int) -> Iterator[ThetaVector]:
    """sum_i weights_i * theta_i <= max_degree を満たす非負整数ベクトルを列挙。

    深さ優先、各成分の上限は 残り次数 // weight。
    """
    weights = [int(w) for w in weights]
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    values = [0] * len(weights)

    def walk(pos: int, budget: int) -> Iterator[ThetaVector]:
        if pos == len(weights):
            yield tuple(values)
            return
        w = weights[pos]
        for v in range(budget // w + 1):
            values[pos] = v
            yield from walk(pos + 1, budget - v * w)
        values[pos] = 0

    yield from walk(0, max_degree)


def iter_theta_matrices(n: int, max_degree: int) -> Iterator[ThetaMatrix]:
    """次数 max_degree 以下の ThetaMatrix を行優先の深さ優先で列挙。"""
    cells = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    for values in iter_weighted([j - i for i, j in cells], max_degree):
        yield ThetaMatrix.from_upper(n, dict(zip(cells, values)))


def branching_weights(n: int) -> Tuple[int, ...]:
    """prod_i x_i^{-theta_i} の錐次数の重み (N+1-i)。"""
    return tuple(n + 1 - i for i in range(1, n + 1))


def recursion_weights(n: int) -> Tuple[int, ...]:
    """prod_i (x_N/x_i)^{theta_i} の錐次数の重み (N-i)。"""
    return tuple(n - i for i in range(1, n))


def _inv_poch(a: Fraction, q: Fraction, n: int, what: str) -> Fraction:
    return exact_div(Fraction(1), qpoch(a, q, n), what)


def c_toda(theta: ThetaMatrix, p: ParamPoint) -> Fraction:
    """A_{N-1} 型 q-Toda 固有関数の係数 c_N(Theta; s; q)。"""
    n = p.n
    if theta.n != n:
        raise ValueError("ThetaMatrix rank does not match the parameter point")
    q, s = p.q, p.s
    th = theta.at
    value = Fraction(1)
    for k in range(2, n + 1):
        for i in range(1, k):
            t = th(i, k)
            if t == 0:
                continue
            for j in range(i, k):
                tail_next = sum(th(i, a) - th(j + 1, a) for a in range(k + 1, n + 1))
                tail_same = sum(th(i, a) - th(j, a) for a in range(k + 1, n + 1))
                first = q ** (tail_next + 1) * s[j] / s[i - 1]
                second = q ** (th(j, k) - t - tail_same + 1) * s[i - 1] / s[j - 1]
                value *= q ** t
                value *= _inv_poch(first, q, t, f"c_toda pole at (i,j,k)=({i},{j},{k})")
                value *= _inv_poch(second, q, t, f"c_toda pole at (i,j,k)=({i},{j},{k})")
    return value


def d_toda(theta: Sequence[int], p: ParamPoint) -> Fraction:
    """c_N / c_{N-1}（最終列ぶんの商）の閉じた形 d_N(theta; s; q)。N >= 2。"""
    n = p.n
    if n < 2:
        raise ValueError("d_toda needs N >= 2")
    theta = _check_vector(theta, n - 1)
    if any(t < 0 for t in theta):
        return Fraction(0)
    q, s = p.q, p.s
    value = Fraction(1)
    for i in range(1, n):
        t = theta[i - 1]
        if t == 0:
            continue
        value *= q ** t
        value *= _inv_poch(q, q, t, "(q;q)")
        value *= _inv_poch(q * s[n - 1] / s[i - 1], q, t, f"(q s{n}/s{i};q)")
        for j in range(i + 1, n):
            value *= q ** t
            value *= _inv_poch(q * s[j - 1] / s[i - 1], q, t, f"(q s{j}/s{i};q)")
            value *= _inv_poch(q ** (theta[j - 1] - t + 1) * s[i - 1] / s[j - 1], q, t, f"(q^.. s{i}/s{j};q)")
    return value


def e_branch(theta: Sequence[int], p: ParamPoint) -> Fraction:
    """分岐係数 e^{B_N/A_{N-1}}_theta(s|q)。"""
    n = p.n
    theta = _check_vector(theta, n)
    if any(t < 0 for t in theta):
        return Fraction(0)
    q, s = p.q, p.s
    value = Fraction(1)
    for k in range(1, n + 1):
        t = theta[k - 1]
        if t == 0:
            continue
        value *= q ** ((n - k + 1) * t)
        value *= _inv_poch(q, q, t, "(q;q)")
        value *= _inv_poch(q / s[k - 1] ** 2, q, t, f"(q/s{k}^2;q)")
    for i in range(1, n + 1):
        ti = theta[i - 1]
        for j in range(i + 1, n + 1):
            tj = theta[j - 1]
            value *= _inv_poch(q * s[j - 1] / s[i - 1], q, ti, f"(q s{j}/s{i};q)")
            value *= _inv_poch(q ** (tj - ti + 1) * s[i - 1] / s[j - 1], q, ti, f"(q^.. s{i}/s{j};q)")
            base = q / (s[i - 1] * s[j - 1])
            value *= qpoch(base, q, ti + tj)
            value *= _inv_poch(base, q, ti, f"(q/s{i}s{j};q)")
            value *= _inv_poch(base, q, tj, f"(q/s{i}s{j};q)")
    return value


def contiguity_weight(k: int, p: ParamPoint) -> Fraction:
    """contiguity 関係の k 番目の重み。

    (-1)^{N-k} q^{N-k} prod_{k<i<N} (s_i/s_k) / prod_{k<i<=N} (1 - s_i/s_k)(1 - q s_i/s_k)
    """
    n = p.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}")
    q, s = p.q, p.s
    sk = s[k - 1]
    num = (-1) ** (n - k) * q ** (n - k)
    for i in range(k + 1, n):
        num *= s[i - 1] / sk
    den = Fraction(1)
    for i in range(k + 1, n + 1):
        u = s[i - 1] / sk
        den *= (1 - u) * (1 - q * u)
    return exact_div(num, den, f"contiguity weight k={k}")


def recursion_weight(theta: Sequence[int], k: int, p: ParamPoint) -> Fraction:
    """分岐係数の漸化式で e(theta - eps_k) に掛かる重み（delta は theta_N の指数に付く）。"""
    n = p.n
    theta = _check_vector(theta, n)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}")
    q, s = p.q, p.s
    tk, sk = theta[k - 1], s[k - 1]
    delta = 1 if k == n else 0
    num = s[n - 1] * (-1) ** (n - k + 1) * q ** (-theta[n - 1] + delta) * q ** (n - k)
    for i in range(k + 1, n):
        num *= q ** (-theta[i - 1] + tk - 1) * s[i - 1] / sk
    den = Fraction(1)
    for i in range(k + 1, n + 1):
        u = q ** (-theta[i - 1] + tk - 1) * s[i - 1] / sk
        den *= (1 - u) * (1 - q * u)
    return exact_div(num, den, f"recursion weight k={k}")


def partition_summand(k: int, a: Sequence[Fraction], s: Sequence[Fraction]) -> Fraction:
    """有理恒等式 prod a_i = sum_k (...) の k 番目の項。"""
    n = len(s)
    sk = s[k - 1]
    num = sk / s[n - 1]
    for i in range(1, n):
        num *= 1 - a[i - 1] * sk / s[i - 1]
    den = Fraction(1)
    for i in range(1, n + 1):
        if i != k:
            den *= 1 - sk / s[i - 1]
    return exact_div(num, den, "coincident s values")


def typeb_summand(k: int, big_q: Sequence[Fraction], s: Sequence[Fraction]) -> Fraction:
    """B 型の有理恒等式の右辺 k 番目の項。"""
    n = len(s)
    sk = s[k - 1]
    num = sk
    for i in range(1, n + 1):
        qi, si = big_q[i - 1], s[i - 1]
        num *= (1 - qi * si / sk) * (1 - 1 / (qi * si * sk))
    den = Fraction(1)
    for i in range(1, n + 1):
        if i != k:
            si = s[i - 1]
            den *= (1 - si / sk) * (1 - 1 / (si * sk))
    return exact_div(num, den, "coincident s values")


def reduced_recursion_summand(k: int, theta: Sequence[int], p: ParamPoint) -> Fraction:
    """分岐係数の漸化式を e の比で割った後の右辺 k 番目の項（符号込み）。"""
    n = p.n
    theta = _check_vector(theta, n)
    q, s = p.q, p.s
    tk, sk = theta[k - 1], s[k - 1]
    num = -(q ** (-tk)) * sk
    for i in range(1, n + 1):
        si = s[i - 1]
        num *= (1 - q ** tk * si / sk) * (1 - q ** tk / (si * sk))
    den = Fraction(1)
    for i in range(1, n + 1):
        if i == k:
            continue
        ti, si = theta[i - 1], s[i - 1]
        den *= (1 - q ** (tk - ti) * si / sk) * (1 - q ** (tk + ti) / (si * sk))
    return exact_div(num, den, f"reduced recursion k={k}")


def recursion_eigen_gap(theta: Sequence[int], p: ParamPoint) -> Fraction:
    """sum_i ((1 - q^{-theta_i}) s_i + (1 - q^{theta_i}) s_i^{-1})。"""
    q = p.q
    return sum(((1 - q ** (-t)) * v + (1 - q ** t) / v for t, v in zip(theta, p.s)), Fraction(0))


def branch_table(p: ParamPoint, max_degree: int) -> List[Tuple[ThetaVector, Fraction]]:
    """重み sum (N+1-i) theta_i <= max_degree の (theta, e_branch) の表。"""
    return [(theta, e_branch(theta, p)) for theta in iter_weighted(branching_weights(p.n), max_degree)]


def bump(theta: Sequence[int], k: int, delta: int) -> ThetaVector:
    """theta_k に delta を足したベクトル（k は 1 始まり）。"""
    out = list(theta)
    out[k - 1] += delta
    return tuple(out)


def weighted_degree(weights: Sequence[int], theta: Sequence[int]) -> int:
    return sum(w * t for w, t in zip(weights, theta))

