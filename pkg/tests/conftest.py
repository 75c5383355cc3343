from __future__ import annotations

import pytest

from qtoda.scalars import ParamPoint, genericity_check


# 一般性を確認済みの固定点（小さい N では s の先頭を使う）
POINTS = (
    ("3/7", ("2", "5", "11", "13")),
    ("2/5", ("3", "7", "17", "19")),
    ("5/11", ("2/3", "7/13", "17/5", "19/7")),
)


def certified_point(index: int, n: int, order_bound: int) -> ParamPoint:
    q, s = POINTS[index]
    return genericity_check(q, s[:n], n, order_bound)


@pytest.fixture(params=range(len(POINTS)), ids=["p0", "p1", "p2"])
def point_index(request) -> int:
    return request.param


@pytest.fixture
def make_point(point_index):
    """make_point(n, order_bound) -> その固定点の先頭 n 成分。"""

    def _make(n: int, order_bound: int = 5) -> ParamPoint:
        return certified_point(point_index, n, order_bound)

    return _make


@pytest.fixture
def first_point():
    def _make(n: int, order_bound: int = 5) -> ParamPoint:
        return certified_point(0, n, order_bound)

    return _make
