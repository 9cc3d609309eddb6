import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import lcp_table
from slpindex.errors import EmptyInput, EmptySet, OutOfRange, UnsampledPosition
from slpindex.lce_core import (FullLce, RangeMin, SparseLce, build_full, build_sparse,
                               lce_full, lce_sparse, lcp_array, range_min, suffix_array)
from slpindex.slp import naive_lce


def _sorted_suffixes(text):
    return sorted(range(len(text)), key=lambda i: text[i:])


def test_banana():
    fl = build_full("banana")
    assert fl.sa.tolist() == [5, 3, 1, 0, 4, 2] == _sorted_suffixes("banana")
    assert lce_full(fl, 1, 3) == 3
    assert lce_full(fl, 2, 2) == 4


def test_aaa_lcp():
    # suffixes in order: "a", "aa", "aaa"; adjacent common prefixes are 1 and 2
    fl = build_full("aaa")
    assert fl.sa.tolist() == [2, 1, 0]
    assert fl.lcp.tolist()[1:] == [1, 2]


def test_single_char_and_empty():
    fl = build_full("x")
    assert fl.sa.tolist() == [0] and fl.lce(0, 0) == 1
    with pytest.raises(EmptyInput):
        build_full("")


def test_lce_full_small_cases():
    fl = build_full("abab")
    assert fl.lce(0, 2) == 2
    with pytest.raises(OutOfRange):
        fl.lce(0, 4)


def test_sparse_examples():
    sl = build_sparse("abcabd", [0, 3])
    assert sl.order.tolist() == [0, 3]
    assert sl.lcp.tolist()[1:] == [2]
    assert lce_sparse(sl, 0, 3) == 2
    assert lce_sparse(sl, 0, 0) == 6
    with pytest.raises(UnsampledPosition):
        lce_sparse(sl, 1, 3)
    only = build_sparse("abcabd", [0])
    assert only.lce(0, 0) == 6
    with pytest.raises(EmptySet):
        build_sparse("abc", [])
    with pytest.raises(OutOfRange):
        build_sparse("abc", [3])


def test_range_min_examples():
    assert range_min([3, 1, 2], 0, 2) == 1
    assert range_min([3, 1, 2], 2, 2) == 2
    assert range_min([2, 1, 1], 0, 2) == 1
    assert RangeMin([2, 1, 1]).argmin(0, 2) == 1
    with pytest.raises(OutOfRange):
        range_min([1], 0, 1)


@given(st.lists(st.integers(0, 5), min_size=1, max_size=60), st.data())
def test_range_min_matches_scan(arr, data):
    rm = RangeMin(arr)
    lo = data.draw(st.integers(0, len(arr) - 1))
    hi = data.draw(st.integers(lo, len(arr) - 1))
    assert rm.argmin(lo, hi) == range_min(arr, lo, hi)
    assert rm.min(lo, hi) == min(arr[lo:hi + 1])
    got = rm.min_many(np.array([lo]), np.array([hi]))
    assert got.tolist() == [min(arr[lo:hi + 1])]


@settings(max_examples=150, deadline=None)
@given(st.text(alphabet="ab", min_size=1, max_size=80))
def test_suffix_array_and_lcp(text):
    sa = suffix_array(text)
    assert sa.tolist() == _sorted_suffixes(text)
    lcp = lcp_array(text, sa)
    for r in range(1, len(text)):
        assert lcp[r] == naive_lce(text, sa[r - 1], sa[r])


def _all_pairs(fl):
    """Every lce(i, j) through the rank/range-min identity, one row at a time."""
    n = fl.n
    out = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        a = np.full(n, fl.rank[i])
        lo, hi = np.minimum(a, fl.rank) + 1, np.maximum(a, fl.rank)
        row = np.zeros(n, dtype=np.int64)
        off = np.arange(n) != i
        row[off] = fl.rmq.min_many(lo[off], hi[off])
        row[i] = n - i
        out[i] = row
    return out


@pytest.mark.parametrize("sigma", [1, 2, 26])
def test_full_exhaustive(sigma):
    rng = random.Random(sigma)
    for length in (1, 2, 17, 300, 2000):
        text = "".join(rng.choice("abcdefghijklmnopqrstuvwxyz"[:sigma]) for _ in range(length))
        fl = FullLce(text)
        table = lcp_table(text)
        n = len(text)
        assert np.array_equal(_all_pairs(fl), table)
        for _ in range(200):
            i, j = rng.randrange(n), rng.randrange(n)
            assert fl.lce(i, j) == table[i, j]


def test_full_random_pairs_long():
    rng = random.Random(0)
    text = "".join(rng.choice("ab") for _ in range(20_000))
    fl = FullLce(text)
    for _ in range(2000):
        i, j = rng.randrange(len(text)), rng.randrange(len(text))
        assert fl.lce(i, j) == naive_lce(text, i, j)


def test_sparse_random_instances():
    rng = random.Random(12)
    for _ in range(500):
        n = rng.randint(1, 120)
        text = "".join(rng.choice("abc"[:rng.randint(1, 3)]) for _ in range(n))
        pos = sorted(set(rng.sample(range(n), rng.randint(1, n))))
        sl = SparseLce.build(text, pos)
        assert [text[p:] for p in sl.order.tolist()] == sorted(text[p:] for p in pos)
        for i in pos:
            for j in pos[:10]:
                assert sl.lce(i, j) == naive_lce(text, i, j)


def test_separator_codes_sort_by_value():
    codes = [1, 2, 1000, 1, 2, 1001, 1, 2]
    fl = FullLce(codes)
    assert fl.lce(0, 3) == 2 and fl.lce(0, 6) == 2 and fl.lce(2, 5) == 0
    assert fl.sa.tolist() == sorted(range(8), key=lambda i: codes[i:])
