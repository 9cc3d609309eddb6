"""Constant-time LCE over explicit strings: suffix array + LCP + sparse-table RMQ.

FullLce answers every pair of positions; SparseLce keeps only a sampled set of
suffixes and answers pairs drawn from that set, in space linear in the sample.
"""
from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EmptyInput, EmptySet, OutOfRange, UnsampledPosition


def as_codes(text) -> np.ndarray:
    if isinstance(text, str):
        return np.fromiter(map(ord, text), dtype=np.int64, count=len(text))
    return np.asarray(text, dtype=np.int64)


def suffix_array(text) -> np.ndarray:
    """Suffix array by prefix doubling; O(N log^2 N) numpy work."""
    codes = as_codes(text)
    n = len(codes)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    _, rank = np.unique(codes, return_inverse=True)
    rank = rank.astype(np.int64) + 1
    k = 1
    while True:
        second = np.zeros(n, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        key = rank * (n + 2) + second
        sa = np.argsort(key, kind="stable")
        sk = key[sa]
        new = np.empty(n, dtype=np.int64)
        new[sa] = np.concatenate(([1], 1 + np.cumsum(sk[1:] != sk[:-1])))
        rank = new
        if rank.max() == n or k >= n:
            return sa.astype(np.int64)
        k *= 2


def lcp_array(text, sa: np.ndarray) -> np.ndarray:
    """Kasai et al.: lcp[r] = LCE(sa[r-1], sa[r]); lcp[0] = 0."""
    codes = as_codes(text).tolist()
    n = len(codes)
    rank = [0] * n
    for r, p in enumerate(sa.tolist()):
        rank[p] = r
    sa_list = sa.tolist()
    lcp = [0] * n
    h = 0
    for i in range(n):
        r = rank[i]
        if r > 0:
            j = sa_list[r - 1]
            while i + h < n and j + h < n and codes[i + h] == codes[j + h]:
                h += 1
            lcp[r] = h
            if h:
                h -= 1
        else:
            h = 0
    return np.array(lcp, dtype=np.int64)


class RangeMin:
    """Sparse table over a fixed array: O(n log n) space, O(1) queries.

    ``argmin`` breaks ties toward the smallest index.
    """

    def __init__(self, arr: Sequence[int]):
        values = np.asarray(arr, dtype=np.int64)
        n = len(values)
        if n == 0:
            raise EmptyInput("range-minimum over an empty array")
        self.values = values
        levels = [np.arange(n, dtype=np.int64)]
        k = 1
        while 2 * k <= n:
            prev = levels[-1]
            a, b = prev[: n - 2 * k + 1], prev[k: n - k + 1]
            levels.append(np.where(values[a] <= values[b], a, b))
            k *= 2
        self.table = levels
        self._values = values.tolist()
        self._rows = [row.tolist() for row in levels]

    def __len__(self) -> int:
        return len(self._values)

    def argmin(self, lo: int, hi: int) -> int:
        """Index of the minimum of arr[lo..hi] (inclusive)."""
        if not 0 <= lo <= hi < len(self._values):
            raise OutOfRange(f"range [{lo}, {hi}] outside [0, {len(self._values)})")
        k = (hi - lo + 1).bit_length() - 1
        row = self._rows[k]
        a, b = row[lo], row[hi - (1 << k) + 1]
        return a if self._values[a] <= self._values[b] else b

    def min(self, lo: int, hi: int) -> int:
        k = (hi - lo + 1).bit_length() - 1
        row = self._rows[k]
        va, vb = self._values[row[lo]], self._values[row[hi - (1 << k) + 1]]
        return va if va <= vb else vb

    def min_many(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Vectorised ``min`` over inclusive ranges lo[t]..hi[t]."""
        if len(lo) == 0:
            return np.zeros(0, dtype=np.int64)
        width = hi - lo + 1
        k = np.floor(np.log2(width)).astype(np.int64)
        # guard float rounding at exact powers of two
        k = np.where((1 << (k + 1)) <= width, k + 1, k)
        k = np.where((1 << k) > width, k - 1, k)
        out = np.empty(len(lo), dtype=np.int64)
        for level in np.unique(k):
            sel = k == level
            row = self.table[level]
            a = self.values[row[lo[sel]]]
            b = self.values[row[hi[sel] - (1 << int(level)) + 1]]
            out[sel] = np.minimum(a, b)
        return out

    def nbytes(self) -> int:
        return sum(row.nbytes for row in self.table)


def range_min(arr: Sequence[int], lo: int, hi: int) -> int:
    """Index of the leftmost minimum of arr[lo..hi]; linear scan, for one-off use."""
    if not 0 <= lo <= hi < len(arr):
        raise OutOfRange(f"range [{lo}, {hi}] outside [0, {len(arr)})")
    best = lo
    for t in range(lo + 1, hi + 1):
        if arr[t] < arr[best]:
            best = t
    return best


class FullLce:
    """LCE of any two suffixes of a fixed text."""

    def __init__(self, text):
        codes = as_codes(text)
        if len(codes) == 0:
            raise EmptyInput("cannot index the empty string")
        sa = suffix_array(codes)
        self._setup(sa, lcp_array(codes, sa))

    @classmethod
    def from_arrays(cls, sa, lcp) -> "FullLce":
        """Rebuild from a stored suffix array and LCP array."""
        obj = cls.__new__(cls)
        obj._setup(np.asarray(sa, dtype=np.int64), np.asarray(lcp, dtype=np.int64))
        return obj

    def _setup(self, sa: np.ndarray, lcp: np.ndarray) -> None:
        self.n = len(sa)
        self.sa = sa
        self.lcp = lcp
        self.rank = np.empty(self.n, dtype=np.int64)
        self.rank[self.sa] = np.arange(self.n, dtype=np.int64)
        self.rmq = RangeMin(self.lcp)
        self._rank = self.rank.tolist()

    def lce(self, i: int, j: int) -> int:
        n = self.n
        if not (0 <= i < n and 0 <= j < n):
            raise OutOfRange(f"positions ({i}, {j}) not in [0, {n})")
        if i == j:
            return n - i
        a, b = self._rank[i], self._rank[j]
        if a > b:
            a, b = b, a
        return self.rmq.min(a + 1, b)

    def nbytes(self) -> int:
        return self.sa.nbytes + self.rank.nbytes + self.lcp.nbytes + self.rmq.nbytes()


def build_full(text) -> FullLce:
    return FullLce(text)


def lce_full(fl: FullLce, i: int, j: int) -> int:
    return fl.lce(i, j)


class SparseLce:
    """LCE restricted to a sampled set of suffix start positions."""

    def __init__(self, n: int, positions: np.ndarray, order: np.ndarray, lcp: np.ndarray):
        self.n = n
        self.positions = np.asarray(positions, dtype=np.int64)
        self.order = np.asarray(order, dtype=np.int64)  # sampled positions in suffix order
        self.lcp = np.asarray(lcp, dtype=np.int64)
        self.rmq = RangeMin(self.lcp)
        self._rank = dict(zip(self.order.tolist(), range(len(self.order))))

    @classmethod
    def build(cls, text, positions: Iterable[int], full: Optional[FullLce] = None) -> "SparseLce":
        codes = as_codes(text)
        pos = np.unique(np.fromiter(positions, dtype=np.int64))
        if len(pos) == 0:
            raise EmptySet("no sampled positions")
        if pos[0] < 0 or pos[-1] >= len(codes):
            raise OutOfRange("sampled position outside the text")
        if full is None:
            full = FullLce(codes)
        mask = np.zeros(len(codes), dtype=bool)
        mask[pos] = True
        order = full.sa[mask[full.sa]]
        ranks = full.rank[order]
        lcp = np.zeros(len(order), dtype=np.int64)
        lcp[1:] = full.rmq.min_many(ranks[:-1] + 1, ranks[1:])
        return cls(len(codes), pos, order, lcp)

    def __contains__(self, pos: int) -> bool:
        return pos in self._rank

    def __len__(self) -> int:
        return len(self.order)

    def lce(self, i: int, j: int) -> int:
        rank = self._rank
        if i not in rank or j not in rank:
            bad = i if i not in rank else j
            raise UnsampledPosition(bad)
        if i == j:
            return self.n - i
        a, b = rank[i], rank[j]
        if a > b:
            a, b = b, a
        return self.rmq.min(a + 1, b)

    def nbytes(self) -> int:
        return self.positions.nbytes + self.order.nbytes + self.lcp.nbytes + self.rmq.nbytes()


def build_sparse(text, positions: Iterable[int]) -> SparseLce:
    return SparseLce.build(text, positions)


def lce_sparse(sl: SparseLce, i: int, j: int) -> int:
    return sl.lce(i, j)
