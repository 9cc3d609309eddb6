"""Difference cover modulo a perfect square tau.

D = {0, ..., s-1} U {i*s mod tau : i = 1..s} with s = sqrt(tau) has 2s - 1
elements, and every residue d has a witness pair computable by arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from .errors import NotPerfectSquare, OutOfRange, TooSmall


@dataclass(frozen=True)
class DifferenceCover:
    tau: int
    s: int
    elements: tuple[int, ...]
    membership: bytes  # membership[r] == 1 iff r is in the cover

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, residue: int) -> bool:
        return 0 <= residue < self.tau and self.membership[residue] == 1

    def cover_pair(self, d: int) -> tuple[int, int]:
        return cover_pair(self, d)

    def align(self, i: int, j: int) -> tuple[int, int]:
        return align(self, i, j)

    def is_sampled(self, pos: int) -> bool:
        return self.membership[pos % self.tau] == 1


def build(tau: int) -> DifferenceCover:
    if tau < 4:
        raise TooSmall(f"tau must be at least 4, got {tau}")
    s = isqrt(tau)
    if s * s != tau:
        raise NotPerfectSquare(f"tau={tau} is not a perfect square")
    elems = sorted(set(range(s)) | {(i * s) % tau for i in range(1, s + 1)})
    member = bytearray(tau)
    for e in elems:
        member[e] = 1
    return DifferenceCover(tau, s, tuple(elems), bytes(member))


def square_floor(x: int) -> int:
    """Largest perfect square <= x (at least 4)."""
    r = isqrt(max(x, 4))
    return r * r


def cover_pair(dc: DifferenceCover, d: int) -> tuple[int, int]:
    """Members (a, b) with (b - a) mod tau == d, by arithmetic only."""
    if not 0 <= d < dc.tau:
        raise OutOfRange(f"distance {d} not in [0, {dc.tau})")
    r = d % dc.s
    if r == 0:
        return 0, d
    a = dc.s - r
    return a, (a + d) % dc.tau


def align(dc: DifferenceCover, i: int, j: int) -> tuple[int, int]:
    """Shift (i, j) by the same 0 < delta <= tau onto sampled positions.

    The shift comes from the constructive witness pair and is not always the
    smallest possible one.
    """
    a, _ = cover_pair(dc, (j - i) % dc.tau)
    delta = (a - i) % dc.tau or dc.tau
    return i + delta, j + delta


def is_sampled(dc: DifferenceCover, pos: int) -> bool:
    return dc.membership[pos % dc.tau] == 1
