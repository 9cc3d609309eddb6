"""Re-Pair style grammar construction: repeatedly replace the most frequent digram."""
from __future__ import annotations

import heapq
from collections import defaultdict
from typing import Sequence, Union

from .errors import EmptyInput
from .slp import Pair, Rule, Slp, Terminal


def _codes(text: Union[str, Sequence[int]]) -> list[int]:
    if isinstance(text, str):
        return [ord(c) for c in text]
    return [int(c) for c in text]


def build_grammar(text: Union[str, Sequence[int]]) -> Slp:
    """Compress ``text`` into an SLP whose root expands back to ``text``.

    Digram occurrences live in a doubly linked list over the working sequence
    and a lazy max-heap keyed by occurrence count, so each replacement costs
    time proportional to the occurrences it rewrites.
    """
    codes = _codes(text)
    if not codes:
        raise EmptyInput("cannot build a grammar for the empty string")

    rules: list[Rule] = [Terminal(c) for c in sorted(set(codes))]
    sym_of = {r.code: v for v, r in enumerate(rules)}
    seq = [sym_of[c] for c in codes]
    size = len(seq)
    nxt = list(range(1, size + 1))
    nxt[-1] = -1
    prv = list(range(-1, size - 1))

    occ: dict[tuple[int, int], set[int]] = defaultdict(set)
    for p in range(size - 1):
        occ[(seq[p], seq[p + 1])].add(p)
    heap = [(-len(ps), pair) for pair, ps in occ.items() if len(ps) > 1]
    heapq.heapify(heap)

    def drop(p: int) -> None:
        q = nxt[p]
        if p < 0 or q < 0:
            return
        ps = occ.get((seq[p], seq[q]))
        if ps is not None:
            ps.discard(p)

    def add(p: int) -> None:
        q = nxt[p]
        if p < 0 or q < 0:
            return
        pair = (seq[p], seq[q])
        ps = occ[pair]
        ps.add(p)
        if len(ps) > 1:
            heapq.heappush(heap, (-len(ps), pair))

    while heap:
        neg, pair = heapq.heappop(heap)
        ps = occ.get(pair)
        if ps is None or len(ps) != -neg:
            if ps is not None and len(ps) > 1:
                heapq.heappush(heap, (-len(ps), pair))
            continue
        new = len(rules)
        rules.append(Pair(*pair))
        a, b = pair
        for p in sorted(ps):
            q = nxt[p]
            # earlier replacements in a run such as "aaa" invalidate overlaps
            if seq[p] != a or q < 0 or seq[q] != b:
                continue
            left, right = prv[p], nxt[q]
            drop(left)
            drop(p)
            drop(q)
            seq[p] = new
            seq[q] = -1
            nxt[p] = right
            if right >= 0:
                prv[right] = p
            add(left)
            add(p)
        occ.pop(pair, None)

    # balanced tree over what remains
    level = []
    p = 0
    while p >= 0:
        level.append(seq[p])
        p = nxt[p]
    made: dict[tuple[int, int], int] = {}
    while len(level) > 1:
        up = []
        for k in range(0, len(level) - 1, 2):
            key = (level[k], level[k + 1])
            if key not in made:
                made[key] = len(rules)
                rules.append(Pair(*key))
            up.append(made[key])
        if len(level) % 2:
            up.append(level[-1])
        level = up
    return Slp(tuple(rules), level[0])
