"""Straight-line programs: the grammar model, validation and brute-force oracles.

Positions are 0-based and ranges half-open everywhere in the package.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    BadRoot,
    CyclicReference,
    DanglingSymbol,
    LengthMismatch,
    OutOfRange,
    TooLarge,
)

log = logging.getLogger(__name__)

MAX_CODE = 0xFFFFFFFF
DEFAULT_CAP = 1 << 28
# symbols at most this long get their expansion memoized by expand_codes
_MEMO_LIMIT = 1 << 12


@dataclass(frozen=True, slots=True)
class Terminal:
    code: int


@dataclass(frozen=True, slots=True)
class Pair:
    left: int
    right: int


Rule = Union[Terminal, Pair]


def _check_rules(rules: Sequence[Rule], root: int) -> list[int]:
    """Check structure and return the recomputed expansion lengths."""
    n = len(rules)
    if not 0 <= root < n:
        raise BadRoot(f"root {root} not in [0, {n})")
    lengths = [0] * n
    for v, rule in enumerate(rules):
        if isinstance(rule, Terminal):
            if not 0 <= rule.code <= MAX_CODE:
                raise ValueError(f"rule {v}: terminal code {rule.code} out of range")
            lengths[v] = 1
        elif isinstance(rule, Pair):
            for child in (rule.left, rule.right):
                if not 0 <= child < n:
                    raise DanglingSymbol(f"rule {v} references missing symbol {child}")
                if child >= v:
                    raise CyclicReference(
                        f"rule {v} references symbol {child}; children must precede their parent"
                    )
            lengths[v] = lengths[rule.left] + lengths[rule.right]
        else:
            raise TypeError(f"rule {v}: not a Terminal or Pair: {rule!r}")
    return lengths


@dataclass(frozen=True)
class Slp:
    """A straight-line program deriving the single string ``S(root)``.

    Rules are stored in topological order: every ``Pair`` references strictly
    lower-numbered symbols, so acyclicity is a syntactic property.
    """

    rules: tuple[Rule, ...]
    root: int
    lengths: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.lengths:
            object.__setattr__(self, "lengths", tuple(_check_rules(self.rules, self.root)))

    @property
    def n(self) -> int:
        return len(self.rules)

    @property
    def N(self) -> int:
        return self.lengths[self.root]

    def alphabet_max(self) -> int:
        """Largest terminal code in the grammar."""
        return max(r.code for r in self.rules if isinstance(r, Terminal))

    def height(self) -> int:
        h = [0] * self.n
        for v, rule in enumerate(self.rules):
            if isinstance(rule, Pair):
                h[v] = 1 + max(h[rule.left], h[rule.right])
        return h[self.root]

    def reachable(self) -> list[bool]:
        seen = [False] * self.n
        seen[self.root] = True
        for v in range(self.n - 1, -1, -1):
            rule = self.rules[v]
            if seen[v] and isinstance(rule, Pair):
                seen[rule.left] = seen[rule.right] = True
        return seen


def validate(slp: Slp) -> None:
    """Raise a GrammarError if any grammar invariant fails.

    Unreachable rules are legal; they are only logged.
    """
    lengths = _check_rules(slp.rules, slp.root)
    if list(slp.lengths) != lengths:
        bad = next(v for v, (a, b) in enumerate(zip(slp.lengths, lengths)) if a != b) \
            if len(slp.lengths) == len(lengths) else len(lengths)
        raise LengthMismatch(f"stored length of symbol {bad} does not match its rule")
    unreachable = slp.n - sum(slp.reachable())
    if unreachable:
        log.warning("%d of %d rules are unreachable from the root", unreachable, slp.n)


def expand_codes(slp: Slp, v: int | None = None, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Expansion of symbol ``v`` (default: the root) as an int64 code array."""
    if v is None:
        v = slp.root
    if not 0 <= v < slp.n:
        raise OutOfRange(f"symbol {v} not in [0, {slp.n})")
    if slp.lengths[v] > cap:
        raise TooLarge(f"expansion of {v} has length {slp.lengths[v]} > cap {cap}")
    memo: dict[int, np.ndarray] = {}

    def small(u: int) -> np.ndarray:
        # bottom-up over the (short) subgrammar below u
        if u in memo:
            return memo[u]
        order, stack = [], [u]
        while stack:
            w = stack.pop()
            if w in memo:
                continue
            rule = slp.rules[w]
            if isinstance(rule, Terminal):
                memo[w] = np.array([rule.code], dtype=np.int64)
                continue
            order.append(w)
            stack.append(rule.left)
            stack.append(rule.right)
        for w in sorted(set(order)):
            if w not in memo:
                rule = slp.rules[w]
                memo[w] = np.concatenate((memo[rule.left], memo[rule.right]))
        return memo[u]

    pieces = []
    stack = [v]
    while stack:
        u = stack.pop()
        if slp.lengths[u] <= _MEMO_LIMIT:
            pieces.append(small(u))
        else:
            rule = slp.rules[u]
            stack.append(rule.right)
            stack.append(rule.left)
    return pieces[0] if len(pieces) == 1 else np.concatenate(pieces)


def codes_to_str(codes) -> str:
    return "".join(map(chr, codes))


def expand(slp: Slp, v: int | None = None, cap: int = DEFAULT_CAP) -> str:
    """Return ``S(v)`` as a Python string."""
    return codes_to_str(expand_codes(slp, v, cap).tolist())


def naive_access_code(slp: Slp, i: int) -> int:
    if not 0 <= i < slp.N:
        raise OutOfRange(f"position {i} not in [0, {slp.N})")
    v = slp.root
    rules, lengths = slp.rules, slp.lengths
    while True:
        rule = rules[v]
        if isinstance(rule, Terminal):
            return rule.code
        left = lengths[rule.left]
        if i < left:
            v = rule.left
        else:
            i -= left
            v = rule.right


def naive_access(slp: Slp, i: int) -> str:
    """Top-down descent using expansion lengths; work proportional to grammar height."""
    return chr(naive_access_code(slp, i))


def naive_lce(text: Sequence, i: int, j: int) -> int:
    """Character-scan longest common extension of ``text[i:]`` and ``text[j:]``."""
    n = len(text)
    if not (0 <= i < n and 0 <= j < n):
        raise OutOfRange(f"positions ({i}, {j}) not in [0, {n})")
    k = 0
    limit = n - max(i, j)
    while k < limit and text[i + k] == text[j + k]:
        k += 1
    return k
