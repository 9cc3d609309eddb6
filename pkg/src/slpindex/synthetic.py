"""Synthetic grammar families and random SLPs used for testing and benchmarks."""
from __future__ import annotations

import random
from typing import Optional

from .slp import Pair, Rule, Slp, Terminal

KINDS = ("chain", "fibonacci", "thue-morse")


def chain(c: str, k: int) -> Slp:
    """c repeated 2**k times; a unary grammar of maximal depth k."""
    if k < 0:
        raise ValueError("k must be non-negative")
    rules: list[Rule] = [Terminal(ord(c))]
    for v in range(1, k + 1):
        rules.append(Pair(v - 1, v - 1))
    return Slp(tuple(rules), k)


def fibonacci(k: int) -> Slp:
    """Fibonacci word f_k with f_1 = "b", f_2 = "a", f_k = f_{k-1} f_{k-2}."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return Slp((Terminal(ord("b")),), 0)
    rules: list[Rule] = [Terminal(ord("b")), Terminal(ord("a"))]
    for v in range(2, k):
        rules.append(Pair(v - 1, v - 2))
    return Slp(tuple(rules), k - 1)


def thue_morse(k: int) -> Slp:
    """Prefix of length 2**k of the Thue-Morse word over {a, b}."""
    if k < 0:
        raise ValueError("k must be non-negative")
    rules: list[Rule] = [Terminal(ord("a")), Terminal(ord("b"))]
    for level in range(1, k + 1):
        a, b = 2 * level - 2, 2 * level - 1
        rules.append(Pair(a, b))
        rules.append(Pair(b, a))
    return Slp(tuple(rules), 2 * k)


def gen_synthetic(kind: str, k: int, c: str = "a") -> Slp:
    if k < 1:
        raise ValueError("k must be >= 1")
    if kind == "chain":
        return chain(c, k)
    if kind == "fibonacci":
        return fibonacci(k)
    if kind in ("thue-morse", "thuemorse"):
        return thue_morse(k)
    raise ValueError(f"unknown grammar family {kind!r}; expected one of {KINDS}")


def random_slp(
    rng: random.Random,
    n: int,
    sigma: int = 2,
    max_len: int = 50_000,
    min_len: int = 1,
    base: int = ord("a"),
) -> Slp:
    """Random SLP with at most ``n`` rules whose root expands to at most ``max_len`` chars.

    Children are drawn with a bias toward recently created symbols, which gives
    deep, repetitive grammars rather than flat ones. The root is the last rule,
    or the longest one when the last is shorter than ``min_len``.
    """
    sigma = max(1, min(sigma, n))
    rules: list[Rule] = [Terminal(base + c) for c in range(sigma)]
    lengths = [1] * sigma

    def pick() -> int:
        v = len(rules)
        back = int(rng.expovariate(1 / max(1.0, v / 4)))
        return max(0, v - 1 - back)

    tries = 0
    while len(rules) < n and tries < 50 * n:
        tries += 1
        a, b = pick(), pick()
        if lengths[a] + lengths[b] > max_len:
            continue
        rules.append(Pair(a, b))
        lengths.append(lengths[a] + lengths[b])
    root = len(rules) - 1
    if lengths[root] < min_len:
        root = max(range(len(rules)), key=lengths.__getitem__)
    return Slp(tuple(rules), root)


def random_text(rng: random.Random, length: int, sigma: int, repetitive: Optional[float] = None) -> str:
    """Random string; with ``repetitive`` set, copies of earlier pieces are spliced in."""
    alphabet = [chr(ord("a") + c) for c in range(sigma)]
    if not repetitive:
        return "".join(rng.choice(alphabet) for _ in range(length))
    out: list[str] = []
    while len(out) < length:
        if out and rng.random() < repetitive:
            start = rng.randrange(len(out))
            take = rng.randint(1, max(1, min(len(out) - start, 64)))
            out.extend(out[start:start + take])
        else:
            out.append(rng.choice(alphabet))
    return "".join(out[:length])


def versioned_text(rng: random.Random, length: int, base_len: int = 1000, edits: int = 3, sigma: int = 4) -> str:
    """Successive versions of one document, each a few point edits away from the last."""
    alphabet = [chr(ord("a") + c) for c in range(sigma)]
    doc = [rng.choice(alphabet) for _ in range(base_len)]
    out = list(doc)
    while len(out) < length:
        for _ in range(edits):
            p = rng.randrange(len(doc))
            op = rng.random()
            if op < 0.5:
                doc[p] = rng.choice(alphabet)
            elif op < 0.75:
                doc.insert(p, rng.choice(alphabet))
            elif len(doc) > 1:
                del doc[p]
        out.extend(doc)
    return "".join(out[:length])
