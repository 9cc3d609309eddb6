"""Layered block index: constant work per layer for random access.

Layer 1 restructures the grammar with X_1. Layer i > 1 treats the block roots
of layer i-1 as leaves and restructures that grammar with X_i. Queries start
from the top layer's window table over S, descend through one basic block per
layer via window tables of granularity X_{i-1}, and read the character from
the explicitly stored string of a layer-1 basic block.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import OutOfRange, ParamError
from .restructure import BlockDecomposition, Grammar, decompose
from .slp import Slp, codes_to_str

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LayerParams:
    """Strictly increasing block sizes X_1 < ... < X_k.

    With several layers every X_i must exceed 5; a single layer only needs
    X_1 >= 2, which is the basic one-layer structure.
    """

    xs: tuple[int, ...]

    def __post_init__(self):
        xs = tuple(int(x) for x in self.xs)
        object.__setattr__(self, "xs", xs)
        if not xs:
            raise ParamError("at least one layer is required")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ParamError(f"layer sizes must be strictly increasing, got {xs}")
        floor = 6 if len(xs) > 1 else 2
        if xs[0] < floor:
            raise ParamError(f"layer sizes must be >= {floor}, got {xs}")

    @property
    def k(self) -> int:
        return len(self.xs)

    @classmethod
    def parse(cls, text: str) -> "LayerParams":
        try:
            return cls(tuple(int(t) for t in text.split(",") if t.strip()))
        except ValueError as exc:
            if isinstance(exc, ParamError):
                raise
            raise ParamError(f"bad layer list {text!r}") from exc


def default_params(N: int, k: int = 2) -> LayerParams:
    """Geometric sizes X_i ~ N^(i/(k+1)), each at least 8 and strictly increasing."""
    xs: list[int] = []
    for i in range(1, k + 1):
        x = max(8, round(N ** (i / (k + 1))))
        if xs and x <= xs[-1]:
            x = xs[-1] * 2
        xs.append(x)
    return LayerParams(tuple(xs))


def cut_grammar(dec: BlockDecomposition) -> Grammar:
    """The restructured grammar above the block frontier, blocks turned into leaves.

    Leaf b stands for basic block b of ``dec`` and carries its length.
    """
    g = dec.grammar
    d = dec.d
    lengths = [g.length[v] for v in dec.basic_blocks]
    out = Grammar([-1] * d, [-1] * d, lengths, list(range(d)), 0)
    index = {v: b for b, v in enumerate(dec.basic_blocks)}
    if not g.structural[g.root]:
        out.root = index[g.root]
        return out
    inner, stack, seen = [], [g.root], set()
    while stack:
        u = stack.pop()
        if u in seen or not g.structural[u]:
            continue
        seen.add(u)
        inner.append(u)
        stack.append(g.left[u])
        stack.append(g.right[u])
    mapped = dict(index)
    for u in sorted(inner):
        mapped[u] = out.add(mapped[g.left[u]], mapped[g.right[u]], structural=False)
    out.root = mapped[g.root]
    return out


@dataclass
class LayeredIndex:
    slp: Slp
    params: LayerParams
    layers: list[BlockDecomposition]
    # per layer (index 0 unused): for each basic block, its lower-layer basic
    # blocks, their start offsets (one extra entry = block length) and the
    # inner window table at granularity X_{i-1}
    children: list[list[list[int]]]
    child_starts: list[list[list[int]]]
    win_first: list[list[list[int]]]
    win_offset: list[list[list[int]]]
    leaf: list[list[int]]  # character codes of layer-1 basic blocks
    meta: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.layers[-1].N

    @property
    def k(self) -> int:
        return len(self.layers)

    @property
    def top(self) -> BlockDecomposition:
        return self.layers[-1]

    def basic_length(self, layer: int, b: int) -> int:
        """Length of basic block ``b`` of 1-based ``layer``."""
        if layer == 1:
            return len(self.leaf[b])
        return self.child_starts[layer - 1][b][-1]

    def leaf_string(self, b: int) -> str:
        return codes_to_str(self.leaf[b])

    def k_max_per_layer(self) -> list[int]:
        """Longest covering run of any window, top table for the last layer."""
        out = []
        for li in range(self.k):
            if li == 0:
                out.append(self.layers[0].k_max)
                continue
            worst = 0
            starts_l, first_l = self.child_starts[li], self.win_first[li]
            x = self.params.xs[li - 1]
            for st, first in zip(starts_l, first_l):
                n_b = st[-1]
                for w, r in enumerate(first):
                    end = min(n_b, (w + 1) * x) - 1
                    s = r
                    while st[s + 1] <= end:
                        s += 1
                    worst = max(worst, s - r + 1)
            out.append(max(worst, 0))
        return out


def _inner_tables(g: Grammar, dec: BlockDecomposition, lower_len: Sequence[int], x_low: int):
    children, starts, firsts, offsets = [], [], [], []
    for v in dec.basic_blocks:
        kids = [g.label[u] for u in g.leaves_of(v)]
        st = np.zeros(len(kids) + 1, dtype=np.int64)
        np.cumsum([lower_len[c] for c in kids], out=st[1:])
        ws = np.arange(0, int(st[-1]), x_low, dtype=np.int64)
        first = np.searchsorted(st, ws, side="right") - 1
        children.append(kids)
        starts.append(st.tolist())
        firsts.append(first.tolist())
        offsets.append((ws - st[first]).tolist())
    return children, starts, firsts, offsets


def build_layered(slp: Slp, params: Optional[LayerParams] = None) -> LayeredIndex:
    if params is None:
        params = default_params(slp.N)
    if params.xs[-1] > slp.N:
        log.warning("top layer size %d exceeds string length %d", params.xs[-1], slp.N)
    layers: list[BlockDecomposition] = []
    children: list = [[]]
    child_starts: list = [[]]
    win_first: list = [[]]
    win_offset: list = [[]]
    g = Grammar.from_slp(slp)
    for li, x in enumerate(params.xs):
        if li > 0:
            g = cut_grammar(layers[-1])
        dec = decompose(g, x)
        if li > 0:
            lower = layers[-1]
            lower_len = [lower.grammar.length[v] for v in lower.basic_blocks]
            c, s, f, o = _inner_tables(dec.grammar, dec, lower_len, params.xs[li - 1])
            children.append(c)
            child_starts.append(s)
            win_first.append(f)
            win_offset.append(o)
        layers.append(dec)
    g1 = layers[0].grammar
    leaf = [[g1.label[u] for u in g1.leaves_of(v)] for v in layers[0].basic_blocks]
    return LayeredIndex(slp, params, layers, children, child_starts, win_first, win_offset, leaf)


def _check(idx: LayeredIndex, i: int) -> None:
    if not 0 <= i < idx.N:
        raise OutOfRange(f"position {i} not in [0, {idx.N})")


def access_code(idx: LayeredIndex, i: int) -> int:
    _check(idx, i)
    top = idx.top
    starts = top.block_starts
    r = top.window_first[i // top.X]
    while starts[r + 1] <= i:
        r += 1
    b = top.block_basic[r]
    o = i - starts[r]
    xs = idx.params.xs
    for li in range(idx.k - 1, 0, -1):
        st = idx.child_starts[li][b]
        r = idx.win_first[li][b][o // xs[li - 1]]
        while st[r + 1] <= o:
            r += 1
        o -= st[r]
        b = idx.children[li][b][r]
    return idx.leaf[b][o]


def access(idx: LayeredIndex, i: int) -> str:
    return chr(access_code(idx, i))


def access_instrumented(idx: LayeredIndex, i: int) -> tuple[str, list[int]]:
    """Like access, also returning the number of blocks scanned on each layer, top first."""
    _check(idx, i)
    hops = []
    top = idx.top
    starts = top.block_starts
    r = top.window_first[i // top.X]
    scanned = 1
    while starts[r + 1] <= i:
        r += 1
        scanned += 1
    hops.append(scanned)
    b = top.block_basic[r]
    o = i - starts[r]
    xs = idx.params.xs
    for li in range(idx.k - 1, 0, -1):
        st = idx.child_starts[li][b]
        r = idx.win_first[li][b][o // xs[li - 1]]
        scanned = 1
        while st[r + 1] <= o:
            r += 1
            scanned += 1
        hops.append(scanned)
        o -= st[r]
        b = idx.children[li][b][r]
    return chr(idx.leaf[b][o]), hops


def _emit(idx: LayeredIndex, layer: int, b: int, lo: int, hi: int, out: list[int]) -> None:
    """Append S(b)[lo:hi] for basic block ``b`` of 1-based ``layer``."""
    if layer == 1:
        out.extend(idx.leaf[b][lo:hi])
        return
    li = layer - 1
    st = idx.child_starts[li][b]
    kids = idx.children[li][b]
    r = idx.win_first[li][b][lo // idx.params.xs[li - 1]]
    while st[r + 1] <= lo:
        r += 1
    while lo < hi:
        end = min(hi, st[r + 1])
        _emit(idx, layer - 1, kids[r], lo - st[r], end - st[r], out)
        lo = end
        r += 1


def extract_codes(idx: LayeredIndex, i: int, j: int) -> list[int]:
    """Codes of S[i..j], both ends inclusive."""
    _check(idx, i)
    _check(idx, j)
    if j < i:
        raise OutOfRange(f"empty range ({i}, {j})")
    top = idx.top
    starts = top.block_starts
    r = top.window_first[i // top.X]
    while starts[r + 1] <= i:
        r += 1
    out: list[int] = []
    lo, hi = i, j + 1
    while lo < hi:
        end = min(hi, starts[r + 1])
        _emit(idx, idx.k, top.block_basic[r], lo - starts[r], end - starts[r], out)
        lo = end
        r += 1
    return out


def extract(idx: LayeredIndex, i: int, j: int) -> str:
    return codes_to_str(extract_codes(idx, i, j))


def int_width(max_value: int) -> int:
    """Bytes per entry for unsigned values up to ``max_value``."""
    for w in (1, 2, 4):
        if max_value < 1 << (8 * w):
            return w
    return 8


def space_report(idx: LayeredIndex) -> dict:
    """Bytes per component, entries packed at the narrowest sufficient width.

    Buckets mirror the terms of the space analysis: each layer's restructured
    grammar and inner tables, the top window table, and the explicit strings
    of layer-1 basic blocks.
    """
    xs = idx.params.xs
    layers = []
    for li, dec in enumerate(idx.layers):
        g = dec.grammar
        w = int_width(g.size)
        grammar_bytes = g.size * 2 * w + g.size * int_width(max(g.length))
        if li == 0:
            tables = 0
        else:
            kids = sum(len(c) for c in idx.children[li])
            wins = sum(len(f) for f in idx.win_first[li])
            cw = int_width(idx.layers[li - 1].d)
            ow = int_width(xs[li])
            tables = kids * cw + (kids + dec.d) * ow + wins * (int_width(xs[li]) + ow)
        layers.append({"layer": li + 1, "X": xs[li], "m": dec.m, "d": dec.d,
                       "grammar": grammar_bytes, "tables": tables})
    top = idx.top
    bw = int_width(top.m)
    pw = int_width(idx.N)
    top_bytes = top.m * int_width(top.d) + (top.m + 1) * pw + top.windows * (bw + int_width(top.X))
    cwidth = int_width(max(max(s) for s in idx.leaf))
    leaf_chars = sum(len(s) for s in idx.leaf)
    leaf_bytes = leaf_chars * cwidth
    offset_bytes = len(idx.leaf) * pw
    total = top_bytes + leaf_bytes + offset_bytes + sum(layer["grammar"] + layer["tables"] for layer in layers)
    return {
        "top_table": top_bytes,
        "leaf_strings": leaf_bytes,
        "leaf_offsets": offset_bytes,
        "layers": layers,
        "total": total,
    }


def report_parts(report: dict) -> dict[str, int]:
    """Flatten a space report into named byte counts (excluding the total)."""
    parts = {k: v for k, v in report.items() if isinstance(v, int) and k != "total"}
    for layer in report["layers"]:
        for key in ("grammar", "tables"):
            parts[f"layer{layer['layer']}.{key}"] = layer[key]
    for key, value in report.get("extra", {}).items():
        parts[key] = value
    return parts
