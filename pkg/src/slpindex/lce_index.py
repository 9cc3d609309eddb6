"""LCE queries on top of the layered block index.

Sampling: at the top, positions of S whose residue modulo tau_k lies in a
difference cover; inside each basic block of layer i >= 2, block-local
offsets sampled modulo tau_{i-1}. tau_i is X_i rounded down to a perfect
square (at least 4). Layer-1 basic blocks get a full LCE structure over
their separator-joined concatenation.

A query aligns both positions onto sampled ones with a common shift of at
most tau, resolves the unaligned prefix by walking the covering blocks one
layer down, and finishes with one sparse LCE lookup.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import diffcover
from .block_index import LayeredIndex, int_width, space_report
from .diffcover import DifferenceCover
from .errors import CursorExhausted, OutOfRange
from .lce_core import FullLce, SparseLce
from .slp import expand_codes


@dataclass
class BlockCursor:
    """A position inside a run of consecutive basic blocks of one layer.

    ``starts`` holds the run-relative start of every block plus the run's end.
    """

    layer: int
    run: list[int]
    starts: list[int]
    index: int
    offset: int

    @property
    def block(self) -> int:
        return self.run[self.index]

    @property
    def position(self) -> int:
        return self.starts[self.index] + self.offset

    def advance(self, step: int) -> None:
        self.offset += step
        while self.index < len(self.run) and self.offset >= self.starts[self.index + 1] - self.starts[self.index]:
            self.offset -= self.starts[self.index + 1] - self.starts[self.index]
            self.index += 1


@dataclass
class Probe:
    """One unaligned-prefix comparison made while answering a query."""

    layer: int  # layer whose sampling was used; k + 1 denotes the top string
    tau: int
    shift: int
    compared: int  # bound handed to the block walk
    matched: int
    sparse: bool  # whether a sparse lookup followed


@dataclass
class LceIndex:
    base: LayeredIndex
    taus: list[int]
    covers: list[DifferenceCover]
    top_sparse: SparseLce
    # per layer (index 0 unused): sparse LCE over that layer's basic blocks
    # joined by separators, and each block's start in the joined text
    layer_sparse: list[Optional[SparseLce]]
    layer_span: list[list[int]]
    leaf_full: FullLce
    leaf_span: list[int]
    separator_base: int
    trace: Optional[list[Probe]] = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.base.N

    @property
    def k(self) -> int:
        return self.base.k

    def block_sparse_count(self, layer: int) -> int:
        """Number of per-block sampled sections on 1-based ``layer`` (>= 2)."""
        return len(self.layer_span[layer - 1])


def _joined(blocks: list[np.ndarray], first_sep: int) -> tuple[np.ndarray, list[int]]:
    """Concatenate with one fresh separator code per junction."""
    parts, spans, pos = [], [], 0
    for b, codes in enumerate(blocks):
        if b:
            parts.append(np.array([first_sep + b - 1], dtype=np.int64))
            pos += 1
        spans.append(pos)
        parts.append(np.asarray(codes, dtype=np.int64))
        pos += len(codes)
    return np.concatenate(parts), spans


def _sampled_offsets(dc: DifferenceCover, length: int) -> np.ndarray:
    offs = np.arange(length, dtype=np.int64)
    member = np.frombuffer(dc.membership, dtype=np.uint8)
    return offs[member[offs % dc.tau] == 1]


def build_lce(idx: LayeredIndex) -> LceIndex:
    xs = idx.params.xs
    taus = [diffcover.square_floor(x) for x in xs]
    covers = [diffcover.build(t) for t in taus]
    text = expand_codes(idx.slp)
    sep = int(text.max()) + 1

    top_positions = _sampled_offsets(covers[-1], idx.N)
    top_sparse = SparseLce.build(text, top_positions)

    leaf_text, leaf_span = _joined([np.array(s, dtype=np.int64) for s in idx.leaf], sep)
    leaf_full = FullLce(leaf_text)

    layer_sparse: list[Optional[SparseLce]] = [None]
    layer_span: list[list[int]] = [[]]
    strings = [np.array(s, dtype=np.int64) for s in idx.leaf]
    for li in range(1, idx.k):
        strings = [np.concatenate([strings[c] for c in kids]) for kids in idx.children[li]]
        joined, spans = _joined(strings, sep)
        dc = covers[li - 1]
        sampled = np.concatenate([span + _sampled_offsets(dc, len(s)) for span, s in zip(spans, strings)])
        layer_sparse.append(SparseLce.build(joined, sampled))
        layer_span.append(spans)
    return LceIndex(idx, taus, covers, top_sparse, layer_sparse, layer_span,
                    leaf_full, leaf_span, sep)


def _top_cursor(lx: LceIndex, i: int) -> BlockCursor:
    top = lx.base.top
    starts = top.block_starts
    r = top.window_first[i // top.X]
    while starts[r + 1] <= i:
        r += 1
    return BlockCursor(lx.k, top.block_basic, starts, r, i - starts[r])


def _inner_cursor(lx: LceIndex, layer: int, b: int, o: int) -> BlockCursor:
    """Cursor over the children of basic block ``b`` of ``layer`` at offset ``o``."""
    base = lx.base
    li = layer - 1
    st = base.child_starts[li][b]
    r = base.win_first[li][b][o // base.params.xs[li - 1]]
    while st[r + 1] <= o:
        r += 1
    return BlockCursor(layer - 1, base.children[li][b], st, r, o - st[r])


def _block_lce(lx: LceIndex, layer: int, v: int, o: int, w: int, p: int, cap: int) -> int:
    """min(cap, LCE of S(v)[o:] and S(w)[p:]) for basic blocks of ``layer``."""
    if v == w and o == p:
        return cap
    if layer == 1:
        got = lx.leaf_full.lce(lx.leaf_span[v] + o, lx.leaf_span[w] + p)
        return got if got < cap else cap
    li = layer - 1
    dc = lx.covers[li - 1]
    sparse = lx.layer_sparse[li]
    span = lx.layer_span[li]
    member, tau = dc.membership, dc.tau
    if member[o % tau] and member[p % tau]:
        got = sparse.lce(span[v] + o, span[w] + p)
        return got if got < cap else cap
    o2, p2 = diffcover.align(dc, o, p)
    shift = o2 - o
    base = lx.base
    if shift >= cap or o2 >= base.basic_length(layer, v) or p2 >= base.basic_length(layer, w):
        got = bounded_block_compare(lx, _inner_cursor(lx, layer, v, o), _inner_cursor(lx, layer, w, p), cap)
        if lx.trace is not None:
            lx.trace.append(Probe(layer, tau, shift, cap, got, False))
        return got
    got = bounded_block_compare(lx, _inner_cursor(lx, layer, v, o), _inner_cursor(lx, layer, w, p), shift)
    if got < shift:
        if lx.trace is not None:
            lx.trace.append(Probe(layer, tau, shift, shift, got, False))
        return got
    if lx.trace is not None:
        lx.trace.append(Probe(layer, tau, shift, shift, got, True))
    got = shift + sparse.lce(span[v] + o2, span[w] + p2)
    return got if got < cap else cap


def bounded_block_compare(lx: LceIndex, a: BlockCursor, b: BlockCursor, bound: int) -> int:
    """Match length of the texts under two cursors, capped at ``bound``.

    Whenever either cursor reaches the end of its current block the walk
    continues at offset 0 of the next block in its run.
    """
    matched = 0
    layer = a.layer
    base = lx.base
    while matched < bound:
        if a.index >= len(a.run) or b.index >= len(b.run):
            raise CursorExhausted(f"ran past the end of a block run after {matched} characters")
        va, vb = a.run[a.index], b.run[b.index]
        step = min(base.basic_length(layer, va) - a.offset,
                   base.basic_length(layer, vb) - b.offset,
                   bound - matched)
        got = _block_lce(lx, layer, va, a.offset, vb, b.offset, step)
        matched += got
        if got < step:
            return matched
        a.advance(step)
        b.advance(step)
    return matched


def lce(lx: LceIndex, i: int, j: int) -> int:
    """Length of the longest common prefix of S[i:] and S[j:]."""
    N = lx.N
    if not (0 <= i < N and 0 <= j < N):
        raise OutOfRange(f"positions ({i}, {j}) not in [0, {N})")
    if i == j:
        return N - i
    dc = lx.covers[-1]
    member, tau = dc.membership, dc.tau
    if member[i % tau] and member[j % tau]:
        return lx.top_sparse.lce(i, j)
    i2, j2 = diffcover.align(dc, i, j)
    shift = i2 - i
    trace = lx.trace
    if i2 >= N or j2 >= N:
        # no aligned pair left inside S; the rest is shorter than the shift
        bound = N - max(i, j)
        got = bounded_block_compare(lx, _top_cursor(lx, i), _top_cursor(lx, j), bound)
        if trace is not None:
            trace.append(Probe(lx.k + 1, tau, shift, bound, got, False))
        return got
    got = bounded_block_compare(lx, _top_cursor(lx, i), _top_cursor(lx, j), shift)
    if got < shift:
        if trace is not None:
            trace.append(Probe(lx.k + 1, tau, shift, shift, got, False))
        return got
    if trace is not None:
        trace.append(Probe(lx.k + 1, tau, shift, shift, got, True))
    return shift + lx.top_sparse.lce(i2, j2)


def lce_instrumented(lx: LceIndex, i: int, j: int) -> tuple[int, list[Probe]]:
    lx.trace = []
    try:
        value = lce(lx, i, j)
        return value, lx.trace
    finally:
        lx.trace = None


def lce_space_report(lx: LceIndex) -> dict:
    """Random-access buckets plus the LCE structures."""
    report = space_report(lx.base)
    pw = int_width(lx.N)
    top = len(lx.top_sparse) * 3 * pw
    extra = {"lce.top_sparse": top}
    for li in range(1, lx.k):
        sp = lx.layer_sparse[li]
        w = int_width(sp.n)
        extra[f"lce.layer{li + 1}_sparse"] = len(sp) * 3 * w + len(lx.layer_span[li]) * w
    fw = int_width(lx.leaf_full.n)
    extra["lce.leaf_full"] = lx.leaf_full.n * 3 * fw + len(lx.leaf_span) * fw
    report["extra"] = extra
    report["total"] += sum(extra.values())
    return report
