"""Block restructuring of a grammar with parameter X.

The restructured grammar writes ``S = S(v_1) ... S(v_m)`` with every block of
length at most X, m = Theta(N / X), O(n) distinct blocks, and any length-X
window of S covered by a constant number of consecutive blocks.

Nodes with ``2 * len > X`` are *heavy*. The boundary set holds the heavy nodes
whose children are both light (or heavy leaves). Boundary occurrences in the
parse tree are disjoint; the material between two consecutive occurrences
hangs off the paths from each occurrence up to their nearest common ancestor.
The left forest follows those paths upward from the left occurrence, whose
right hangings become primary labels; the right forest mirrors it. Primary
labels are clustered greedily, starting at the boundary node, into groups of
total length at most X, so every gap becomes full groups (each longer than
X/2) plus at most two short groups where the two sides meet.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from .errors import OutOfRange, ParamError
from .slp import Pair, Slp, Terminal

log = logging.getLogger(__name__)

EPS = -1
# occurrence ceiling per symbol and forest; see LabeledForest.max_occurrences
OCCURRENCE_BOUND = 4


@dataclass
class Grammar:
    """Array form of a grammar whose leaves may be longer than one character.

    ``left[v] == -1`` marks a leaf; ``label[v]`` is then its payload (a
    character code on the first layer, a lower-layer basic-block id above).
    ``structural[v]`` flags rules added by restructuring that sit above the
    block frontier.
    """

    left: list[int]
    right: list[int]
    length: list[int]
    label: list[int]
    root: int
    structural: list[bool] = field(default_factory=list)

    def __post_init__(self):
        if not self.structural:
            self.structural = [False] * len(self.left)

    @property
    def size(self) -> int:
        return len(self.left)

    @property
    def N(self) -> int:
        return self.length[self.root]

    def is_leaf(self, v: int) -> bool:
        return self.left[v] < 0

    @classmethod
    def from_slp(cls, slp: Slp) -> "Grammar":
        left, right, label = [], [], []
        for rule in slp.rules:
            if isinstance(rule, Terminal):
                left.append(-1)
                right.append(-1)
                label.append(rule.code)
            else:
                left.append(rule.left)
                right.append(rule.right)
                label.append(-1)
        return cls(left, right, list(slp.lengths), label, slp.root)

    def to_slp(self) -> Slp:
        """Convert back to an Slp; only valid when every leaf is a character."""
        rules = []
        for v in range(self.size):
            if self.left[v] < 0:
                if self.length[v] != 1:
                    raise ValueError(f"leaf {v} has length {self.length[v]}; not a terminal")
                rules.append(Terminal(self.label[v]))
            else:
                rules.append(Pair(self.left[v], self.right[v]))
        return Slp(tuple(rules), self.root, tuple(self.length))

    def add(self, a: int, b: int, structural: bool) -> int:
        v = len(self.left)
        self.left.append(a)
        self.right.append(b)
        self.length.append(self.length[a] + self.length[b])
        self.label.append(-1)
        self.structural.append(structural)
        return v

    def copy(self) -> "Grammar":
        return Grammar(list(self.left), list(self.right), list(self.length),
                       list(self.label), self.root, list(self.structural))

    def reachable(self) -> list[bool]:
        seen = [False] * self.size
        seen[self.root] = True
        for v in range(self.size - 1, -1, -1):
            if seen[v] and self.left[v] >= 0:
                seen[self.left[v]] = seen[self.right[v]] = True
        return seen

    def leaves_of(self, v: int) -> list[int]:
        """Leaf symbols under ``v`` in left-to-right order."""
        out, stack = [], [v]
        left, right = self.left, self.right
        while stack:
            u = stack.pop()
            if left[u] < 0:
                out.append(u)
            else:
                stack.append(right[u])
                stack.append(left[u])
        return out


def _as_grammar(g: Union[Slp, Grammar]) -> Grammar:
    return Grammar.from_slp(g) if isinstance(g, Slp) else g


def _heavy(g: Grammar, X: int) -> list[bool]:
    return [2 * ln > X for ln in g.length]


def _in_boundary(g: Grammar, heavy: list[bool], v: int) -> bool:
    if not heavy[v]:
        return False
    return g.left[v] < 0 or not (heavy[g.left[v]] or heavy[g.right[v]])


def boundary_set(slp: Union[Slp, Grammar], X: int) -> frozenset[int]:
    """Heavy symbols whose children are light; heavy leaves count as members."""
    if X < 2:
        raise ParamError("X must be at least 2")
    g = _as_grammar(slp)
    heavy = _heavy(g, X)
    return frozenset(v for v in range(g.size) if _in_boundary(g, heavy, v))


@dataclass
class ForestNode:
    symbol: int
    parent: int  # index of the node one step closer to the boundary node; -1 at roots
    primary: int = EPS
    secondary: int = EPS
    nca: bool = False  # terminal copy of a nearest common ancestor


@dataclass
class LabeledForest:
    """Occurrence paths between boundary occurrences, merged into a forest.

    Roots are boundary symbols. The parent of an interior node for heavy
    symbol v is the node of v's child on the way to the boundary occurrence
    nearest to the gap (the last one in S(v) for the left forest, the first
    one for the right forest). Since that child depends only on v, every path
    through v shares the part below it.
    """

    side: str
    nodes: list[ForestNode]
    node_of: dict[int, int]  # symbol -> its interior (or root) node

    def children(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.nodes]
        for k, node in enumerate(self.nodes):
            if node.parent >= 0:
                out[node.parent].append(k)
        return out

    def roots(self) -> list[int]:
        return [k for k, node in enumerate(self.nodes) if node.parent < 0]

    def max_occurrences(self) -> int:
        count: dict[int, int] = {}
        for node in self.nodes:
            count[node.symbol] = count.get(node.symbol, 0) + 1
        return max(count.values(), default=0)

    def __len__(self) -> int:
        return len(self.nodes)


def build_path_forests(slp: Union[Slp, Grammar], X: int) -> tuple[LabeledForest, LabeledForest]:
    """Left and right labeled forests for the parse tree of ``slp``.

    Besides the gaps between consecutive boundary occurrences, the forests
    carry the path from the first (last) occurrence up to the root, so the
    prefix before the first and the suffix after the last occurrence get the
    same treatment as the gaps. Labels are EPS where the hanging subtree is
    heavy, i.e. not gap material.
    """
    g = _as_grammar(slp)
    if X < 2:
        raise ParamError("X must be at least 2")
    heavy = _heavy(g, X)
    left, right = g.left, g.right
    reach = g.reachable()
    if not heavy[g.root] or _in_boundary(g, heavy, g.root):
        return LabeledForest("left", [], {}), LabeledForest("right", [], {})

    inner = [v for v in range(g.size)
             if reach[v] and heavy[v] and not _in_boundary(g, heavy, v)]
    # symbols whose interior node is on some path: seeded by gap endpoints and the root
    need_l = [False] * g.size
    need_r = [False] * g.size
    need_l[g.root] = need_r[g.root] = True
    for v in inner:
        if heavy[left[v]] and heavy[right[v]]:
            need_l[left[v]] = True
            need_r[right[v]] = True
    for v in reversed(inner):
        if need_l[v]:
            need_l[right[v] if heavy[right[v]] else left[v]] = True
        if need_r[v]:
            need_r[left[v] if heavy[left[v]] else right[v]] = True

    def light(u: int) -> int:
        return EPS if heavy[u] else u

    forests = []
    for side, need in (("left", need_l), ("right", need_r)):
        nodes: list[ForestNode] = []
        node_of: dict[int, int] = {}
        for v in range(g.size):
            if not (need[v] and heavy[v] and reach[v]):
                continue
            if _in_boundary(g, heavy, v):
                node_of[v] = len(nodes)
                nodes.append(ForestNode(v, -1))
                continue
            a, b = left[v], right[v]
            if side == "left":
                if heavy[b]:
                    node = ForestNode(v, node_of[b], EPS, light(a))
                else:
                    node = ForestNode(v, node_of[a], b, EPS)
            else:
                if heavy[a]:
                    node = ForestNode(v, node_of[a], EPS, light(b))
                else:
                    node = ForestNode(v, node_of[b], a, EPS)
            node_of[v] = len(nodes)
            nodes.append(node)
        for v in inner:
            a, b = left[v], right[v]
            if heavy[a] and heavy[b]:
                below = a if side == "left" else b
                nodes.append(ForestNode(v, node_of[below], EPS, EPS, nca=True))
        forests.append(LabeledForest(side, nodes, node_of))
    return forests[0], forests[1]


@dataclass
class BlockDecomposition:
    grammar: Grammar  # restructured grammar; structural rules sit above the blocks
    X: int
    block_roots: list[int]
    block_starts: list[int]
    basic_blocks: list[int]  # distinct block symbols, sorted
    block_basic: list[int]  # block index -> index into basic_blocks
    window_first: list[int]
    window_offset: list[int]
    k_max: int
    new_symbols: int = 0
    forest_sizes: tuple[int, int] = (0, 0)
    forest_max_occurrences: int = 0

    @property
    def N(self) -> int:
        return self.block_starts[-1]

    @property
    def m(self) -> int:
        return len(self.block_roots)

    @property
    def d(self) -> int:
        return len(self.basic_blocks)

    @property
    def windows(self) -> int:
        return len(self.window_first)

    @property
    def slp2(self) -> Slp:
        return self.grammar.to_slp()

    def window_run(self, j: int) -> range:
        """Indices of the consecutive blocks covering window ``j``."""
        start = self.window_first[j]
        end = min(self.N, (j + 1) * self.X) - 1
        r = start
        while self.block_starts[r + 1] <= end:
            r += 1
        return range(start, r + 1)


class _Builder:
    """Hash-consed rule creation on a copy of the input grammar."""

    def __init__(self, g: Grammar):
        self.g = g.copy()
        self.base = g.size
        self.blocks: dict[tuple[int, int], int] = {}
        self.struct: dict[tuple[int, int], int] = {}

    def block(self, a: int, b: int) -> int:
        key = (a, b)
        if key not in self.blocks:
            self.blocks[key] = self.g.add(a, b, structural=False)
        return self.blocks[key]

    def node(self, a: int, b: int) -> int:
        key = (a, b)
        if key not in self.struct:
            self.struct[key] = self.g.add(a, b, structural=True)
        return self.struct[key]

    def concat(self, parts: Iterable[int]) -> int:
        level = [p for p in parts if p != EPS]
        while len(level) > 1:
            up = [self.node(level[k], level[k + 1]) for k in range(0, len(level) - 1, 2)]
            if len(level) % 2:
                up.append(level[-1])
            level = up
        return level[0] if level else EPS


def _cluster(forest: LabeledForest, b: _Builder, X: int) -> list[tuple[int, int, int]]:
    """Greedy edge-disjoint clustering of primary labels, root to leaf.

    Returns, per forest node, (open group, its length, list of closed groups).
    The open group is the one adjacent to the gap's far end and may be short;
    closed groups are each longer than X/2.
    """
    length = b.g.length
    state: list[tuple[int, int, int]] = [(EPS, 0, EPS)] * len(forest.nodes)
    for k, node in enumerate(forest.nodes):
        if node.parent < 0 or node.nca:
            continue
        opened, olen, closed = state[node.parent]
        h = node.primary
        if h != EPS:
            if opened == EPS:
                opened, olen = h, length[h]
            elif olen + length[h] <= X:
                if forest.side == "left":
                    opened = b.block(opened, h)
                else:
                    opened = b.block(h, opened)
                olen += length[h]
            else:
                if forest.side == "left":
                    closed = opened if closed == EPS else b.node(closed, opened)
                else:
                    closed = opened if closed == EPS else b.node(opened, closed)
                opened, olen = h, length[h]
        state[k] = (opened, olen, closed)
    return state


def _window_table(starts: np.ndarray, N: int, X: int) -> tuple[list[int], list[int], int]:
    windows = -(-N // X)
    ws = np.arange(windows, dtype=np.int64) * X
    first = np.searchsorted(starts, ws, side="right") - 1
    ends = np.minimum(ws + X, N) - 1
    last = np.searchsorted(starts, ends, side="right") - 1
    k_max = int((last - first).max()) + 1
    return first.tolist(), (ws - starts[first]).tolist(), k_max


def decompose(slp: Union[Slp, Grammar], X: int) -> BlockDecomposition:
    """Restructure ``slp`` so that S factors into blocks of length <= X."""
    if X < 2:
        raise ParamError("X must be at least 2")
    g = _as_grammar(slp)
    N = g.N
    heavy = _heavy(g, X)
    if N <= X or _in_boundary(g, heavy, g.root):
        return _finish(g.copy(), X, [g.root], 0, (0, 0), 0)

    fl, fr = build_path_forests(g, X)
    occ = max(fl.max_occurrences(), fr.max_occurrences())
    if occ > OCCURRENCE_BOUND:
        log.warning("a symbol occurs %d times in a path forest", occ)
    b = _Builder(g)
    suf = _cluster(fl, b, X)
    pre = _cluster(fr, b, X)
    left, right = g.left, g.right

    mid: dict[int, int] = {}
    for v in sorted(set(fl.node_of) | set(fr.node_of)):
        if _in_boundary(g, heavy, v):
            mid[v] = v
            continue
        a, c = left[v], right[v]
        if heavy[a] and heavy[c]:
            so, _, sl = suf[fl.node_of[a]]
            po, _, pl = pre[fr.node_of[c]]
            mid[v] = b.concat((mid[a], sl, so, po, pl, mid[c]))
        else:
            mid[v] = mid[a] if heavy[a] else mid[c]

    po, _, pl = pre[fr.node_of[g.root]]
    so, _, sl = suf[fl.node_of[g.root]]
    root = b.concat((po, pl, mid[g.root], sl, so))
    out = b.g
    out.root = root

    blocks = []
    stack = [root]
    while stack:
        u = stack.pop()
        if out.structural[u]:
            stack.append(out.right[u])
            stack.append(out.left[u])
        else:
            blocks.append(u)
    return _finish(out, X, blocks, out.size - g.size, (len(fl), len(fr)), occ)


def _finish(g: Grammar, X: int, blocks: list[int], new_symbols: int,
            forest_sizes: tuple[int, int], occ: int) -> BlockDecomposition:
    N = g.N
    lengths = np.fromiter((g.length[v] for v in blocks), dtype=np.int64, count=len(blocks))
    starts = np.zeros(len(blocks) + 1, dtype=np.int64)
    np.cumsum(lengths, out=starts[1:])
    assert starts[-1] == N
    basic = sorted(set(blocks))
    index = {v: k for k, v in enumerate(basic)}
    first, offset, k_max = _window_table(starts, N, X)
    return BlockDecomposition(
        grammar=g,
        X=X,
        block_roots=blocks,
        block_starts=starts.tolist(),
        basic_blocks=basic,
        block_basic=[index[v] for v in blocks],
        window_first=first,
        window_offset=offset,
        k_max=k_max,
        new_symbols=new_symbols,
        forest_sizes=forest_sizes,
        forest_max_occurrences=occ,
    )


def locate(dec: BlockDecomposition, i: int) -> tuple[int, int]:
    """(block index, offset inside the block) of position ``i``.

    One window-table lookup plus a forward scan over at most k_max blocks.
    """
    starts = dec.block_starts
    if not 0 <= i < starts[-1]:
        raise OutOfRange(f"position {i} not in [0, {starts[-1]})")
    r = dec.window_first[i // dec.X]
    while starts[r + 1] <= i:
        r += 1
    return r, i - starts[r]


def cover(dec: BlockDecomposition, i: int, length: int) -> tuple[range, int]:
    """Consecutive blocks whose concatenation contains S[i, i + length).

    Returns the block index range and the offset of position i inside the
    first block of the run.
    """
    if not 1 <= length <= dec.X:
        raise OutOfRange(f"cover length {length} not in [1, {dec.X}]")
    if i < 0 or i + length > dec.N:
        raise OutOfRange(f"range [{i}, {i + length}) not inside [0, {dec.N})")
    r, off = locate(dec, i)
    last = i + length - 1
    s = r
    starts = dec.block_starts
    while starts[s + 1] <= last:
        s += 1
    return range(r, s + 1), off


def block_expansion_check(dec: BlockDecomposition, text: Optional[np.ndarray] = None) -> bool:
    """Desk-scale check: the blocks, expanded, spell S exactly."""
    from .slp import expand_codes

    slp = dec.grammar.to_slp()
    pieces = [expand_codes(slp, v) for v in dec.block_roots]
    got = np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.int64)
    want = expand_codes(slp, slp.root) if text is None else text
    return bool(np.array_equal(got, want))
