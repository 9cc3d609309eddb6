import bisect
import random

import numpy as np
import pytest

from slpindex.errors import OutOfRange
from slpindex.restructure import (EPS, Grammar, block_expansion_check, boundary_set,
                                  build_path_forests, cover, decompose, locate)
from slpindex.slp import Pair, Slp, Terminal, expand, expand_codes
from slpindex.synthetic import chain, fibonacci, random_slp, thue_morse

K_MAX_CEILING = 8


def _boundary_by_definition(slp, X):
    out = set()
    for v, rule in enumerate(slp.rules):
        if 2 * slp.lengths[v] <= X:
            continue
        if isinstance(rule, Terminal) or all(2 * slp.lengths[c] <= X for c in (rule.left, rule.right)):
            out.add(v)
    return out


def test_boundary_chain():
    # a^8 from rules of length 1, 2, 4, 8: only the length-4 node has light children at X=4
    assert boundary_set(chain("a", 3), 4) == {2}


def test_boundary_abab(abab):
    assert boundary_set(abab, 2) == {2}
    assert boundary_set(abab, 8) == frozenset()


def test_boundary_matches_definition():
    rng = random.Random(11)
    for _ in range(100):
        slp = random_slp(rng, rng.randint(2, 80), rng.choice([1, 2, 4]), 3000)
        for X in (2, 3, 7, 20, 100):
            assert boundary_set(slp, X) == _boundary_by_definition(slp, X)


def test_forests_chain():
    fl, fr = build_path_forests(chain("a", 3), 4)
    for forest in (fl, fr):
        # the boundary node, the root above it, and the root as an nca copy
        assert [n.symbol for n in forest.nodes] == [2, 3, 3]
        assert forest.roots() == [0]
        assert all(n.primary == EPS and n.secondary == EPS for n in forest.nodes)


def test_forests_abab(abab):
    fl, fr = build_path_forests(abab, 2)
    assert [n.symbol for n in fl.nodes] == [2, 3, 3]
    assert [n.parent for n in fr.nodes] == [-1, 0, 0]


def test_forests_empty_when_root_is_the_only_occurrence():
    ab = Slp((Terminal(97), Terminal(98), Pair(0, 1)), 2)
    fl, fr = build_path_forests(ab, 2)
    assert len(fl) == 0 and len(fr) == 0


def test_forest_labels_one_sided():
    rng = random.Random(5)
    for _ in range(60):
        slp = random_slp(rng, rng.randint(5, 150), 2, 20_000)
        X = rng.choice([4, 10, 33, 120])
        if not boundary_set(slp, X):
            continue
        fl, fr = build_path_forests(slp, X)
        for forest in (fl, fr):
            assert forest.max_occurrences() <= 2
            for node in forest.nodes:
                assert node.primary == EPS or node.secondary == EPS
                for label in (node.primary, node.secondary):
                    assert label == EPS or 2 * slp.lengths[label] <= X


def test_decompose_abab(abab):
    dec = decompose(abab, 2)
    assert dec.block_roots == [2, 2]
    assert dec.m == 2 and dec.d == 1
    assert list(dec.block_starts) == [0, 2, 4]


def test_decompose_chain():
    dec = decompose(chain("a", 3), 4)
    assert dec.block_roots == [2, 2] and dec.m == 2


def test_decompose_large_x_is_single_block():
    slp = fibonacci(10)
    for X in (slp.N, slp.N + 1, 10 * slp.N):
        dec = decompose(slp, X)
        assert dec.block_roots == [slp.root] and dec.m == 1


def test_locate_and_cover_examples(abab):
    dec = decompose(abab, 2)
    assert locate(dec, 0) == (0, 0)
    assert locate(dec, 2) == (1, 0)
    assert locate(dec, 3) == (1, 1)
    with pytest.raises(OutOfRange):
        locate(dec, 4)
    assert cover(dec, 1, 2) == (range(0, 2), 1)
    dec8 = decompose(chain("a", 3), 4)
    assert list(dec8.block_starts) == [0, 4, 8]
    assert cover(dec8, 3, 4)[0] == range(0, 2)
    assert cover(dec8, 0, 4)[0] == dec8.window_run(0)


def _check(slp, X):
    dec = decompose(slp, X)
    text = expand_codes(slp)
    g = dec.grammar
    slp2 = dec.slp2
    basic = {v: expand_codes(slp2, v) for v in dec.basic_blocks}
    pieces = [basic[v] for v in dec.block_roots]
    assert np.array_equal(np.concatenate(pieces), text)
    assert block_expansion_check(dec, text)
    assert all(g.length[v] <= X for v in dec.block_roots)
    starts = list(dec.block_starts)
    assert starts[0] == 0 and starts[-1] == slp.N
    assert all(a < b for a, b in zip(starts, starts[1:]))
    assert dec.k_max <= K_MAX_CEILING
    assert dec.forest_max_occurrences <= 4
    assert len(dec.window_first) == -(-slp.N // X)
    rng = random.Random(X)
    for i in rng.sample(range(slp.N), min(slp.N, 300)):
        r, o = locate(dec, i)
        assert r == bisect.bisect_right(starts, i) - 1 and o == i - starts[r]
        length = rng.randint(1, min(X, slp.N - i))
        run, off = cover(dec, i, length)
        assert len(run) <= 2 * dec.k_max
        got = np.concatenate(pieces[run.start:run.stop])[off:off + length]
        assert np.array_equal(got, text[i:i + length])
    return dec


def test_decompose_invariants_random():
    rng = random.Random(2024)
    for _ in range(150):
        slp = random_slp(rng, rng.randint(2, 200), rng.choice([2, 4, 26]), 20_000)
        for X in (2, 3, 5, 16, rng.randint(2, 400)):
            _check(slp, X)


@pytest.mark.parametrize("slp", [chain("a", 12), fibonacci(20), thue_morse(12)],
                         ids=["chain", "fibonacci", "thue-morse"])
def test_decompose_invariants_families(slp):
    for X in (2, 6, 64, 200, 1000):
        _check(slp, X)


def test_grammar_round_trip():
    slp = fibonacci(12)
    g = Grammar.from_slp(slp)
    assert expand(g.to_slp()) == expand(slp)
