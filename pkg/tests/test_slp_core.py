import random

import pytest
from hypothesis import given, settings, strategies as st

from slpindex import grammar_io
from slpindex.errors import (BadRoot, CyclicReference, EmptyInput, LengthMismatch, OutOfRange,
                             ParseError, TooLarge, UnknownSymbol)
from slpindex.repair import build_grammar
from slpindex.slp import Pair, Slp, Terminal, expand, naive_access, naive_lce, validate
from slpindex.synthetic import chain, fibonacci, gen_synthetic, random_slp, thue_morse


def test_validate_accepts_abab(abab):
    validate(abab)
    assert abab.n == 4 and abab.N == 4


def test_self_reference_is_cyclic():
    with pytest.raises(CyclicReference):
        Slp((Terminal(97), Terminal(98), Pair(2, 2)), 2)


def test_root_out_of_range():
    with pytest.raises(BadRoot):
        Slp((Terminal(97), Terminal(98), Pair(0, 1), Pair(2, 2)), 4)


def test_validate_detects_stale_lengths(abab):
    broken = Slp(abab.rules, abab.root)
    object.__setattr__(broken, "lengths", (1, 1, 2, 5))
    with pytest.raises(LengthMismatch):
        validate(broken)


def test_unreachable_rules_only_warn():
    slp = Slp((Terminal(97), Terminal(98), Pair(0, 0)), 2)
    validate(slp)
    assert slp.reachable() == [True, False, True]


def test_expand_single_rule():
    assert expand(Slp((Terminal(97),), 0)) == "a"


def test_expand_abab(abab):
    assert expand(abab) == "abab"
    assert expand(abab, 2) == "ab"


def test_expand_respects_cap():
    with pytest.raises(TooLarge):
        expand(chain("a", 12), cap=1000)


def test_fibonacci_words():
    # f1 = b, f2 = a, f_k = f_{k-1} f_{k-2}
    f = ["", "b", "a"]
    for k in range(3, 12):
        f.append(f[k - 1] + f[k - 2])
    assert expand(fibonacci(4)) == "aba"
    assert expand(fibonacci(5)) == "abaab"
    for k in range(1, 12):
        assert expand(fibonacci(k)) == f[k]


def test_thue_morse():
    assert expand(thue_morse(2)) == "abba"
    word = "".join("ab"[bin(t).count("1") % 2] for t in range(64))
    assert expand(thue_morse(6)) == word


def test_chain():
    assert expand(chain("a", 3)) == "aaaaaaaa"
    assert gen_synthetic("chain", 5).N == 32


def test_naive_access(abab):
    assert naive_access(abab, 1) == "b"
    assert naive_access(chain("a", 3), 5) == "a"
    slp = fibonacci(9)
    text = expand(slp)
    assert naive_access(slp, slp.N - 1) == text[-1]
    assert [naive_access(slp, i) for i in range(slp.N)] == list(text)
    with pytest.raises(OutOfRange):
        naive_access(slp, slp.N)


def test_naive_lce():
    assert naive_lce("abaab", 0, 3) == 2
    assert naive_lce("abaab", 1, 1) == 4
    assert naive_lce("abaab", 0, 1) == 0
    with pytest.raises(OutOfRange):
        naive_lce("abc", 0, 3)


def test_build_grammar_small_cases():
    one = build_grammar("a")
    assert one.n == 1 and isinstance(one.rules[0], Terminal)
    assert expand(build_grammar("abab")) == "abab"
    unary = build_grammar("a" * 8)
    assert expand(unary) == "a" * 8 and unary.n <= 5
    with pytest.raises(EmptyInput):
        build_grammar("")


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="abcd", min_size=1, max_size=300))
def test_build_grammar_round_trip(text):
    slp = build_grammar(text)
    validate(slp)
    assert expand(slp) == text


def test_build_grammar_round_trip_corpus():
    rng = random.Random(7)
    for t in range(1000):
        sigma = (2, 4, 26)[t % 3]
        length = rng.randint(1, 10_000 if t % 50 == 0 else 400)
        text = "".join(rng.choice("abcdefghijklmnopqrstuvwxyz"[:sigma]) for _ in range(length))
        assert expand(build_grammar(text)) == text


def test_random_slp_bounds():
    rng = random.Random(3)
    for _ in range(50):
        slp = random_slp(rng, 120, 4, 5000)
        validate(slp)
        assert slp.n <= 120 and slp.N <= 5000


def test_grammar_io_round_trip(abab, tmp_path):
    path = tmp_path / "g.slp"
    grammar_io.write(abab, path)
    again = grammar_io.read(path)
    assert expand(again) == "abab" and again.n == abab.n


def test_grammar_io_escapes_and_comments():
    text = "# two symbols\nSLP 3 2\n0 -> '\\x27'\n1 -> 'é'  # trailing\n2 -> 0 1\n"
    slp = grammar_io.loads(text)
    assert expand(slp) == "'é"
    assert expand(grammar_io.loads(grammar_io.dumps(slp))) == "'é"


def test_grammar_io_renumbers_forward_references():
    slp = grammar_io.loads("SLP 3 0\n0 -> 1 2\n1 -> 'x'\n2 -> 'y'\n")
    assert expand(slp) == "xy"


def test_grammar_io_unknown_symbol():
    text = "SLP 5 4\n0 -> 'a'\n1 -> 'b'\n2 -> 0 1\n3 -> 7 1\n4 -> 2 3\n"
    with pytest.raises(UnknownSymbol):
        grammar_io.loads(text)


def test_grammar_io_garbage_line_number():
    with pytest.raises(ParseError) as info:
        grammar_io.loads("SLP 2 1\n0 -> 'a'\nthis is not a rule\n")
    assert info.value.line == 3


def test_grammar_io_rejects_cycles():
    with pytest.raises(CyclicReference):
        grammar_io.loads("SLP 3 2\n0 -> 'a'\n1 -> 2 0\n2 -> 1 0\n")
