"""Command-line front end.

    slpindex gen --kind chain --k 3 | slpindex build --layers 4 -o idx
    slpindex access idx 5
    echo "0 3" | slpindex lce idx
"""
from __future__ import annotations

import argparse
import csv
import logging
import random
import sys
from typing import Callable, Iterable, Optional, Sequence, TextIO

from . import grammar_io, serialize
from .block_index import LayerParams, access, build_layered, default_params, extract
from .errors import ParamError, SlpIndexError, TooLarge
from .lce_index import LceIndex, build_lce, lce
from .repair import build_grammar
from .slp import DEFAULT_CAP, Slp, expand_codes
from .synthetic import KINDS, gen_synthetic, random_slp
from .verify import bench_rows, verify_index

log = logging.getLogger("slpindex")

BENCH_HEADER = ("metric", "name", "value")


class DataError(Exception):
    """Bad input data; reported with exit status 1."""


def _layers(text: str) -> LayerParams:
    try:
        return LayerParams.parse(text)
    except ParamError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _open_text(path: str) -> TextIO:
    return sys.stdin if path == "-" else open(path, encoding="utf-8")


def _load(path: str) -> LceIndex:
    obj = serialize.load_path(path)
    if not isinstance(obj, LceIndex):
        raise DataError(f"{path}: index was saved without LCE structures")
    return obj


def _ints(line: str, count: int, lineno: int) -> list[int]:
    parts = line.split()
    if len(parts) != count:
        raise DataError(f"stdin line {lineno}: expected {count} integer(s), got {line.strip()!r}")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise DataError(f"stdin line {lineno}: not an integer in {line.strip()!r}") from None


def _queries(positional: Sequence[int], arity: int, stdin: TextIO) -> Iterable[list[int]]:
    if positional:
        if len(positional) % arity:
            raise DataError(f"expected positions in groups of {arity}")
        for t in range(0, len(positional), arity):
            yield list(positional[t:t + arity])
        return
    for lineno, line in enumerate(stdin, 1):
        if line.strip():
            yield _ints(line, arity, lineno)


def _answer(args, arity: int, fn: Callable[..., object]) -> int:
    lx = _load(args.index)
    out = sys.stdout
    for query in _queries(args.positions, arity, sys.stdin):
        out.write(f"{fn(lx, *query)}\n")
    return 0


def cmd_gen(args) -> int:
    if args.kind == "random":
        slp = random_slp(random.Random(args.seed), args.k, args.alphabet, args.max_len)
    else:
        slp = gen_synthetic(args.kind, args.k, args.char)
    if args.output:
        grammar_io.write(slp, args.output)
    else:
        sys.stdout.write(grammar_io.dumps(slp))
    return 0


def _read_input(args) -> Slp:
    if args.raw:
        with _open_text(args.input) as fh:
            text = fh.read()
        text = text.rstrip("\r\n") if args.strip_newline else text
        return build_grammar(text)
    with _open_text(args.input) as fh:
        return grammar_io.parse(fh)


def cmd_build(args) -> int:
    slp = _read_input(args)
    if slp.N > args.cap:
        raise TooLarge(f"text length {slp.N} exceeds --cap {args.cap}")
    params = args.layers or default_params(slp.N)
    lx = build_lce(build_layered(slp, params))
    serialize.save(lx, args.output)
    log.info("wrote %s: N=%d n=%d layers=%s", args.output, slp.N, slp.n, params.xs)
    return 0


def cmd_verify(args) -> int:
    lx = _load(args.index)
    if lx.N > args.cap:
        raise TooLarge(f"text length {lx.N} exceeds --cap {args.cap}")
    text = expand_codes(lx.base.slp, cap=args.cap).tolist()
    results = verify_index(lx, seed=args.seed, lce_exhaustive=args.exhaustive_lce,
                           samples=args.samples, text=text)
    print(", ".join(str(r) for r in results))
    return 0 if all(r.ok for r in results) else 1


def cmd_bench(args) -> int:
    lx = _load(args.index)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    for metric, name, value in bench_rows(lx, seed=args.seed, queries=args.queries):
        writer.writerow((metric, name, f"{value:g}" if isinstance(value, float) else value))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slpindex", description="Random access and LCE over grammar-compressed strings.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a synthetic grammar")
    g.add_argument("--kind", choices=KINDS + ("random",), required=True)
    g.add_argument("--k", type=int, required=True, help="family order, or rule count for --kind random")
    g.add_argument("--char", default="a", help="terminal for --kind chain")
    g.add_argument("--alphabet", type=int, default=2, help="alphabet size for --kind random")
    g.add_argument("--max-len", type=int, default=50_000, help="length cap for --kind random")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("build", help="build an index file from a grammar (or raw text)")
    b.add_argument("input", nargs="?", default="-", help="grammar file, or '-' for stdin")
    b.add_argument("--raw", action="store_true", help="input is plain text; compress it first")
    b.add_argument("--keep-newline", dest="strip_newline", action="store_false",
                   help="with --raw, keep trailing newlines")
    b.add_argument("--layers", type=_layers, help="comma-separated block sizes X1,X2,...")
    b.add_argument("--cap", type=int, default=DEFAULT_CAP, help="maximum text length to expand")
    b.add_argument("-o", "--output", required=True)
    b.set_defaults(func=cmd_build)

    for name, arity, fn, what in (
        ("access", 1, lambda lx, i: access(lx.base, i), "character at position i"),
        ("extract", 2, lambda lx, i, j: extract(lx.base, i, j), "substring S[i..j] (inclusive)"),
        ("lce", 2, lce, "longest common extension of positions i and j"),
    ):
        q = sub.add_parser(name, help=f"print the {what}; reads stdin when no positions are given")
        q.add_argument("index")
        q.add_argument("positions", nargs="*", type=int)
        q.set_defaults(func=lambda args, a=arity, f=fn: _answer(args, a, f))

    v = sub.add_parser("verify", help="check access and lce against brute force")
    v.add_argument("index")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=_nonneg, default=10_000, help="random queries when not exhaustive")
    v.add_argument("--exhaustive-lce", type=_nonneg, default=500,
                   help="check all lce pairs when N is at most this")
    v.add_argument("--cap", type=int, default=DEFAULT_CAP)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("bench", help="hop counts and space buckets as CSV")
    c.add_argument("index")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--queries", type=int, default=10_000)
    c.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except (SlpIndexError, DataError, OSError, ValueError) as exc:
        print(f"slpindex {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
