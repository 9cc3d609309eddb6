"""Plain-text grammar files.

::

    SLP <n> <root-id>
    <id> -> '<char>'        # one UTF-8 scalar, or an escape: \\xNN, \\u{HEX}
    <id> -> <id> <id>

Ids are dense in ``0..n-1``; ``#`` starts a comment. Rules may appear in any
order and may reference later ids; reading renumbers them topologically.
"""
from __future__ import annotations

import io
import os
import re
from typing import TextIO, Union

from .errors import CyclicReference, ParseError, UnknownSymbol
from .slp import Pair, Rule, Slp, Terminal

_HEADER = re.compile(r"^SLP\s+(\d+)\s+(\d+)$")
_TERM = re.compile(r"^(\d+)\s*->\s*'(.*)'$")
_PAIR = re.compile(r"^(\d+)\s*->\s*(\d+)\s+(\d+)$")
_ESC = re.compile(r"^\\x([0-9A-Fa-f]{2})$|^\\u\{([0-9A-Fa-f]{1,8})\}$")


def _strip(line: str) -> str:
    # '#' inside a quoted terminal is a character, not a comment
    m = re.match(r"^(\s*\d+\s*->\s*'(?:\\u\{[0-9A-Fa-f]+\}|\\x[0-9A-Fa-f]{2}|.)')", line)
    if m:
        return (m.group(1) + line[m.end():].split("#", 1)[0]).strip()
    return line.split("#", 1)[0].strip()


def _char_code(body: str, lineno: int) -> int:
    if len(body) == 1:
        return ord(body)
    m = _ESC.match(body)
    if not m:
        raise ParseError(lineno, f"bad terminal {body!r}")
    return int(m.group(1) or m.group(2), 16)


def _quote(code: int) -> str:
    if code < 0x80:
        c = chr(code)
        if c.isprintable() and c not in "'\\#" and not c.isspace():
            return c
        return f"\\x{code:02x}"
    if code <= 0x10FFFF and not 0xD800 <= code <= 0xDFFF and chr(code).isprintable():
        return chr(code)
    if code < 0x100:
        return f"\\x{code:02x}"
    return f"\\u{{{code:x}}}"


def parse(stream: TextIO) -> Slp:
    header = None
    raw: dict[int, tuple] = {}
    lines: dict[int, int] = {}
    for lineno, line in enumerate(stream, 1):
        text = _strip(line.rstrip("\n"))
        if not text:
            continue
        if header is None:
            m = _HEADER.match(text)
            if not m:
                raise ParseError(lineno, "expected header 'SLP <n> <root>'")
            header = (int(m.group(1)), int(m.group(2)))
            continue
        m = _TERM.match(text)
        if m:
            v, rule = int(m.group(1)), ("t", _char_code(m.group(2), lineno))
        else:
            m = _PAIR.match(text)
            if not m:
                raise ParseError(lineno, f"cannot parse rule {text!r}")
            v, rule = int(m.group(1)), ("p", int(m.group(2)), int(m.group(3)))
        if v in raw:
            raise ParseError(lineno, f"symbol {v} defined twice")
        raw[v] = rule
        lines[v] = lineno
    if header is None:
        raise ParseError(0, "empty grammar file")
    n, root = header
    for v, rule in raw.items():
        if v >= n:
            raise UnknownSymbol(lines[v], f"symbol {v} outside 0..{n - 1}")
        if rule[0] == "p":
            for c in rule[1:]:
                if c >= n or c not in raw:
                    raise UnknownSymbol(lines[v], f"rule {v} references unknown symbol {c}")
    if len(raw) != n:
        missing = next(v for v in range(n) if v not in raw)
        raise ParseError(0, f"header declares {n} rules but symbol {missing} is missing")
    if root >= n:
        raise UnknownSymbol(1, f"root {root} outside 0..{n - 1}")

    # topological renumbering; identity when the file is already ordered
    order: list[int] = []
    state = [0] * n
    for start in range(n):
        if state[start]:
            continue
        stack = [(start, False)]
        while stack:
            v, done = stack.pop()
            if done:
                state[v] = 2
                order.append(v)
                continue
            if state[v] == 2:
                continue
            if state[v] == 1:
                raise CyclicReference(f"symbol {v} derives itself")
            state[v] = 1
            stack.append((v, True))
            if raw[v][0] == "p":
                for c in reversed(raw[v][1:]):
                    if state[c] == 1:
                        raise CyclicReference(f"symbol {c} derives itself (line {lines[v]})")
                    if state[c] == 0:
                        stack.append((c, False))
    new_id = {v: k for k, v in enumerate(order)}
    rules: list[Rule] = []
    for v in order:
        rule = raw[v]
        if rule[0] == "t":
            rules.append(Terminal(rule[1]))
        else:
            rules.append(Pair(new_id[rule[1]], new_id[rule[2]]))
    return Slp(tuple(rules), new_id[root])


def format_slp(slp: Slp) -> str:
    out = [f"SLP {slp.n} {slp.root}"]
    for v, rule in enumerate(slp.rules):
        if isinstance(rule, Terminal):
            out.append(f"{v} -> '{_quote(rule.code)}'")
        else:
            out.append(f"{v} -> {rule.left} {rule.right}")
    return "\n".join(out) + "\n"


def loads(text: str) -> Slp:
    return parse(io.StringIO(text))


def dumps(slp: Slp) -> str:
    return format_slp(slp)


def read(path: Union[str, os.PathLike]) -> Slp:
    with open(path, encoding="utf-8") as fh:
        return parse(fh)


def write(slp: Slp, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_slp(slp))
