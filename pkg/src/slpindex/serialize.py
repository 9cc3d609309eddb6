"""Binary index files.

Layout (all integers little-endian)::

    magic "GLCE1" | u16 version | u16 section count
    per section: u8 name length | name | u64 payload length | u32 crc32 | payload
    u32 crc32 of everything before it

A payload is a u32 array count followed by arrays, each stored as
u8 name length | name | u8 item width (1, 2, 4, 8; signed) | u64 count | data.
"""
from __future__ import annotations

import io
import os
import struct
import zlib
from typing import BinaryIO, Union

import numpy as np

from .block_index import LayeredIndex, LayerParams
from .errors import ChecksumError, IndexFormatError
from .lce_core import FullLce, SparseLce
from .lce_index import LceIndex
from . import diffcover
from .restructure import BlockDecomposition, Grammar
from .slp import Pair, Slp, Terminal

MAGIC = b"GLCE1"
VERSION = 1
_DTYPES = {1: "<i1", 2: "<i2", 4: "<i4", 8: "<i8"}

Arrays = dict[str, np.ndarray]


def _narrow(arr) -> np.ndarray:
    a = np.asarray(arr, dtype=np.int64)
    if a.size == 0:
        return a.astype("<i1")
    lo, hi = int(a.min()), int(a.max())
    for w in (1, 2, 4):
        if -(1 << (8 * w - 1)) <= lo and hi < 1 << (8 * w - 1):
            return a.astype(_DTYPES[w])
    return a.astype("<i8")


def _pack(arrays: Arrays) -> bytes:
    out = [struct.pack("<I", len(arrays))]
    for name, arr in arrays.items():
        a = _narrow(arr)
        key = name.encode()
        out.append(struct.pack("<B", len(key)) + key)
        out.append(struct.pack("<BQ", a.dtype.itemsize, a.size))
        out.append(a.tobytes())
    return b"".join(out)


def _unpack(payload: bytes) -> Arrays:
    view = memoryview(payload)
    pos = 0

    def take(n: int) -> memoryview:
        nonlocal pos
        if pos + n > len(view):
            raise IndexFormatError("section payload truncated")
        chunk = view[pos:pos + n]
        pos += n
        return chunk

    (count,) = struct.unpack("<I", take(4))
    arrays: Arrays = {}
    for _ in range(count):
        (klen,) = struct.unpack("<B", take(1))
        name = bytes(take(klen)).decode()
        width, size = struct.unpack("<BQ", take(9))
        if width not in _DTYPES:
            raise IndexFormatError(f"bad item width {width}")
        arrays[name] = np.frombuffer(bytes(take(width * size)), dtype=_DTYPES[width]).astype(np.int64)
    if pos != len(view):
        raise IndexFormatError("trailing bytes in section payload")
    return arrays


def _csr(rows) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(rows) + 1, dtype=np.int64)
    np.cumsum([len(r) for r in rows], out=ptr[1:])
    flat = np.fromiter((x for r in rows for x in r), dtype=np.int64, count=int(ptr[-1]))
    return ptr, flat


def _rows(ptr: np.ndarray, flat: np.ndarray) -> list[list[int]]:
    p = ptr.tolist()
    f = flat.tolist()
    return [f[p[k]:p[k + 1]] for k in range(len(p) - 1)]


def _slp_arrays(slp: Slp) -> Arrays:
    kind, a, b = [], [], []
    for rule in slp.rules:
        if isinstance(rule, Terminal):
            kind.append(0)
            a.append(rule.code)
            b.append(0)
        else:
            kind.append(1)
            a.append(rule.left)
            b.append(rule.right)
    return {"kind": kind, "a": a, "b": b, "root": [slp.root]}


def _slp_from(arrs: Arrays) -> Slp:
    rules = [Terminal(int(a)) if k == 0 else Pair(int(a), int(b))
             for k, a, b in zip(arrs["kind"].tolist(), arrs["a"].tolist(), arrs["b"].tolist())]
    return Slp(tuple(rules), int(arrs["root"][0]))


def _layer_arrays(idx: LayeredIndex, li: int) -> Arrays:
    dec = idx.layers[li]
    g = dec.grammar
    arrs: Arrays = {
        "X": [dec.X],
        "left": g.left, "right": g.right, "length": g.length, "label": g.label,
        "structural": [int(s) for s in g.structural], "root": [g.root],
        "block_roots": dec.block_roots, "block_starts": dec.block_starts,
        "basic_blocks": dec.basic_blocks, "block_basic": dec.block_basic,
        "window_first": dec.window_first, "window_offset": dec.window_offset,
        "stats": [dec.k_max, dec.new_symbols, dec.forest_sizes[0], dec.forest_sizes[1],
                  dec.forest_max_occurrences],
    }
    if li > 0:
        arrs["child_ptr"], arrs["children"] = _csr(idx.children[li])
        arrs["start_ptr"], arrs["child_starts"] = _csr(idx.child_starts[li])
        arrs["win_ptr"], arrs["win_first"] = _csr(idx.win_first[li])
        _, arrs["win_offset"] = _csr(idx.win_offset[li])
    return arrs


def _layer_from(arrs: Arrays) -> BlockDecomposition:
    g = Grammar(arrs["left"].tolist(), arrs["right"].tolist(), arrs["length"].tolist(),
                arrs["label"].tolist(), int(arrs["root"][0]),
                [bool(s) for s in arrs["structural"].tolist()])
    k_max, new_symbols, fl, fr, occ = arrs["stats"].tolist()
    return BlockDecomposition(
        grammar=g, X=int(arrs["X"][0]),
        block_roots=arrs["block_roots"].tolist(), block_starts=arrs["block_starts"].tolist(),
        basic_blocks=arrs["basic_blocks"].tolist(), block_basic=arrs["block_basic"].tolist(),
        window_first=arrs["window_first"].tolist(), window_offset=arrs["window_offset"].tolist(),
        k_max=k_max, new_symbols=new_symbols, forest_sizes=(fl, fr), forest_max_occurrences=occ,
    )


def _sections(obj: Union[LayeredIndex, LceIndex]) -> dict[str, Arrays]:
    lx = obj if isinstance(obj, LceIndex) else None
    idx = lx.base if lx else obj
    sections: dict[str, Arrays] = {
        "params": {"xs": idx.params.xs, "has_lce": [int(lx is not None)]},
        "grammar": _slp_arrays(idx.slp),
    }
    for li in range(idx.k):
        sections[f"layer{li + 1}"] = _layer_arrays(idx, li)
    ptr, flat = _csr(idx.leaf)
    sections["leaves"] = {"ptr": ptr, "codes": flat}
    if lx is not None:
        lce: Arrays = {
            "taus": lx.taus, "separator_base": [lx.separator_base],
            "top_n": [lx.top_sparse.n], "top_positions": lx.top_sparse.positions,
            "top_order": lx.top_sparse.order, "top_lcp": lx.top_sparse.lcp,
            "leaf_sa": lx.leaf_full.sa, "leaf_lcp": lx.leaf_full.lcp, "leaf_span": lx.leaf_span,
        }
        for li in range(1, lx.k):
            sp = lx.layer_sparse[li]
            lce[f"l{li}_n"] = [sp.n]
            lce[f"l{li}_positions"] = sp.positions
            lce[f"l{li}_order"] = sp.order
            lce[f"l{li}_lcp"] = sp.lcp
            lce[f"l{li}_span"] = lx.layer_span[li]
        sections["lce"] = lce
    return sections


def dump(obj: Union[LayeredIndex, LceIndex], fh: BinaryIO) -> None:
    sections = _sections(obj)
    buf = io.BytesIO()
    buf.write(MAGIC + struct.pack("<HH", VERSION, len(sections)))
    for name, arrays in sections.items():
        payload = _pack(arrays)
        key = name.encode()
        buf.write(struct.pack("<B", len(key)) + key)
        buf.write(struct.pack("<QI", len(payload), zlib.crc32(payload)))
        buf.write(payload)
    data = buf.getvalue()
    fh.write(data + struct.pack("<I", zlib.crc32(data)))


def _read_sections(data: bytes) -> dict[str, Arrays]:
    if len(data) < len(MAGIC) + 8 or not data.startswith(MAGIC):
        raise IndexFormatError("not an index file (bad magic)")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        raise ChecksumError("file checksum mismatch")
    version, count = struct.unpack_from("<HH", body, len(MAGIC))
    if version != VERSION:
        raise IndexFormatError(f"unsupported index version {version}")
    pos = len(MAGIC) + 4
    sections: dict[str, Arrays] = {}
    try:
        for _ in range(count):
            (klen,) = struct.unpack_from("<B", body, pos)
            name = body[pos + 1:pos + 1 + klen].decode()
            pos += 1 + klen
            size, sec_crc = struct.unpack_from("<QI", body, pos)
            pos += 12
            payload = body[pos:pos + size]
            if len(payload) != size:
                raise IndexFormatError(f"section {name!r} truncated")
            if zlib.crc32(payload) != sec_crc:
                raise ChecksumError(f"checksum mismatch in section {name!r}")
            sections[name] = _unpack(payload)
            pos += size
    except (struct.error, UnicodeDecodeError) as exc:
        raise IndexFormatError(f"malformed section table: {exc}") from exc
    if pos != len(body):
        raise IndexFormatError("trailing bytes after the last section")
    return sections


def load(fh: BinaryIO) -> Union[LayeredIndex, LceIndex]:
    s = _read_sections(fh.read())
    try:
        params = LayerParams(tuple(s["params"]["xs"].tolist()))
        slp = _slp_from(s["grammar"])
        layers, children, starts, wfirst, woff = [], [[]], [[]], [[]], [[]]
        for li in range(params.k):
            arrs = s[f"layer{li + 1}"]
            layers.append(_layer_from(arrs))
            if li > 0:
                children.append(_rows(arrs["child_ptr"], arrs["children"]))
                starts.append(_rows(arrs["start_ptr"], arrs["child_starts"]))
                wfirst.append(_rows(arrs["win_ptr"], arrs["win_first"]))
                woff.append(_rows(arrs["win_ptr"], arrs["win_offset"]))
        leaf = _rows(s["leaves"]["ptr"], s["leaves"]["codes"])
        idx = LayeredIndex(slp, params, layers, children, starts, wfirst, woff, leaf)
        if not s["params"]["has_lce"][0]:
            return idx
        c = s["lce"]
        taus = c["taus"].tolist()
        top = SparseLce(int(c["top_n"][0]), c["top_positions"], c["top_order"], c["top_lcp"])
        layer_sparse, layer_span = [None], [[]]
        for li in range(1, params.k):
            layer_sparse.append(SparseLce(int(c[f"l{li}_n"][0]), c[f"l{li}_positions"],
                                          c[f"l{li}_order"], c[f"l{li}_lcp"]))
            layer_span.append(c[f"l{li}_span"].tolist())
        leaf_full = FullLce.from_arrays(c["leaf_sa"], c["leaf_lcp"])
        return LceIndex(idx, taus, [diffcover.build(t) for t in taus], top, layer_sparse,
                        layer_span, leaf_full, c["leaf_span"].tolist(), int(c["separator_base"][0]))
    except KeyError as exc:
        raise IndexFormatError(f"missing section or array {exc}") from exc


def save(obj: Union[LayeredIndex, LceIndex], path: Union[str, os.PathLike]) -> None:
    with open(path, "wb") as fh:
        dump(obj, fh)


def load_path(path: Union[str, os.PathLike]) -> Union[LayeredIndex, LceIndex]:
    with open(path, "rb") as fh:
        return load(fh)


def dumps(obj: Union[LayeredIndex, LceIndex]) -> bytes:
    buf = io.BytesIO()
    dump(obj, buf)
    return buf.getvalue()


def loads(data: bytes) -> Union[LayeredIndex, LceIndex]:
    return load(io.BytesIO(data))
