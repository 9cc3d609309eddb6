import io
import random
import struct
import zlib

import pytest

from slpindex import serialize
from slpindex.block_index import LayerParams, LayeredIndex, access, build_layered
from slpindex.errors import ChecksumError, IndexFormatError
from slpindex.lce_index import LceIndex, build_lce, lce
from slpindex.synthetic import fibonacci, random_slp, thue_morse


def _same_answers(a: LceIndex, b: LceIndex, rng, queries=1000):
    N = a.N
    for _ in range(queries):
        i, j = rng.randrange(N), rng.randrange(N)
        assert access(a.base, i) == access(b.base, i)
        assert lce(a, i, j) == lce(b, i, j)


@pytest.mark.parametrize("xs", [(2,), (8,), (6, 30), (6, 20, 90)])
def test_round_trip(xs, tmp_path):
    lx = build_lce(build_layered(thue_morse(10), LayerParams(xs)))
    path = tmp_path / "x.idx"
    serialize.save(lx, path)
    again = serialize.load_path(path)
    assert isinstance(again, LceIndex) and again.taus == lx.taus
    _same_answers(lx, again, random.Random(len(xs)))


def test_access_only_index():
    idx = build_layered(fibonacci(12), LayerParams((8, 40)))
    again = serialize.loads(serialize.dumps(idx))
    assert isinstance(again, LayeredIndex) and not isinstance(again, LceIndex)
    assert [access(again, i) for i in range(idx.N)] == [access(idx, i) for i in range(idx.N)]


def test_narrow_widths():
    lx = build_lce(build_layered(fibonacci(10), LayerParams((8,))))
    assert len(serialize.dumps(lx)) < 4000


def test_every_single_byte_flip_rejected():
    lx = build_lce(build_layered(fibonacci(7), LayerParams((6,))))
    data = serialize.dumps(lx)
    for pos in range(len(data)):
        bad = bytearray(data)
        bad[pos] ^= 0x40
        with pytest.raises(IndexFormatError):
            serialize.loads(bytes(bad))


def test_section_checksum_checked_even_with_fixed_trailer():
    lx = build_lce(build_layered(fibonacci(9), LayerParams((8,))))
    data = bytearray(serialize.dumps(lx))
    body = data[:-4]
    body[-3] ^= 1  # inside the last section's payload
    patched = bytes(body) + struct.pack("<I", zlib.crc32(bytes(body)))
    with pytest.raises(ChecksumError):
        serialize.loads(patched)


def test_truncated_and_foreign_files():
    data = serialize.dumps(build_lce(build_layered(fibonacci(9), LayerParams((8,)))))
    with pytest.raises(IndexFormatError):
        serialize.loads(data[:-10])
    with pytest.raises(IndexFormatError):
        serialize.loads(b"")
    with pytest.raises(IndexFormatError):
        serialize.loads(b"PK\x03\x04" + data[4:])


def test_version_checked():
    data = bytearray(serialize.dumps(build_layered(fibonacci(6), LayerParams((6,)))))
    data[5:7] = struct.pack("<H", 2)
    body = bytes(data[:-4])
    with pytest.raises(IndexFormatError, match="version"):
        serialize.loads(body + struct.pack("<I", zlib.crc32(body)))


def test_random_corpus_round_trip():
    rng = random.Random(8)
    for _ in range(10):
        slp = random_slp(rng, rng.randint(2, 150), rng.choice([2, 4, 26]), 10_000)
        lx = build_lce(build_layered(slp))
        again = serialize.load(io.BytesIO(serialize.dumps(lx)))
        _same_answers(lx, again, rng)
