"""
Rank/select bitvectors.

Two flavors share one contract (positions are 1-based, ``rank`` accepts 0):

- `BitVector`: plain bits in a `bitarray` plus a cumulative popcount directory
  sampled every ``block_size`` bits. Rank is a directory lookup plus one in-block
  popcount; select binary-searches the directory and finishes with `count_n`
  inside a single block.
- `CompressedBitVector`: zero-order compressed blocks of 15 bits stored as
  (class, offset) pairs, the class being the block popcount and the offset the
  block's rank among all 15-bit patterns of that class. Superblocks every 32
  blocks sample the rank and the offset-stream pointer.

Both answer `access`, `rank`, `select` and `selectnext` identically on the same bits.
"""

import struct
from bisect import bisect_left
from math import comb
from typing import Iterable, Optional, Tuple, Union

import numpy as np
from bitarray import bitarray
from bitarray.util import ba2int, count_n, int2ba

from ..errors import IndexLoadError, OccurrenceNotFound, PositionError
from ..utils.binary import ByteReader, pack_array, pack_blob

BitsLike = Union[bitarray, np.ndarray, str, Iterable[int]]

_KIND_PLAIN = 0
_KIND_COMPRESSED = 1

_POPCOUNT8 = np.array([bin(v).count("1") for v in range(256)], dtype=np.uint16)


def to_bitarray(bits: BitsLike) -> bitarray:
    """Normalize any bit source to a big-endian `bitarray`."""
    if isinstance(bits, bitarray):
        out = bitarray(bits, endian="big")
        return out
    if isinstance(bits, np.ndarray):
        flat = np.asarray(bits, dtype=bool).ravel()
        out = bitarray(endian="big")
        out.frombytes(np.packbits(flat).tobytes())
        del out[flat.shape[0] :]
        return out
    if isinstance(bits, str):
        return bitarray(bits, endian="big")
    return bitarray([1 if b else 0 for b in bits], endian="big")


class _RankSelect:
    """Checked public operations on top of the unchecked primitives."""

    _n: int
    _ones: int

    def __len__(self) -> int:
        return self._n

    @property
    def ones(self) -> int:
        return self._ones

    @property
    def zeros(self) -> int:
        return self._n - self._ones

    def access(self, i: int) -> int:
        if i < 1 or i > self._n:
            raise PositionError(f"position {i} outside [1, {self._n}]")
        return self._get(i)

    def rank(self, b: int, i: int) -> int:
        if i < 0 or i > self._n:
            raise PositionError(f"rank position {i} outside [0, {self._n}]")
        ones = self.rank1(i)
        return ones if b else i - ones

    def select(self, b: int, j: int) -> int:
        total = self._ones if b else self._n - self._ones
        if j < 1 or j > total:
            raise OccurrenceNotFound(f"occurrence {j} of bit {b} (only {total})")
        return self.select1(j) if b else self.select0(j)

    def selectnext(self, b: int, j: int) -> Optional[int]:
        if j < 1:
            raise PositionError(f"position {j} outside [1, {self._n}]")
        if j > self._n:
            return None
        before = self.rank(b, j - 1)
        total = self._ones if b else self._n - self._ones
        if before >= total:
            return None
        return self.select1(before + 1) if b else self.select0(before + 1)

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    # primitives, overridden by the flavors
    def rank1(self, i: int) -> int:
        raise NotImplementedError

    def select1(self, j: int) -> int:
        raise NotImplementedError

    def select0(self, j: int) -> int:
        raise NotImplementedError

    def _get(self, i: int) -> int:
        raise NotImplementedError

    @property
    def nbytes(self) -> int:
        raise NotImplementedError

    def to_bytes(self) -> bytes:
        raise NotImplementedError


class BitVector(_RankSelect):
    """Plain bitvector with a sampled popcount directory.

    Args:
        bits: Bit source (bitarray, numpy bool array, '0'/'1' string or iterable of 0/1).
        block_size: Directory sampling period in bits, a multiple of 8.
    """

    def __init__(self, bits: BitsLike, block_size: int = 256):
        if block_size <= 0 or block_size % 8:
            raise ValueError(f"block_size must be a positive multiple of 8, got {block_size}")
        self._bits = to_bitarray(bits)
        self._n = len(self._bits)
        self._block = block_size
        self._directory = self._build_directory()
        self._ones = int(self._directory[-1])

    @classmethod
    def _from_parts(cls, bits: bitarray, block_size: int, directory: np.ndarray):
        obj = cls.__new__(cls)
        obj._bits = bits
        obj._n = len(bits)
        obj._block = block_size
        obj._directory = directory
        obj._ones = int(directory[-1])
        return obj

    def _build_directory(self) -> np.ndarray:
        nblocks = (self._n + self._block - 1) // self._block
        stride = self._block // 8
        raw = np.frombuffer(self._bits.tobytes(), dtype=np.uint8)
        padded = np.zeros(nblocks * stride, dtype=np.uint8)
        padded[: raw.shape[0]] = raw
        directory = np.zeros(nblocks + 1, dtype=np.uint32)
        if nblocks:
            counts = _POPCOUNT8[padded.reshape(nblocks, stride)].sum(axis=1)
            directory[1:] = np.cumsum(counts)
        return directory

    def rank1(self, i: int) -> int:
        block = i // self._block
        start = block * self._block
        ones = int(self._directory[block])
        if i > start:
            ones += self._bits.count(1, start, i)
        return ones

    def select1(self, j: int) -> int:
        block = int(np.searchsorted(self._directory, j, side="left")) - 1
        return self._finish_select(block, j - int(self._directory[block]), 1)

    def select0(self, j: int) -> int:
        size, n, directory = self._block, self._n, self._directory
        k = bisect_left(
            range(directory.shape[0]),
            j,
            key=lambda b: min(b * size, n) - int(directory[b]),
        )
        block = k - 1
        before = min(block * size, n) - int(directory[block])
        return self._finish_select(block, j - before, 0)

    def _finish_select(self, block: int, remaining: int, b: int) -> int:
        start = block * self._block
        segment = self._bits[start : min(start + self._block, self._n)]
        if not b:
            segment.invert()
        return start + count_n(segment, remaining)

    def _get(self, i: int) -> int:
        return self._bits[i - 1]

    @property
    def nbytes(self) -> int:
        return (self._n + 7) // 8 + self._directory.nbytes

    def to_bytes(self) -> bytes:
        head = struct.pack("<BQI", _KIND_PLAIN, self._n, self._block)
        return (
            head
            + pack_blob(self._bits.tobytes())
            + pack_array(self._directory, "<u4")
        )

    @classmethod
    def _read(cls, reader: ByteReader) -> "BitVector":
        n, block = reader.unpack("<QI")
        payload = reader.read_blob()
        if len(payload) != (n + 7) // 8 or block <= 0 or block % 8:
            raise IndexLoadError("bitvector payload size mismatch", reader.section)
        bits = bitarray(endian="big")
        bits.frombytes(payload)
        del bits[n:]
        directory = reader.read_array("<u4").astype(np.uint32)
        if directory.shape[0] != (n + block - 1) // block + 1:
            raise IndexLoadError("bitvector directory size mismatch", reader.section)
        return cls._from_parts(bits, block, directory)


# ----- zero-order compressed flavor -----

_RRR_BLOCK = 15
_RRR_SUPER = 32

_PATTERNS = [[] for _ in range(_RRR_BLOCK + 1)]
for _value in range(1 << _RRR_BLOCK):
    _PATTERNS[_value.bit_count()].append(_value)
_OFFSET_OF = np.zeros(1 << _RRR_BLOCK, dtype=np.uint16)
for _cls, _patterns in enumerate(_PATTERNS):
    _OFFSET_OF[_patterns] = np.arange(len(_patterns), dtype=np.uint16)
_WIDTH = [(comb(_RRR_BLOCK, c) - 1).bit_length() for c in range(_RRR_BLOCK + 1)]
_WIDTH_NP = np.array(_WIDTH, dtype=np.int64)
_BLOCK_WEIGHTS = 1 << np.arange(_RRR_BLOCK - 1, -1, -1, dtype=np.int64)


class CompressedBitVector(_RankSelect):
    """Block-compressed bitvector answering exactly like `BitVector`."""

    def __init__(self, bits: BitsLike):
        source = to_bitarray(bits)
        self._n = len(source)
        nblocks = (self._n + _RRR_BLOCK - 1) // _RRR_BLOCK
        self._nblocks = nblocks

        flat = np.unpackbits(np.frombuffer(source.tobytes(), dtype=np.uint8))[: self._n]
        padded = np.zeros(nblocks * _RRR_BLOCK, dtype=np.int64)
        padded[: self._n] = flat
        blocks = padded.reshape(nblocks, _RRR_BLOCK)
        values = blocks @ _BLOCK_WEIGHTS if nblocks else np.zeros(0, dtype=np.int64)
        classes = blocks.sum(axis=1).astype(np.uint8)
        offsets = _OFFSET_OF[values]
        widths = _WIDTH_NP[classes]

        stream = bitarray(endian="big")
        for offset, width in zip(offsets.tolist(), widths.tolist()):
            if width:
                stream.extend(int2ba(offset, length=width, endian="big"))
        self._stream = stream

        if nblocks % 2:
            classes = np.append(classes, np.uint8(0))
        self._classes = (classes[0::2] | (classes[1::2] << 4)).astype(np.uint8)

        starts = np.arange(0, nblocks, _RRR_SUPER)
        rank_before = np.concatenate(([0], np.cumsum(blocks.sum(axis=1))))
        ptr_before = np.concatenate(([0], np.cumsum(widths)))
        self._sb_rank = rank_before[starts].astype(np.uint32)
        self._sb_ptr = ptr_before[starts].astype(np.uint64)
        self._ones = int(rank_before[-1])

    def _class(self, block: int) -> int:
        byte = int(self._classes[block >> 1])
        return byte >> 4 if block & 1 else byte & 15

    def _locate(self, block: int) -> Tuple[int, int]:
        sb = block // _RRR_SUPER
        rank = int(self._sb_rank[sb])
        ptr = int(self._sb_ptr[sb])
        for k in range(sb * _RRR_SUPER, block):
            c = self._class(k)
            rank += c
            ptr += _WIDTH[c]
        return rank, ptr

    def _value(self, block: int, ptr: int) -> int:
        c = self._class(block)
        width = _WIDTH[c]
        offset = ba2int(self._stream[ptr : ptr + width]) if width else 0
        return _PATTERNS[c][offset]

    def rank1(self, i: int) -> int:
        if i >= self._n:
            return self._ones
        block, inner = divmod(i, _RRR_BLOCK)
        rank, ptr = self._locate(block)
        if inner:
            rank += (self._value(block, ptr) >> (_RRR_BLOCK - inner)).bit_count()
        return rank

    def _get(self, i: int) -> int:
        block, inner = divmod(i - 1, _RRR_BLOCK)
        _, ptr = self._locate(block)
        return (self._value(block, ptr) >> (_RRR_BLOCK - 1 - inner)) & 1

    def _before(self, sb: int, b: int) -> int:
        ones = int(self._sb_rank[sb])
        if b:
            return ones
        return min(sb * _RRR_SUPER * _RRR_BLOCK, self._n) - ones

    def _select(self, b: int, j: int) -> int:
        sb = bisect_left(range(self._sb_rank.shape[0]), j, key=lambda k: self._before(k, b)) - 1
        before = self._before(sb, b)
        block = sb * _RRR_SUPER
        ptr = int(self._sb_ptr[sb])
        while True:
            c = self._class(block)
            length = min(_RRR_BLOCK, self._n - block * _RRR_BLOCK)
            count = c if b else length - c
            if before + count >= j:
                value = self._value(block, ptr)
                for t in range(length):
                    if ((value >> (_RRR_BLOCK - 1 - t)) & 1) == b:
                        before += 1
                        if before == j:
                            return block * _RRR_BLOCK + t + 1
            before += count
            ptr += _WIDTH[c]
            block += 1

    def select1(self, j: int) -> int:
        return self._select(1, j)

    def select0(self, j: int) -> int:
        return self._select(0, j)

    @property
    def nbytes(self) -> int:
        return (
            self._classes.nbytes
            + (len(self._stream) + 7) // 8
            + self._sb_rank.nbytes
            + self._sb_ptr.nbytes
        )

    def to_bytes(self) -> bytes:
        head = struct.pack("<BQQ", _KIND_COMPRESSED, self._n, len(self._stream))
        return (
            head
            + pack_array(self._classes, "<u1")
            + pack_blob(self._stream.tobytes())
            + pack_array(self._sb_rank, "<u4")
            + pack_array(self._sb_ptr, "<u8")
        )

    @classmethod
    def _read(cls, reader: ByteReader) -> "CompressedBitVector":
        n, stream_bits = reader.unpack("<QQ")
        obj = cls.__new__(cls)
        obj._n = n
        obj._nblocks = (n + _RRR_BLOCK - 1) // _RRR_BLOCK
        obj._classes = reader.read_array("<u1").astype(np.uint8)
        payload = reader.read_blob()
        if len(payload) != (stream_bits + 7) // 8:
            raise IndexLoadError("compressed stream size mismatch", reader.section)
        obj._stream = bitarray(endian="big")
        obj._stream.frombytes(payload)
        del obj._stream[stream_bits:]
        obj._sb_rank = reader.read_array("<u4").astype(np.uint32)
        obj._sb_ptr = reader.read_array("<u8").astype(np.uint64)
        expected_sb = (obj._nblocks + _RRR_SUPER - 1) // _RRR_SUPER
        if (
            obj._classes.shape[0] != (obj._nblocks + 1) // 2
            or obj._sb_rank.shape[0] != expected_sb
        ):
            raise IndexLoadError("compressed directory size mismatch", reader.section)
        obj._ones = sum(obj._class(k) for k in range(obj._nblocks))
        return obj


AnyBitVector = Union[BitVector, CompressedBitVector]


def make_bitvector(bits: BitsLike, compressed: bool = False) -> AnyBitVector:
    return CompressedBitVector(bits) if compressed else BitVector(bits)


def read_bitvector(reader: ByteReader) -> AnyBitVector:
    """Read either flavor back from a `to_bytes` payload."""
    (kind,) = reader.unpack("<B")
    if kind == _KIND_PLAIN:
        return BitVector._read(reader)
    if kind == _KIND_COMPRESSED:
        return CompressedBitVector._read(reader)
    raise IndexLoadError(f"unknown bitvector kind {kind}", reader.section)
