"""
Pointerless wavelet tree over integer sequences with alphabet [1, sigma].

Levels are stored as one bitvector of length n each (the wavelet-matrix style
concatenation), but the alphabet is split at the midpoint ``m = (a + b) // 2``
of every node interval ``[a, b]`` so that the nodes of level k are exactly the
tree's alphabet partitions. Elements of a node that already is a leaf keep their
place (with bit 0) on deeper levels.

A node is addressed by ``(start, length)`` inside its level bitvector; its left
child occupies ``[start, start + zeros)`` and its right child the rest on the
next level.
"""

import struct
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import (
    ConfigurationError,
    IndexLoadError,
    OccurrenceNotFound,
    PositionError,
)
from ..utils.binary import ByteReader, pack_blob
from .bitvector import AnyBitVector, make_bitvector, read_bitvector

Partition = Tuple[int, int]
RangeSpec = Tuple["WaveletMatrix", int, int]


def level_count(sigma: int) -> int:
    """Depth of the midpoint tree over [1, sigma]."""
    return max(sigma - 1, 0).bit_length()


def alphabet_partitions(sigma: int, k: int) -> List[Partition]:
    """The node intervals reached after descending ``k`` levels (leaves stay put)."""
    parts = [(1, sigma)] if sigma >= 1 else []
    for _ in range(k):
        nxt = []
        for a, b in parts:
            if a == b:
                nxt.append((a, b))
            else:
                m = (a + b) // 2
                nxt.extend([(a, m), (m + 1, b)])
        parts = nxt
    return parts


class WaveletMatrix:
    """Wavelet tree supporting access/rank/select and range primitives.

    Args:
        sequence: Symbols in [1, sigma].
        sigma: Alphabet upper bound, shared by every structure that must be intersectable.
        compressed: Store levels as `CompressedBitVector`.
    """

    def __init__(
        self, sequence: Iterable[int], sigma: int, compressed: bool = False
    ):
        if isinstance(sequence, np.ndarray):
            seq = sequence.astype(np.int64)
        else:
            seq = np.fromiter(sequence, dtype=np.int64)
        if sigma < 1:
            raise ConfigurationError(f"alphabet size must be positive, got {sigma}")
        if seq.size and (seq.min() < 1 or seq.max() > sigma):
            raise ConfigurationError(
                f"symbols must lie in [1, {sigma}], got [{seq.min()}, {seq.max()}]"
            )
        self.n = int(seq.shape[0])
        self.sigma = sigma
        self.compressed = compressed
        self._levels: List[AnyBitVector] = []

        lo = np.ones(self.n, dtype=np.int64)
        hi = np.full(self.n, sigma, dtype=np.int64)
        for _ in range(level_count(sigma)):
            active = lo < hi
            mid = (lo + hi) // 2
            bits = active & (seq > mid)
            self._levels.append(make_bitvector(bits, compressed=compressed))
            lo = np.where(bits, mid + 1, lo)
            hi = np.where(active & ~bits, mid, hi)
            order = np.argsort(lo, kind="stable")
            seq, lo, hi = seq[order], lo[order], hi[order]

    def __len__(self) -> int:
        return self.n

    @property
    def depth(self) -> int:
        return len(self._levels)

    @property
    def nbytes(self) -> int:
        return sum(level.nbytes for level in self._levels)

    # ----- node arithmetic -----

    def _zeros_before(self, level: int, i: int) -> int:
        return i - self._levels[level].rank1(i)

    def _split(
        self, level: int, start: int, length: int, i: int, j: int
    ) -> Tuple[int, int, int, int, int, int]:
        """Map the local half-open range ``[i, j)`` of a node to both children.

        Returns ``(zeros, li, lj, ri, rj, base)`` where the left child starts at
        ``start`` with length ``zeros`` and the right one at ``start + zeros``.
        """
        base = self._zeros_before(level, start)
        zeros = self._zeros_before(level, start + length) - base
        li = self._zeros_before(level, start + i) - base
        lj = self._zeros_before(level, start + j) - base
        return zeros, li, lj, i - li, j - lj, base

    def _check_position(self, i: int) -> None:
        if i < 1 or i > self.n:
            raise PositionError(f"position {i} outside [1, {self.n}]")

    def _check_symbol(self, c: int) -> None:
        if c < 1 or c > self.sigma:
            raise PositionError(f"symbol {c} outside [1, {self.sigma}]")

    def _check_range(self, l: int, r: int) -> bool:
        """Validate ``[l, r]``; returns False for an empty range."""
        if l > r:
            return False
        if l < 1 or r > self.n:
            raise PositionError(f"range [{l}, {r}] outside [1, {self.n}]")
        return True

    # ----- access / rank / select -----

    def access(self, i: int) -> int:
        self._check_position(i)
        start, length, a, b, p = 0, self.n, 1, self.sigma, i - 1
        for level in range(self.depth):
            if a == b:
                break
            m = (a + b) // 2
            bv = self._levels[level]
            base1 = bv.rank1(start)
            zeros = length - (bv.rank1(start + length) - base1)
            if bv.access(start + p + 1):
                p = bv.rank1(start + p) - base1
                start, length, a = start + zeros, length - zeros, m + 1
            else:
                p = p - (bv.rank1(start + p) - base1)
                length, b = zeros, m
        return a

    def rank(self, c: int, i: int) -> int:
        """Occurrences of ``c`` in S[1..i]."""
        if i < 0 or i > self.n:
            raise PositionError(f"rank position {i} outside [0, {self.n}]")
        if c < 1 or c > self.sigma:
            return 0
        return self.rank_pair(c, 0, i)[1]

    def rank_pair(self, c: int, i: int, j: int) -> Tuple[int, int]:
        """``(rank(c, i), rank(c, j))`` for ``i <= j`` in one descent."""
        if c < 1 or c > self.sigma:
            return 0, 0
        start, length, a, b = 0, self.n, 1, self.sigma
        level = 0
        while a < b and j > 0:
            m = (a + b) // 2
            zeros, li, lj, ri, rj, _ = self._split(level, start, length, i, j)
            if c <= m:
                length, b, i, j = zeros, m, li, lj
            else:
                start, length, a, i, j = start + zeros, length - zeros, m + 1, ri, rj
            level += 1
        return i, j

    def select(self, c: int, j: int) -> int:
        """Position of the ``j``-th occurrence of ``c``."""
        self._check_symbol(c)
        path = []
        start, length, a, b = 0, self.n, 1, self.sigma
        level = 0
        while a < b:
            m = (a + b) // 2
            zeros = self._zeros_before(level, start + length) - self._zeros_before(level, start)
            right = c > m
            path.append((level, start, right))
            if right:
                start, length, a = start + zeros, length - zeros, m + 1
            else:
                length, b = zeros, m
            level += 1
        if j < 1 or j > length:
            raise OccurrenceNotFound(f"occurrence {j} of symbol {c} (only {length})")
        p = j
        for level, start, right in reversed(path):
            bv = self._levels[level]
            if right:
                p = bv.select1(bv.rank1(start) + p) - start
            else:
                p = bv.select0(start - bv.rank1(start) + p) - start
        return p

    # ----- range primitives -----

    def range_next_value(self, l: int, r: int, c: int) -> Optional[int]:
        """Smallest symbol ``>= c`` occurring in S[l..r], or None."""
        if not self._check_range(l, r) or c > self.sigma:
            return None
        return self._next_value(0, 0, self.n, 1, self.sigma, l - 1, r, max(c, 1))

    def _next_value(
        self, level: int, start: int, length: int, a: int, b: int, i: int, j: int, c: int
    ) -> Optional[int]:
        if i >= j or b < c:
            return None
        if a == b:
            return a
        m = (a + b) // 2
        zeros, li, lj, ri, rj, _ = self._split(level, start, length, i, j)
        if c <= m:
            found = self._next_value(level + 1, start, zeros, a, m, li, lj, c)
            if found is not None:
                return found
        return self._next_value(
            level + 1, start + zeros, length - zeros, m + 1, b, ri, rj, c
        )

    def range_count(self, l: int, r: int, x_lo: int, x_hi: int) -> int:
        """Number of positions in [l, r] whose symbol lies in [x_lo, x_hi]."""
        if not self._check_range(l, r):
            return 0
        x_lo, x_hi = max(x_lo, 1), min(x_hi, self.sigma)
        if x_lo > x_hi:
            return 0
        return self._count(0, 0, self.n, 1, self.sigma, l - 1, r, x_lo, x_hi)

    def _count(
        self, level: int, start: int, length: int, a: int, b: int,
        i: int, j: int, x_lo: int, x_hi: int,
    ) -> int:
        if i >= j or b < x_lo or a > x_hi:
            return 0
        if x_lo <= a and b <= x_hi:
            return j - i
        m = (a + b) // 2
        zeros, li, lj, ri, rj, _ = self._split(level, start, length, i, j)
        return self._count(level + 1, start, zeros, a, m, li, lj, x_lo, x_hi) + self._count(
            level + 1, start + zeros, length - zeros, m + 1, b, ri, rj, x_lo, x_hi
        )

    # ----- serialization -----

    def to_bytes(self) -> bytes:
        head = struct.pack("<QQB?", self.n, self.sigma, self.depth, self.compressed)
        return head + b"".join(pack_blob(level.to_bytes()) for level in self._levels)

    @classmethod
    def from_reader(cls, reader: ByteReader) -> "WaveletMatrix":
        n, sigma, depth, compressed = reader.unpack("<QQB?")
        if sigma < 1 or depth != level_count(sigma):
            raise IndexLoadError(
                f"wavelet depth {depth} does not match alphabet {sigma}", reader.section
            )
        obj = cls.__new__(cls)
        obj.n, obj.sigma, obj.compressed = n, sigma, compressed
        obj._levels = []
        for _ in range(depth):
            inner = ByteReader(reader.read_blob(), section=reader.section)
            level = read_bitvector(inner)
            inner.expect_end()
            if len(level) != n:
                raise IndexLoadError("wavelet level length mismatch", reader.section)
            obj._levels.append(level)
        return obj


# ----- multi-range operations -----

_Node = Tuple[int, int, int, int]  # start, length, i, j


def _prepare(ranges: Sequence[RangeSpec]) -> Tuple[int, List[_Node], bool]:
    if not ranges:
        raise ConfigurationError("at least one range is required")
    sigma = ranges[0][0].sigma
    nodes: List[_Node] = []
    empty = False
    for wm, l, r in ranges:
        if wm.sigma != sigma:
            raise ConfigurationError(
                f"mismatched alphabets: {wm.sigma} != {sigma}"
            )
        if not wm._check_range(l, r):
            empty = True
            nodes.append((0, wm.n, 0, 0))
        else:
            nodes.append((0, wm.n, l - 1, r))
    return sigma, nodes, empty


def _children(
    wms: Sequence[WaveletMatrix], level: int, nodes: Sequence[_Node]
) -> Tuple[List[_Node], List[_Node]]:
    left, right = [], []
    for wm, (start, length, i, j) in zip(wms, nodes):
        zeros, li, lj, ri, rj, _ = wm._split(level, start, length, i, j)
        left.append((start, zeros, li, lj))
        right.append((start + zeros, length - zeros, ri, rj))
    return left, right


def range_intersect(ranges: Sequence[RangeSpec]) -> List[int]:
    """Ascending symbols occurring in every ``(wm, l, r)`` range."""
    sigma, nodes, empty = _prepare(ranges)
    if empty:
        return []
    wms = [spec[0] for spec in ranges]
    out: List[int] = []

    def descend(level: int, a: int, b: int, current: List[_Node]) -> None:
        if any(i >= j for _, _, i, j in current):
            return
        if a == b:
            out.append(a)
            return
        m = (a + b) // 2
        left, right = _children(wms, level, current)
        descend(level + 1, a, m, left)
        descend(level + 1, m + 1, b, right)

    descend(0, 1, sigma, nodes)
    return out


def partition_weights(
    ranges: Sequence[RangeSpec], k: int, prune: bool = False
) -> List[Tuple[Partition, Tuple[int, ...]]]:
    """Synchronized descent of all ranges ``k`` levels deep.

    Returns each alphabet partition with the per-range symbol counts. With
    ``prune`` set, partitions where some range is empty are dropped (their
    minimum is 0).
    """
    if k < 0:
        raise ConfigurationError(f"partition depth must be >= 0, got {k}")
    sigma, nodes, empty = _prepare(ranges)
    if empty and prune:
        return []
    wms = [spec[0] for spec in ranges]
    out: List[Tuple[Partition, Tuple[int, ...]]] = []

    def descend(level: int, a: int, b: int, current: List[_Node]) -> None:
        counts = tuple(j - i for _, _, i, j in current)
        if prune and min(counts) == 0:
            return
        if level == k or a == b:
            out.append(((a, b), counts))
            return
        m = (a + b) // 2
        left, right = _children(wms, level, current)
        descend(level + 1, a, m, left)
        descend(level + 1, m + 1, b, right)

    descend(0, 1, sigma, nodes)
    return out


def refined_estimate(ranges: Sequence[RangeSpec], k: int) -> int:
    """Upper bound on the intersection size: sum over partitions of the minimum count."""
    return sum(min(counts) for _, counts in partition_weights(ranges, k, prune=True))
