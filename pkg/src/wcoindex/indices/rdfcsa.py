"""
Suffix-array index over the triples read as cyclic strings of length 3.

Each triple contributes three mapped symbols to a text T[1..3n]; symbols of the
three roles live in disjoint bands separated by gaps, so the suffix array splits
into three regions, one per role. Psi moves from a suffix to the suffix that
starts one symbol later in the same triple (cyclically), and D marks where the
first symbol changes.

Two such structures are kept: one for the spo cyclic order and one for ops, so
that any single bound role is followed by any other role in one of them.
"""

import struct
from bisect import bisect_left, bisect_right
from typing import Dict, List, Optional, Tuple

import numpy as np
from bitarray import bitarray
from bitarray.util import ba2int
from loguru import logger

from ..errors import IndexLoadError, IngestError
from ..ingest.parser import RoleAlphabets
from ..structures.bitvector import AnyBitVector, make_bitvector, read_bitvector, to_bitarray
from ..types import NEXT_ROLE, ROLES, TriplePattern
from ..utils.binary import ByteReader, pack_array, pack_blob
from .base import TrieCursor, TripleIndex, canonical_triples, role_column

Order = Tuple[str, str, str]
SPO: Order = ("s", "p", "o")
OPS: Order = ("o", "p", "s")

_EMPTY = (1, 0)
_SCAN_LIMIT = 64

_KIND_PLAIN = 0
_KIND_SAMPLED = 1


# ----- Psi storage -----


class PlainPsi:
    """Fixed-width Psi: each entry stores its offset inside the target region."""

    def __init__(self, values: np.ndarray, n: int):
        self.n = n
        self.width = max(n - 1, 1).bit_length()
        t = np.arange(values.shape[0], dtype=np.int64)
        base = ((t // max(n, 1) + 1) % 3) * n
        offsets = values.astype(np.int64) - 1 - base
        shifts = np.arange(self.width - 1, -1, -1, dtype=np.int64)
        self._bits = to_bitarray(((offsets[:, None] >> shifts) & 1).astype(bool).ravel())

    def __len__(self) -> int:
        return 3 * self.n

    def __getitem__(self, i: int) -> int:
        t = i - 1
        w = self.width
        offset = ba2int(self._bits[t * w : t * w + w])
        return ((t // self.n + 1) % 3) * self.n + offset + 1

    @property
    def nbytes(self) -> int:
        return (len(self._bits) + 7) // 8

    def to_bytes(self) -> bytes:
        return struct.pack("<BQB", _KIND_PLAIN, self.n, self.width) + pack_blob(
            self._bits.tobytes()
        )

    @classmethod
    def _read(cls, reader: ByteReader) -> "PlainPsi":
        obj = cls.__new__(cls)
        obj.n, obj.width = reader.unpack("<QB")
        payload = reader.read_blob()
        total = 3 * obj.n * obj.width
        if len(payload) != (total + 7) // 8:
            raise IndexLoadError("psi payload size mismatch", reader.section)
        obj._bits = bitarray(endian="big")
        obj._bits.frombytes(payload)
        del obj._bits[total:]
        return obj


def _zigzag(d: int) -> int:
    return d << 1 if d >= 0 else ((-d) << 1) - 1


def _unzigzag(z: int) -> int:
    return z >> 1 if not z & 1 else -((z + 1) >> 1)


def _put_varint(out: bytearray, value: int) -> None:
    while value >= 0x80:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.append(value)


class SampledPsi:
    """Psi sampled every ``t`` entries; in between, varint gaps with runs of +1.

    A token ``(run << 1) | 1`` stands for ``run`` consecutive +1 gaps; a token
    ``zigzag(gap) << 1`` for a single gap.
    """

    def __init__(self, values: np.ndarray, sample_rate: int = 16):
        if sample_rate < 1:
            raise ValueError(f"sample rate must be positive, got {sample_rate}")
        self.t = sample_rate
        self.length = int(values.shape[0])
        self._samples = values[:: self.t].astype(np.uint32)
        stream = bytearray()
        offsets = []
        vals = values.tolist()
        for start in range(0, self.length, self.t):
            offsets.append(len(stream))
            run = 0
            for k in range(start + 1, min(start + self.t, self.length)):
                gap = vals[k] - vals[k - 1]
                if gap == 1:
                    run += 1
                    continue
                if run:
                    _put_varint(stream, (run << 1) | 1)
                    run = 0
                _put_varint(stream, _zigzag(gap) << 1)
            if run:
                _put_varint(stream, (run << 1) | 1)
        self._offsets = np.asarray(offsets, dtype=np.uint32)
        self._stream = bytes(stream)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        block, remaining = divmod(i - 1, self.t)
        value = int(self._samples[block])
        pos = int(self._offsets[block])
        stream = self._stream
        while remaining:
            token, shift = 0, 0
            while True:
                byte = stream[pos]
                pos += 1
                token |= (byte & 0x7F) << shift
                if byte < 0x80:
                    break
                shift += 7
            if token & 1:
                step = min(token >> 1, remaining)
                value += step
                remaining -= step
            else:
                value += _unzigzag(token >> 1)
                remaining -= 1
        return value

    @property
    def nbytes(self) -> int:
        return self._samples.nbytes + self._offsets.nbytes + len(self._stream)

    def to_bytes(self) -> bytes:
        return (
            struct.pack("<BQI", _KIND_SAMPLED, self.length, self.t)
            + pack_array(self._samples, "<u4")
            + pack_array(self._offsets, "<u4")
            + pack_blob(self._stream)
        )

    @classmethod
    def _read(cls, reader: ByteReader) -> "SampledPsi":
        obj = cls.__new__(cls)
        obj.length, obj.t = reader.unpack("<QI")
        obj._samples = reader.read_array("<u4").astype(np.uint32)
        obj._offsets = reader.read_array("<u4").astype(np.uint32)
        obj._stream = reader.read_blob()
        blocks = (obj.length + obj.t - 1) // obj.t if obj.t else -1
        if obj._samples.shape[0] != blocks or obj._offsets.shape[0] != blocks:
            raise IndexLoadError("psi sample table size mismatch", reader.section)
        return obj


def read_psi(reader: ByteReader):
    (kind,) = reader.unpack("<B")
    if kind == _KIND_PLAIN:
        return PlainPsi._read(reader)
    if kind == _KIND_SAMPLED:
        return SampledPsi._read(reader)
    raise IndexLoadError(f"unknown psi kind {kind}", reader.section)


# ----- one cyclic suffix array -----


class Rdfcsa:
    """Cyclic suffix array over role-id triples, in one cyclic order.

    Args:
        role_triples: (n, 3) array of role-specific ids, columns in s, p, o order.
        sizes: Alphabet size per role.
        order: ``SPO`` or ``OPS``.
        compressed: Sampled Psi and compressed D.
        sample_rate: Psi sample period when compressed.
    """

    def __init__(
        self,
        role_triples: np.ndarray,
        sizes: Dict[str, int],
        order: Order = SPO,
        compressed: bool = False,
        sample_rate: int = 16,
    ):
        self.n = int(role_triples.shape[0])
        if not self.n:
            raise IngestError("empty graph")
        self.order = order
        self.sizes = dict(sizes)
        self.gaps = self._gaps(order, self.sizes)
        n = self.n
        a, b, c = (
            role_triples[:, role_column(r)].astype(np.int64) + self.gaps[r] for r in order
        )
        first = np.lexsort((c, b, a))
        second = np.lexsort((a, c, b))
        third = np.lexsort((b, a, c))
        ranks = [np.empty(n, dtype=np.int64) for _ in range(3)]
        for k, perm in enumerate((first, second, third)):
            ranks[k][perm] = np.arange(n) + 1 + k * n
        psi = np.empty(3 * n, dtype=np.int64)
        psi[ranks[0] - 1] = ranks[1]
        psi[ranks[1] - 1] = ranks[2]
        psi[ranks[2] - 1] = ranks[0]
        heads = np.concatenate((a[first], b[second], c[third]))
        marks = np.ones(3 * n, dtype=bool)
        marks[1:] = heads[1:] != heads[:-1]

        self.D: AnyBitVector = make_bitvector(marks, compressed=compressed)
        self._psi = SampledPsi(psi, sample_rate) if compressed else PlainPsi(psi, n)
        logger.debug(
            f"rdfcsa {''.join(order)} built: n={n} symbols={self.D.ones} psi={type(self._psi).__name__}"
        )

    @staticmethod
    def _gaps(order: Order, sizes: Dict[str, int]) -> Dict[str, int]:
        return {
            order[0]: 0,
            order[1]: sizes[order[0]],
            order[2]: sizes[order[0]] + sizes[order[1]],
        }

    # ----- primitives -----

    def psi(self, i: int) -> int:
        return self._psi[i]

    def psi2(self, i: int) -> int:
        return self._psi[self._psi[i]]

    def mapped(self, role: str, rid: int) -> int:
        return rid + self.gaps[role]

    def symbol(self, i: int) -> int:
        """Mapped symbol the suffix at position ``i`` starts with."""
        return self.D.rank1(i)

    def csa_range(self, c: int) -> Tuple[int, int]:
        """Suffix-array range of the cyclic suffixes starting with mapped symbol ``c``."""
        total = self.D.ones
        if c < 1 or c > total:
            return _EMPTY
        end = self.D.select1(c + 1) - 1 if c < total else 3 * self.n
        return self.D.select1(c), end

    def limit_v(self, role: str) -> int:
        """Last suffix-array position of the region holding ``role``."""
        return (self.order.index(role) + 1) * self.n

    def csa_down(self, rng: Tuple[int, int], d: int) -> Tuple[int, int]:
        """Subrange of ``rng`` whose next symbol is ``d``."""
        return self._narrow(rng, self.csa_range(d), self.psi)

    def csa_down2(self, rng: Tuple[int, int], d: int) -> Tuple[int, int]:
        """Subrange of a two-symbol range whose third symbol is ``d``."""
        return self._narrow(rng, self.csa_range(d), self.psi2)

    @staticmethod
    def _narrow(rng, target, key) -> Tuple[int, int]:
        l, r = rng
        tl, tr = target
        if l > r or tl > tr:
            return _EMPTY
        positions = range(l, r + 1)
        lo = l + bisect_left(positions, tl, key=key)
        hi = l + bisect_right(positions, tr, key=key) - 1
        return (lo, hi) if lo <= hi else _EMPTY

    def find_target_psi(self, l: int, r: int, tl: int, tr: int) -> int:
        """Smallest position in [l, r] whose Psi lies in [tl, tr], or 0."""
        if l > r or tl > tr:
            return 0
        k = l + bisect_left(range(l, r + 1), tl, key=self.psi)
        return k if k <= r and self.psi(k) <= tr else 0

    def find_target_psi2(self, l: int, r: int, tl: int, tr: int) -> int:
        """Smallest position in [l, r] whose Psi(Psi) lies in [tl, tr], or 0.

        Psi(Psi) is increasing inside each run of positions sharing the second
        symbol, so runs are visited in order and searched one by one.
        """
        if l > r or tl > tr:
            return 0
        if r - l + 1 <= _SCAN_LIMIT:
            for k in range(l, r + 1):
                if tl <= self.psi2(k) <= tr:
                    return k
            return 0
        positions = range(l, r + 1)
        p = l
        while p <= r:
            _, run_end = self.csa_range(self.symbol(self.psi(p)))
            q = l + bisect_right(positions, run_end, key=self.psi) - 1
            k = p + bisect_left(range(p, q + 1), tl, key=self.psi2)
            if k <= q and self.psi2(k) <= tr:
                return k
            p = q + 1
        return 0

    def decode(self) -> np.ndarray:
        """Role-id triples in s, p, o column order."""
        out = np.zeros((self.n, 3), dtype=np.int64)
        for i in range(1, self.n + 1):
            j = self.psi(i)
            for role, pos in zip(self.order, (i, j, self.psi(j))):
                out[i - 1, role_column(role)] = self.symbol(pos) - self.gaps[role]
        return out

    @property
    def nbytes(self) -> int:
        return self.D.nbytes + self._psi.nbytes

    def sections(self, prefix: str) -> Dict[str, bytes]:
        meta = struct.pack(
            "<Q3s3Q", self.n, "".join(self.order).encode(), *(self.sizes[r] for r in ROLES)
        )
        return {
            f"{prefix}meta": meta,
            f"{prefix}D": self.D.to_bytes(),
            f"{prefix}psi": self._psi.to_bytes(),
        }

    @classmethod
    def from_sections(cls, sections: Dict[str, bytes], prefix: str) -> "Rdfcsa":
        obj = cls.__new__(cls)
        reader = _reader(sections, f"{prefix}meta")
        n, order, *sizes = reader.unpack("<Q3s3Q")
        reader.expect_end()
        obj.n = n
        obj.order = tuple(order.decode())  # type: ignore[assignment]
        if obj.order not in (SPO, OPS):
            raise IndexLoadError(f"unknown order {order!r}", f"{prefix}meta")
        obj.sizes = dict(zip(ROLES, sizes))
        obj.gaps = cls._gaps(obj.order, obj.sizes)
        reader = _reader(sections, f"{prefix}D")
        obj.D = read_bitvector(reader)
        reader.expect_end()
        reader = _reader(sections, f"{prefix}psi")
        obj._psi = read_psi(reader)
        reader.expect_end()
        if len(obj.D) != 3 * n or len(obj._psi) != 3 * n:
            raise IndexLoadError("D or psi length does not match 3n", f"{prefix}D")
        return obj


def _reader(sections: Dict[str, bytes], name: str) -> ByteReader:
    if name not in sections:
        raise IndexLoadError("missing section", name)
    return ByteReader(sections[name], section=name)


# ----- cursor and index -----


class RdfcsaCursor(TrieCursor):
    """Bound roles (as role ids) plus the matching ranges in each structure."""

    def __init__(self, index: "RdfcsaIndex", pattern: TriplePattern):
        super().__init__(pattern)
        self.index = index
        self.bound: Dict[str, int] = {}
        self.ranges: Dict[str, Tuple[int, int]] = {}
        self._trail: List[Tuple[Dict[str, Tuple[int, int]], str]] = []
        for role, value in pattern.constants().items():
            self._down_role(role, value)
        self._trail.clear()

    @property
    def empty(self) -> bool:
        rng = self.ranges.get("spo")
        return rng is not None and rng[0] > rng[1]

    def size(self) -> int:
        if not self.bound:
            return self.index.n
        l, r = self.ranges["spo"]
        return max(r - l + 1, 0)

    def _down_role(self, role: str, c: int) -> None:
        self._trail.append((self.ranges, role))
        was_empty = self.empty
        rid = self.index.alphabets.role_id(role, c)
        self.bound[role] = rid
        if was_empty or not rid:
            self.ranges = {"spo": _EMPTY}
            return
        self.ranges = self.index.resolve(self.bound)

    def _up_role(self) -> None:
        self.ranges, role = self._trail.pop()
        del self.bound[role]

    def _leap_role(self, role: str, c: int) -> Optional[int]:
        if self.empty:
            return None
        index = self.index
        if not self.bound:
            return index.alphabets.next_global(role, c)
        if len(self.bound) == 2:
            csa, rng, find, step = index.spo, self.ranges["spo"], "psi2", 2
        else:
            (x,) = self.bound
            key = "spo" if role == NEXT_ROLE[x] else "ops"
            csa, rng, find, step = index.csa(key), self.ranges[key], "psi", 1
        return index.leap_in(csa, rng, role, c, find, step)


class RdfcsaIndex(TripleIndex):
    """``rdfcsa-*`` variants: a pair of cyclic suffix arrays (spo and ops)."""

    def __init__(
        self, alphabets: RoleAlphabets, spo: Rdfcsa, ops: Rdfcsa, variant: str, U: int
    ):
        self.alphabets = alphabets
        self.spo, self.ops = spo, ops
        self.variant = variant
        self.n, self.U = spo.n, U

    @classmethod
    def build(
        cls, triples: np.ndarray, U: int, variant: str, sample_rate: int = 16
    ) -> "RdfcsaIndex":
        triples = canonical_triples(triples)
        alphabets = RoleAlphabets.from_triples(triples)
        role_triples = alphabets.encode(triples)
        sizes = {r: alphabets.size(r) for r in ROLES}
        compressed = variant.endswith("small")
        spo = Rdfcsa(role_triples, sizes, SPO, compressed, sample_rate)
        ops = Rdfcsa(role_triples, sizes, OPS, compressed, sample_rate)
        return cls(alphabets, spo, ops, variant, U)

    def csa(self, key: str) -> Rdfcsa:
        return self.spo if key == "spo" else self.ops

    def cursor(self, pattern: TriplePattern) -> RdfcsaCursor:
        return RdfcsaCursor(self, pattern)

    def resolve(self, bound: Dict[str, int]) -> Dict[str, Tuple[int, int]]:
        """Ranges matching the bound role ids (all nonzero)."""
        if len(bound) == 1:
            ((role, rid),) = bound.items()
            return {
                key: csa.csa_range(csa.mapped(role, rid))
                for key, csa in (("spo", self.spo), ("ops", self.ops))
            }
        spo = self.spo
        if len(bound) == 2:
            a = next(r for r in bound if NEXT_ROLE[r] in bound)
            b = NEXT_ROLE[a]
            rng = spo.csa_range(spo.mapped(a, bound[a]))
            return {"spo": spo.csa_down(rng, spo.mapped(b, bound[b]))}
        rng = spo.csa_range(spo.mapped("s", bound["s"]))
        rng = spo.csa_down(rng, spo.mapped("p", bound["p"]))
        return {"spo": spo.csa_down2(rng, spo.mapped("o", bound["o"]))}

    def leap_in(
        self,
        csa: Rdfcsa,
        rng: Tuple[int, int],
        role: str,
        c: int,
        find: str,
        step: int,
    ) -> Optional[int]:
        """Smallest global id ``>= c`` of ``role`` reachable from ``rng`` in ``step`` Psi moves."""
        alphabets = self.alphabets
        finder = csa.find_target_psi if find == "psi" else csa.find_target_psi2
        last_role_id = alphabets.size(role)
        best: Optional[int] = None
        for block, first in alphabets.blocks(role):
            k = int(np.searchsorted(block, c))
            if k == block.shape[0]:
                continue
            last = first + block.shape[0] - 1
            tl = csa.csa_range(csa.mapped(role, first + k))[0]
            if last == last_role_id:
                tr = csa.limit_v(role)
            else:
                tr = csa.csa_range(csa.mapped(role, last + 1))[0] - 1
            pos = finder(rng[0], rng[1], tl, tr)
            if not pos:
                continue
            target = csa.psi(pos) if step == 1 else csa.psi2(pos)
            value = alphabets.global_of(role, csa.symbol(target) - csa.gaps[role])
            if best is None or value < best:
                best = value
        return best

    def triples(self) -> np.ndarray:
        role_triples = self.spo.decode()
        out = np.zeros_like(role_triples)
        for i, row in enumerate(role_triples.tolist()):
            for role, rid in zip(ROLES, row):
                out[i, role_column(role)] = self.alphabets.global_of(role, rid)
        return canonical_triples(out)

    def sections(self) -> Dict[str, bytes]:
        out = {"alphabets": self.alphabets.to_bytes()}
        out.update(self.spo.sections("spo."))
        out.update(self.ops.sections("ops."))
        return out

    @classmethod
    def from_sections(cls, variant: str, n: int, U: int, sections: Dict[str, bytes]):
        reader = _reader(sections, "alphabets")
        alphabets = RoleAlphabets.from_reader(reader)
        reader.expect_end()
        spo = Rdfcsa.from_sections(sections, "spo.")
        ops = Rdfcsa.from_sections(sections, "ops.")
        if spo.n != n or ops.n != n:
            raise IndexLoadError(f"suffix arrays hold {spo.n}/{ops.n} triples, header says {n}", "spo.meta")
        return cls(alphabets, spo, ops, variant, U)
