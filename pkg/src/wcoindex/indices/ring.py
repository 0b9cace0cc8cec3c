"""
Ring index: three wavelet-tree columns plus cumulative arrays.

Rows of the three cyclic tables are sorted by (s, p, o), (o, s, p) and
(p, o, s); the index keeps only their last columns, C_o, C_p and C_s, keyed
here by role. A table is identified by its last column ``j``; its first role
is ``NEXT_ROLE[j]``. Prepending a value of role ``j`` to the bound prefix (a
backward step) moves from table ``j`` to table ``PREV_ROLE[j]``.

Variants:

- ``ring``: the bidirectional ring above.
- ``vring``: adds the M sequences for counting distinct children, for the
  three columns and for the three virtual reverse-order tables.
- ``uring``: two unidirectional rings (spo and ops) whose candidate sets are
  obtained by intersecting wavelet ranges.
"""

import struct
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..errors import IndexLoadError, UnsupportedFeatureError
from ..structures.bitvector import BitVector, read_bitvector
from ..structures.wavelet import (
    RangeSpec,
    WaveletMatrix,
    alphabet_partitions,
    partition_weights,
    range_intersect,
)
from ..types import NEXT_ROLE, PREV_ROLE, ROLES, TriplePattern
from ..utils.binary import ByteReader
from .base import (
    LeapCounter,
    TrieCursor,
    TripleIndex,
    canonical_triples,
    leapfrog,
    resolution_order,
    role_column,
)

_EMPTY = (1, 0)


class CumulativeArray:
    """A[c] = number of entries smaller than c, stored in unary over n + U bits.

    Symbol c contributes its count in 1s followed by a single 0.
    """

    def __init__(self, counts: np.ndarray):
        counts = np.asarray(counts, dtype=np.int64)
        self.U = int(counts.shape[0])
        self.n = int(counts.sum())
        bits = np.ones(self.n + self.U, dtype=bool)
        bits[np.cumsum(counts) + np.arange(self.U)] = False
        self._bv = BitVector(bits)

    @classmethod
    def from_symbols(cls, symbols: np.ndarray, U: int) -> "CumulativeArray":
        return cls(np.bincount(symbols, minlength=U + 1)[1 : U + 1])

    @classmethod
    def from_bitvector(cls, bv: BitVector) -> "CumulativeArray":
        obj = cls.__new__(cls)
        obj._bv = bv
        obj.U = bv.zeros
        obj.n = bv.ones
        return obj

    def __getitem__(self, c: int) -> int:
        if c <= 1:
            return 0
        if c > self.U:
            return self.n
        return self._bv.select0(c - 1) - (c - 1)

    def block(self, c: int) -> Tuple[int, int]:
        """Rows of the table starting with ``c``."""
        if c < 1 or c > self.U:
            return _EMPTY
        return self[c] + 1, self[c + 1]

    def symbol_of(self, i: int) -> int:
        """Symbol whose block contains row ``i``."""
        return self._bv.rank0(self._bv.select1(i)) + 1

    def next_symbol(self, c: int) -> Optional[int]:
        """Smallest symbol ``>= c`` with a nonempty block."""
        c = max(c, 1)
        if c > self.U:
            return None
        p = self._bv.selectnext(1, self[c] + c)
        if p is None:
            return None
        return self._bv.rank0(p) + 1

    @property
    def bitvector(self) -> BitVector:
        return self._bv


def _previous_occurrence(seq: np.ndarray) -> np.ndarray:
    """M[i] + 1 where M[i] is the last i' < i with seq[i'] == seq[i] (0 if none), 1-based."""
    n = seq.shape[0]
    out = np.ones(n, dtype=np.int64)
    if n < 2:
        return out
    order = np.argsort(seq, kind="stable")
    same = seq[order[1:]] == seq[order[:-1]]
    out[order[1:][same]] = order[:-1][same] + 2
    return out


class Ring:
    """The ring over a canonical (n, 3) triple array with ids in [1, U]."""

    def __init__(
        self,
        triples: np.ndarray,
        U: int,
        compressed: bool = False,
        with_children: bool = False,
    ):
        triples = canonical_triples(triples)
        self.n = int(triples.shape[0])
        self.U = U
        self.compressed = compressed
        sigma = max(U, 1)
        cols = {r: triples[:, role_column(r)] for r in ROLES}

        self.columns: Dict[str, WaveletMatrix] = {}
        self.cumulative: Dict[str, CumulativeArray] = {}
        self.children: Optional[Dict[str, WaveletMatrix]] = None
        self.reverse_children: Optional[Dict[str, WaveletMatrix]] = None
        m_columns: Dict[str, np.ndarray] = {}
        for j in ROLES:
            first, second = NEXT_ROLE[j], NEXT_ROLE[NEXT_ROLE[j]]
            order = np.lexsort((cols[j], cols[second], cols[first]))
            column = cols[j][order]
            self.columns[j] = WaveletMatrix(column, sigma, compressed=compressed)
            self.cumulative[j] = CumulativeArray.from_symbols(cols[j], sigma)
            m_columns[j] = column
        logger.debug(f"ring columns built: n={self.n} U={U} compressed={compressed}")

        if with_children:
            m_sigma = max(self.n, 1)
            self.children = {
                j: WaveletMatrix(_previous_occurrence(m_columns[j]), m_sigma, compressed)
                for j in ROLES
            }
            # virtual tables sorted by (x, prev(x), next(x)), last column next(x)
            self.reverse_children = {}
            for x in ROLES:
                z, y = PREV_ROLE[x], NEXT_ROLE[x]
                order = np.lexsort((cols[y], cols[z], cols[x]))
                self.reverse_children[x] = WaveletMatrix(
                    _previous_occurrence(cols[y][order]), m_sigma, compressed
                )
            logger.debug("ring distinct-children sequences built")

    @property
    def has_children(self) -> bool:
        return self.children is not None

    # ----- navigation -----

    def lf_step(self, j: str, i: int) -> int:
        column = self.columns[j]
        c = column.access(i)
        return self.cumulative[j][c] + column.rank(c, i)

    def lf_step_inv(self, j: str, i: int) -> int:
        cumulative = self.cumulative[j]
        c = cumulative.symbol_of(i)
        return self.columns[j].select(c, i - cumulative[c])

    def backward_step(self, j: str, s: int, e: int, c: int) -> Tuple[int, int]:
        """Rows of table ``PREV_ROLE[j]`` whose prefix is ``c`` followed by the old prefix."""
        if s > e or c < 1 or c > self.U:
            return _EMPTY
        before, upto = self.columns[j].rank_pair(c, s - 1, e)
        base = self.cumulative[j][c]
        return base + before + 1, base + upto

    def decode(self) -> np.ndarray:
        """All triples, in spo order, recovered through the columns."""
        out = np.zeros((self.n, 3), dtype=np.int64)
        for i in range(1, self.n + 1):
            out[i - 1, 0] = self.cumulative["s"].symbol_of(i)
            out[i - 1, 2] = self.columns["o"].access(i)
            out[i - 1, 1] = self.columns["p"].access(self.lf_step("o", i))
        return out

    @property
    def nbytes(self) -> int:
        total = sum(wm.nbytes for wm in self.columns.values())
        total += sum(a.bitvector.nbytes for a in self.cumulative.values())
        for extra in (self.children, self.reverse_children):
            if extra:
                total += sum(wm.nbytes for wm in extra.values())
        return total

    # ----- persistence -----

    def sections(self, prefix: str = "") -> Dict[str, bytes]:
        out: Dict[str, bytes] = {
            f"{prefix}meta": struct.pack("<QQ??", self.n, self.U, self.compressed, self.has_children)
        }
        for j in ROLES:
            out[f"{prefix}C_{j}"] = self.columns[j].to_bytes()
            out[f"{prefix}A_{j}"] = self.cumulative[j].bitvector.to_bytes()
        if self.children and self.reverse_children:
            for j in ROLES:
                out[f"{prefix}M_{j}"] = self.children[j].to_bytes()
                out[f"{prefix}Mrev_{j}"] = self.reverse_children[j].to_bytes()
        return out

    @classmethod
    def from_sections(cls, sections: Dict[str, bytes], prefix: str = "") -> "Ring":
        obj = cls.__new__(cls)
        reader = _reader(sections, f"{prefix}meta")
        obj.n, obj.U, obj.compressed, has_children = reader.unpack("<QQ??")
        reader.expect_end()
        obj.columns, obj.cumulative = {}, {}
        obj.children = obj.reverse_children = None
        for j in ROLES:
            obj.columns[j] = _read_wavelet(sections, f"{prefix}C_{j}")
            reader = _reader(sections, f"{prefix}A_{j}")
            bv = read_bitvector(reader)
            reader.expect_end()
            if not isinstance(bv, BitVector) or bv.ones != obj.n:
                raise IndexLoadError("cumulative array does not match n", f"{prefix}A_{j}")
            obj.cumulative[j] = CumulativeArray.from_bitvector(bv)
        if has_children:
            obj.children = {j: _read_wavelet(sections, f"{prefix}M_{j}") for j in ROLES}
            obj.reverse_children = {
                j: _read_wavelet(sections, f"{prefix}Mrev_{j}") for j in ROLES
            }
        return obj


def _reader(sections: Dict[str, bytes], name: str) -> ByteReader:
    if name not in sections:
        raise IndexLoadError("missing section", name)
    return ByteReader(sections[name], section=name)


def _read_wavelet(sections: Dict[str, bytes], name: str) -> WaveletMatrix:
    reader = _reader(sections, name)
    wm = WaveletMatrix.from_reader(reader)
    reader.expect_end()
    return wm


class RingCursor(TrieCursor):
    """Cursor over one ring: a row range in one table plus the bound roles."""

    def __init__(self, ring: Ring, pattern: TriplePattern):
        super().__init__(pattern)
        self.ring = ring
        self.column: Optional[str] = None
        self.lo, self.hi = 1, ring.n
        self.bound: Dict[str, int] = {}
        self._trail: List[Tuple[Optional[str], int, int, str]] = []
        for role, value in resolution_order(pattern.constants()):
            self._down_role(role, value)
        self._trail.clear()

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def size(self) -> int:
        return max(self.hi - self.lo + 1, 0)

    def left_adjacent(self, role: str) -> bool:
        """Whether binding ``role`` next is a backward step (or nothing is bound)."""
        return not self.bound or role == self.column

    def _down_role(self, role: str, c: int) -> None:
        ring = self.ring
        self._trail.append((self.column, self.lo, self.hi, role))
        if not self.empty:
            if not self.bound:
                self.lo, self.hi = ring.cumulative[role].block(c)
                self.column = PREV_ROLE[role]
            elif role == self.column:
                self.lo, self.hi = ring.backward_step(role, self.lo, self.hi, c)
                self.column = PREV_ROLE[role]
            else:
                # one bound role x with role == NEXT_ROLE[x]
                ((x, value),) = self.bound.items()
                s, e = ring.cumulative[role].block(c)
                self.lo, self.hi = ring.backward_step(x, s, e, value)
                self.column = PREV_ROLE[x]
        self.bound[role] = c

    def _up_role(self) -> None:
        self.column, self.lo, self.hi, role = self._trail.pop()
        del self.bound[role]

    def _leap_role(self, role: str, c: int) -> Optional[int]:
        ring = self.ring
        c = max(c, 1)
        if self.empty or c > ring.U:
            return None
        if not self.bound:
            return ring.cumulative[role].next_symbol(c)
        if role == self.column:
            return ring.columns[role].range_next_value(self.lo, self.hi, c)
        ((x, value),) = self.bound.items()
        start = ring.cumulative[role][c] + 1
        if start > ring.n:
            return None
        s, e = ring.backward_step(x, start, ring.n, value)
        if s > e:
            return None
        return ring.cumulative[role].symbol_of(ring.lf_step_inv(x, s))

    # ----- estimators -----

    def distinct(self, var: str) -> int:
        ring = self.ring
        if ring.children is None or ring.reverse_children is None:
            raise UnsupportedFeatureError(
                "distinct-children counting needs an index built with a vring variant"
            )
        if self.empty:
            return 0
        role = self.var_roles[var][0]
        if not self.bound:
            return ring.children[role].range_count(1, ring.n, 1, 1)
        if role == self.column:
            return ring.children[role].range_count(self.lo, self.hi, 1, self.lo)
        ((x, _),) = self.bound.items()
        return ring.reverse_children[x].range_count(self.lo, self.hi, 1, self.lo)

    def value_range(self, var: str) -> Optional[RangeSpec]:
        roles = self.var_roles[var]
        if len(roles) != 1:
            return None
        role = roles[0]
        if not self.bound:
            return self.ring.columns[role], 1, self.ring.n
        if role == self.column:
            return self.ring.columns[role], self.lo, self.hi
        return None

    def partition_counts(self, var: str, k: int) -> Optional[List[int]]:
        ring = self.ring
        parts = alphabet_partitions(max(ring.U, 1), k)
        if self.empty:
            return [0] * len(parts)
        role = self.var_roles[var][0]
        if self.left_adjacent(role):
            lo, hi = (self.lo, self.hi) if self.bound else (1, ring.n)
            spec = (ring.columns[role], lo, hi)
            return [counts[0] for _, counts in partition_weights([spec], k)]
        # right of the single bound role x: count x's value inside each partition block
        ((x, value),) = self.bound.items()
        cumulative, column = ring.cumulative[role], ring.columns[x]
        out = []
        for a, b in parts:
            before, upto = column.rank_pair(value, cumulative[a], cumulative[b + 1])
            out.append(upto - before)
        return out


class RingIndex(TripleIndex):
    """``ring-*`` and ``vring-*`` variants."""

    supports_refined = True

    def __init__(self, ring: Ring, variant: str):
        self.ring = ring
        self.variant = variant
        self.n, self.U = ring.n, ring.U
        self.supports_children = ring.has_children

    @classmethod
    def build(cls, triples: np.ndarray, U: int, variant: str) -> "RingIndex":
        family, _, size = variant.partition("-")
        ring = Ring(
            triples, U, compressed=size == "small", with_children=family == "vring"
        )
        return cls(ring, variant)

    def cursor(self, pattern: TriplePattern) -> RingCursor:
        return RingCursor(self.ring, pattern)

    def triples(self) -> np.ndarray:
        return self.ring.decode()

    def sections(self) -> Dict[str, bytes]:
        return self.ring.sections()

    @classmethod
    def from_sections(cls, variant: str, n: int, U: int, sections: Dict[str, bytes]):
        ring = Ring.from_sections(sections)
        if (ring.n, ring.U) != (n, U):
            raise IndexLoadError(f"ring header ({ring.n}, {ring.U}) != ({n}, {U})", "meta")
        if ring.has_children != variant.startswith("vring"):
            raise IndexLoadError("distinct-children sequences do not match variant", "meta")
        return cls(ring, variant)


# ----- unidirectional ring pair -----

OPS_ROLE: Dict[str, str] = {"s": "o", "p": "p", "o": "s"}
"""Role of a spo slot once the triple is relabeled as (o, p, s)."""


def _ops_pattern(pattern: TriplePattern) -> TriplePattern:
    return TriplePattern(s=pattern.o, p=pattern.p, o=pattern.s)


class URingCursor(TrieCursor):
    """A pair of ring cursors over the same pattern, kept in lockstep."""

    def __init__(self, spo: Ring, ops: Ring, pattern: TriplePattern):
        super().__init__(pattern)
        self.spo = RingCursor(spo, pattern)
        self.ops = RingCursor(ops, _ops_pattern(pattern))

    @property
    def empty(self) -> bool:
        return self.spo.empty

    def size(self) -> int:
        return self.spo.size()

    def _side(self, role: str) -> Tuple[RingCursor, str]:
        """The ring in which ``role`` is left-adjacent to the bound prefix."""
        if self.spo.left_adjacent(role):
            return self.spo, role
        return self.ops, OPS_ROLE[role]

    def _down_role(self, role: str, c: int) -> None:
        self.spo._down_role(role, c)
        self.ops._down_role(OPS_ROLE[role], c)

    def _up_role(self) -> None:
        self.spo._up_role()
        self.ops._up_role()

    def _leap_role(self, role: str, c: int) -> Optional[int]:
        cursor, mapped = self._side(role)
        return cursor._leap_role(mapped, c)

    def value_range(self, var: str) -> Optional[RangeSpec]:
        roles = self.var_roles[var]
        if len(roles) != 1:
            return None
        cursor, mapped = self._side(roles[0])
        if not cursor.bound:
            return cursor.ring.columns[mapped], 1, cursor.ring.n
        return cursor.ring.columns[mapped], cursor.lo, cursor.hi

    def partition_counts(self, var: str, k: int) -> Optional[List[int]]:
        cursor, mapped = self._side(self.var_roles[var][0])
        if self.empty:
            return [0] * len(alphabet_partitions(max(cursor.ring.U, 1), k))
        lo, hi = (1, cursor.ring.n) if not cursor.bound else (cursor.lo, cursor.hi)
        spec = (cursor.ring.columns[mapped], lo, hi)
        return [counts[0] for _, counts in partition_weights([spec], k)]


class URingIndex(TripleIndex):
    """``uring-*`` variants: candidates come from multi-range wavelet intersection."""

    supports_refined = True

    def __init__(self, spo: Ring, ops: Ring, variant: str):
        self.spo, self.ops = spo, ops
        self.variant = variant
        self.n, self.U = spo.n, spo.U

    @classmethod
    def build(cls, triples: np.ndarray, U: int, variant: str) -> "URingIndex":
        compressed = variant.endswith("small")
        triples = canonical_triples(triples)
        spo = Ring(triples, U, compressed=compressed)
        ops = Ring(triples[:, ::-1], U, compressed=compressed)
        return cls(spo, ops, variant)

    def cursor(self, pattern: TriplePattern) -> URingCursor:
        return URingCursor(self.spo, self.ops, pattern)

    def candidates(
        self, cursors: Sequence[TrieCursor], var: str, counter: LeapCounter
    ) -> Iterable[int]:
        ranges: List[RangeSpec] = []
        filters: List[TrieCursor] = []
        for cursor in cursors:
            spec = cursor.value_range(var)
            if spec is None:
                filters.append(cursor)
            else:
                ranges.append(spec)
        if not ranges:
            return leapfrog(cursors, var, counter)
        counter.tick()
        values = range_intersect(ranges)
        if not filters:
            return values
        kept = []
        for c in values:
            counter.tick()
            if all(f.leap(var, c) == c for f in filters):
                kept.append(c)
        return kept

    def triples(self) -> np.ndarray:
        return self.spo.decode()

    def sections(self) -> Dict[str, bytes]:
        out = self.spo.sections("spo.")
        out.update(self.ops.sections("ops."))
        return out

    @classmethod
    def from_sections(cls, variant: str, n: int, U: int, sections: Dict[str, bytes]):
        spo = Ring.from_sections(sections, "spo.")
        ops = Ring.from_sections(sections, "ops.")
        if (spo.n, spo.U) != (n, U) or (ops.n, ops.U) != (n, U):
            raise IndexLoadError("ring pair does not match header", "spo.meta")
        return cls(spo, ops, variant)
