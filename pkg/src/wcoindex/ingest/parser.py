"""
Triple input parsing and id dictionaries.

Two input formats are accepted, one triple per line:

- ``ints``: three positive integer ids.
- ``terms``: three whitespace-separated tokens; ids are assigned by first appearance.

Blank lines and lines starting with ``#`` are skipped. A trailing ``.`` token
(N-Triples style terminator) is tolerated.
"""

import json
from typing import Dict, Iterable, List, Literal, Optional, Tuple

import numpy as np
from loguru import logger

from ..errors import IndexLoadError, IngestError
from ..utils.binary import ByteReader, pack_array

InputFormat = Literal["ints", "terms"]


class Dictionary:
    """Bijective term <-> id map. The ``ints`` format uses the identity on [1, U]."""

    def __init__(self, terms: Optional[List[str]] = None, size: int = 0):
        self._terms = terms
        self._ids: Dict[str, int] = (
            {t: i for i, t in enumerate(terms, start=1)} if terms is not None else {}
        )
        self.size = len(terms) if terms is not None else size

    @classmethod
    def identity(cls, size: int) -> "Dictionary":
        return cls(None, size)

    @property
    def is_identity(self) -> bool:
        return self._terms is None

    def __len__(self) -> int:
        return self.size

    def add(self, term: str) -> int:
        if self._terms is None:
            raise IngestError("cannot add terms to an identity dictionary")
        found = self._ids.get(term)
        if found is None:
            self._terms.append(term)
            found = self._ids[term] = len(self._terms)
            self.size = found
        return found

    def lookup(self, term: str) -> int:
        """Id of ``term``; 0 when it is unknown."""
        if self._terms is None:
            try:
                value = int(term)
            except ValueError:
                return 0
            return value if 1 <= value <= self.size else 0
        return self._ids.get(term, 0)

    def term_of(self, ident: int) -> str:
        if self._terms is None:
            return str(ident)
        return self._terms[ident - 1]

    def to_bytes(self) -> bytes:
        if self._terms is None:
            payload = {"identity": self.size}
        else:
            payload = {"terms": self._terms}
        return json.dumps(payload, ensure_ascii=False).encode("utf-8")

    @classmethod
    def from_bytes(cls, data: bytes) -> "Dictionary":
        try:
            payload = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise IndexLoadError(f"invalid dictionary payload: {e}", "dictionary") from None
        if "terms" in payload:
            return cls(list(payload["terms"]))
        return cls.identity(int(payload.get("identity", 0)))


def _fields(line: str) -> List[str]:
    tokens = line.split()
    if len(tokens) == 4 and tokens[3] == ".":
        tokens = tokens[:3]
    return tokens


def parse_triples(
    lines: Iterable[str], fmt: InputFormat = "ints"
) -> Tuple[np.ndarray, Dictionary]:
    """Parse a triple stream into a deduplicated (n, 3) array and its dictionary."""
    if fmt not in ("ints", "terms"):
        raise IngestError(f"unknown input format {fmt!r}")
    rows: List[Tuple[int, int, int]] = []
    dictionary = Dictionary([]) if fmt == "terms" else None
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = _fields(line)
        if len(tokens) != 3:
            raise IngestError(f"expected 3 fields, got {len(tokens)}", line_no)
        if dictionary is not None:
            rows.append(tuple(dictionary.add(tok) for tok in tokens))  # type: ignore[arg-type]
            continue
        try:
            ids = tuple(int(tok) for tok in tokens)
        except ValueError:
            raise IngestError(f"non-integer id in {line!r}", line_no) from None
        if min(ids) <= 0:
            raise IngestError(f"ids must be positive, got {ids}", line_no)
        rows.append(ids)  # type: ignore[arg-type]

    if not rows:
        raise IngestError("empty graph")
    triples = np.unique(np.asarray(rows, dtype=np.int64), axis=0)
    if len(rows) != triples.shape[0]:
        logger.debug(f"dropped {len(rows) - triples.shape[0]} duplicate triples")
    if dictionary is None:
        dictionary = Dictionary.identity(int(triples.max()))
    return triples, dictionary


class RoleAlphabets:
    """Role-specific id spaces for the suffix-array indices.

    Terms used both as subject and object come first (ids [1, n_so] in both
    roles), followed by subject-only or object-only terms. Within each block ids
    follow the global id order; predicates are numbered in global order.
    """

    def __init__(
        self,
        shared: np.ndarray,
        subject_only: np.ndarray,
        object_only: np.ndarray,
        predicates: np.ndarray,
    ):
        self.shared = shared.astype(np.int64)
        self.subject_only = subject_only.astype(np.int64)
        self.object_only = object_only.astype(np.int64)
        self.predicates = predicates.astype(np.int64)
        self.n_so = int(self.shared.shape[0])
        self.n_s = self.n_so + int(self.subject_only.shape[0])
        self.n_o = self.n_so + int(self.object_only.shape[0])
        self.n_p = int(self.predicates.shape[0])
        self._blocks: Dict[str, List[Tuple[np.ndarray, int]]] = {
            "s": [(self.shared, 1), (self.subject_only, self.n_so + 1)],
            "o": [(self.shared, 1), (self.object_only, self.n_so + 1)],
            "p": [(self.predicates, 1)],
        }
        self._lookup: Dict[str, Dict[int, int]] = {}
        for role, blocks in self._blocks.items():
            lookup = self._lookup[role] = {}
            for block, first in blocks:
                for k, g in enumerate(block.tolist()):
                    lookup[g] = first + k

    @classmethod
    def from_triples(cls, triples: np.ndarray) -> "RoleAlphabets":
        subjects = np.unique(triples[:, 0])
        objects = np.unique(triples[:, 2])
        return cls(
            np.intersect1d(subjects, objects),
            np.setdiff1d(subjects, objects),
            np.setdiff1d(objects, subjects),
            np.unique(triples[:, 1]),
        )

    def size(self, role: str) -> int:
        return {"s": self.n_s, "p": self.n_p, "o": self.n_o}[role]

    def role_id(self, role: str, ident: int) -> int:
        """Role-specific id of a global id, 0 if it never occurs in that role."""
        return self._lookup[role].get(ident, 0)

    def encode(self, triples: np.ndarray) -> np.ndarray:
        """Map an (n, 3) array of global ids to role-specific ids."""
        out = np.zeros_like(triples, dtype=np.int64)
        top = int(triples.max()) if triples.size else 0
        for column, role in enumerate(("s", "p", "o")):
            lut = np.zeros(top + 1, dtype=np.int64)
            for block, first in self.blocks(role):
                lut[block] = np.arange(first, first + block.shape[0])
            out[:, column] = lut[triples[:, column]]
        return out

    def global_of(self, role: str, rid: int) -> int:
        for block, first in self._blocks[role]:
            if rid < first + block.shape[0]:
                return int(block[rid - first])
        raise IndexError(f"role id {rid} outside {role} alphabet")

    def blocks(self, role: str) -> List[Tuple[np.ndarray, int]]:
        """``(sorted global ids, first role id)`` per monotone block of the role."""
        return [(block, first) for block, first in self._blocks[role] if block.shape[0]]

    def next_global(self, role: str, c: int) -> Optional[int]:
        """Smallest global id ``>= c`` occurring in ``role``."""
        best = None
        for block, _ in self.blocks(role):
            k = int(np.searchsorted(block, c))
            if k < block.shape[0] and (best is None or block[k] < best):
                best = int(block[k])
        return best

    def to_bytes(self) -> bytes:
        return b"".join(
            pack_array(arr, "<u8")
            for arr in (self.shared, self.subject_only, self.object_only, self.predicates)
        )

    @classmethod
    def from_reader(cls, reader: ByteReader) -> "RoleAlphabets":
        arrays = [reader.read_array("<u8").astype(np.int64) for _ in range(4)]
        return cls(*arrays)
