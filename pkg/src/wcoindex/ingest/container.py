"""
Versioned on-disk container for a built index and its dictionary.

Layout (little-endian)::

    magic        8 bytes  b"WCOINDEX"
    version      blob     format version string, e.g. "1.0"
    variant      blob     index variant tag
    n, U         u64, u64
    count        u32      number of sections
    table        count x (name blob, offset u64, length u64, crc32 u32)
    payloads     concatenated section payloads, offsets relative to this point

Section names are written in sorted order, so saving a loaded index reproduces
the original bytes.
"""

import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from loguru import logger
from packaging.version import InvalidVersion, Version

from ..errors import IndexLoadError, VariantMismatchError
from ..indices import index_class
from ..indices.base import TripleIndex
from ..utils.binary import ByteReader, pack_blob
from .parser import Dictionary

MAGIC = b"WCOINDEX"
FORMAT_VERSION = "1.0"
DICTIONARY_SECTION = "dictionary"


@dataclass
class SectionEntry:
    name: str
    offset: int
    length: int
    crc: int


@dataclass
class IndexContainer:
    """A loaded container: header fields plus raw section payloads."""

    version: str
    variant: str
    n: int
    U: int
    sections: Dict[str, bytes]

    @property
    def nbytes(self) -> int:
        return len(self.to_bytes())

    @property
    def bpt(self) -> float:
        """Bytes per triple of the whole container."""
        return self.nbytes / self.n if self.n else 0.0

    def describe(self) -> List[Tuple[str, int]]:
        """``(name, bytes)`` per section, largest first."""
        return sorted(
            ((name, len(payload)) for name, payload in self.sections.items()),
            key=lambda item: (-item[1], item[0]),
        )

    def to_bytes(self) -> bytes:
        names = sorted(self.sections)
        table = []
        offset = 0
        for name in names:
            payload = self.sections[name]
            table.append(
                pack_blob(name.encode("utf-8"))
                + struct.pack("<QQI", offset, len(payload), zlib.crc32(payload))
            )
            offset += len(payload)
        header = (
            MAGIC
            + pack_blob(self.version.encode("ascii"))
            + pack_blob(self.variant.encode("ascii"))
            + struct.pack("<QQI", self.n, self.U, len(names))
        )
        return header + b"".join(table) + b"".join(self.sections[k] for k in names)

    @classmethod
    def from_bytes(cls, data: bytes) -> "IndexContainer":
        reader = ByteReader(data, "header")
        if reader.take(len(MAGIC)) != MAGIC:
            raise IndexLoadError("bad magic, not an index container", "header")
        version = _decode(reader.read_blob(), "version")
        _check_version(version)
        variant = _decode(reader.read_blob(), "variant")
        n, U, count = reader.unpack("<QQI")

        reader.section = "table"
        entries = []
        for _ in range(count):
            name = _decode(reader.read_blob(), "section name")
            offset, length, crc = reader.unpack("<QQI")
            entries.append(SectionEntry(name, offset, length, crc))

        base = len(data) - reader.remaining
        sections: Dict[str, bytes] = {}
        for entry in entries:
            start = base + entry.offset
            if start + entry.length > len(data):
                raise IndexLoadError("payload truncated", entry.name)
            payload = data[start : start + entry.length]
            if zlib.crc32(payload) != entry.crc:
                raise IndexLoadError("checksum mismatch", entry.name)
            sections[entry.name] = payload
        return cls(version, variant, int(n), int(U), sections)


def _decode(raw: bytes, what: str) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        raise IndexLoadError(f"undecodable {what}", "header") from None


def _check_version(version: str) -> None:
    try:
        found = Version(version)
    except InvalidVersion:
        raise IndexLoadError(f"invalid format version {version!r}", "header") from None
    if found.major != Version(FORMAT_VERSION).major:
        raise IndexLoadError(
            f"incompatible format version {version} (supported: {FORMAT_VERSION})",
            "header",
        )


def pack_index(index: TripleIndex, dictionary: Dictionary) -> IndexContainer:
    sections = dict(index.sections())
    sections[DICTIONARY_SECTION] = dictionary.to_bytes()
    return IndexContainer(FORMAT_VERSION, index.variant, index.n, index.U, sections)


def save_index(
    index: TripleIndex, dictionary: Dictionary, path: Union[str, Path]
) -> IndexContainer:
    """Write ``index`` and ``dictionary`` to ``path``; returns the container written."""
    container = pack_index(index, dictionary)
    data = container.to_bytes()
    Path(path).write_bytes(data)
    logger.debug(f"wrote {len(data)} bytes to {path}")
    for name, size in container.describe():
        logger.debug(f"  {name:<16} {size:>12}")
    return container


def unpack_index(
    container: IndexContainer, expected_variant: Optional[str] = None
) -> Tuple[TripleIndex, Dictionary]:
    if expected_variant is not None and container.variant != expected_variant:
        raise VariantMismatchError(
            f"container holds {container.variant}, expected {expected_variant}", "header"
        )
    try:
        cls = index_class(container.variant)
    except ValueError:
        raise IndexLoadError(f"unknown variant {container.variant!r}", "header") from None
    sections = dict(container.sections)
    if DICTIONARY_SECTION not in sections:
        raise IndexLoadError("missing", DICTIONARY_SECTION)
    dictionary = Dictionary.from_bytes(sections.pop(DICTIONARY_SECTION))
    try:
        index = cls.from_sections(container.variant, container.n, container.U, sections)
    except IndexLoadError:
        raise
    except (ValueError, IndexError, struct.error) as e:
        raise IndexLoadError(f"malformed index payload: {e}", "index") from None
    return index, dictionary


def load_index(
    path: Union[str, Path], expected_variant: Optional[str] = None
) -> Tuple[TripleIndex, Dictionary]:
    """Read an index container back.

    Raises:
        IndexLoadError: Unreadable, truncated or corrupted container.
        VariantMismatchError: ``expected_variant`` differs from the stored tag.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise IndexLoadError(f"cannot read {path}: {e.strerror}", "header") from None
    container = IndexContainer.from_bytes(data)
    return unpack_index(container, expected_variant)
