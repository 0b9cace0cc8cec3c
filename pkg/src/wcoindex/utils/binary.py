"""Little-endian, length-prefixed binary helpers used by every serializable structure."""

import struct
from typing import Optional, Tuple, Union

import numpy as np

from ..errors import IndexLoadError


def pack_blob(payload: bytes) -> bytes:
    return struct.pack("<Q", len(payload)) + payload


def pack_array(values: np.ndarray, dtype: str) -> bytes:
    """Serialize a 1-D array as ``<count:u64><items>`` with a fixed little-endian dtype."""
    data = np.ascontiguousarray(values, dtype=dtype)
    return struct.pack("<Q", data.shape[0]) + data.tobytes()


class ByteReader:
    """Sequential reader over a serialized payload.

    Every read is bounds-checked; running off the end raises `IndexLoadError`
    so truncated containers never crash the loader.
    """

    def __init__(self, data: Union[bytes, memoryview], section: Optional[str] = None):
        self._data = memoryview(data)
        self._pos = 0
        self.section = section

    @property
    def remaining(self) -> int:
        return len(self._data) - self._pos

    def take(self, size: int) -> bytes:
        if size < 0 or self._pos + size > len(self._data):
            raise IndexLoadError("payload truncated", section=self.section)
        chunk = self._data[self._pos : self._pos + size].tobytes()
        self._pos += size
        return chunk

    def unpack(self, fmt: str) -> Tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def read_blob(self) -> bytes:
        (size,) = self.unpack("<Q")
        return self.take(size)

    def read_array(self, dtype: str) -> np.ndarray:
        (count,) = self.unpack("<Q")
        itemsize = np.dtype(dtype).itemsize
        return np.frombuffer(self.take(count * itemsize), dtype=dtype).copy()

    def expect_end(self) -> None:
        if self.remaining:
            raise IndexLoadError(
                f"{self.remaining} trailing bytes after payload", section=self.section
            )
