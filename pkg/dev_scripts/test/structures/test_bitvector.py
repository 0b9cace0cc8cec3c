#!/usr/bin/env python3
"""
Test script for the rank/select bitvectors (plain and compressed flavors)
"""

import os
import sys

import numpy as np

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "../../../src"))

from wcoindex.errors import OccurrenceNotFound, PositionError
from wcoindex.structures.bitvector import (
    BitVector,
    CompressedBitVector,
    make_bitvector,
    read_bitvector,
)
from wcoindex.utils.binary import ByteReader

LENGTHS = [0, 1, 14, 15, 16, 255, 256, 257, 481, 1000, 4099]
DENSITIES = [0.0, 0.05, 0.5, 0.95, 1.0]


def _instances(seed: int = 7):
    rng = np.random.default_rng(seed)
    for n in LENGTHS:
        for density in DENSITIES:
            yield rng.random(n) < density


def _check_against_scan(bv, bits: np.ndarray) -> None:
    n = bits.shape[0]
    prefix = np.concatenate(([0], np.cumsum(bits)))
    ones = np.flatnonzero(bits) + 1
    zeros = np.flatnonzero(~bits) + 1

    assert len(bv) == n
    assert bv.ones == ones.shape[0]
    assert bv.zeros == zeros.shape[0]
    for i in range(1, n + 1):
        assert bv.access(i) == int(bits[i - 1])
    for i in range(0, n + 1):
        assert bv.rank(1, i) == prefix[i]
        assert bv.rank(0, i) == i - prefix[i]
    for j, pos in enumerate(ones, start=1):
        assert bv.select(1, j) == pos
    for j, pos in enumerate(zeros, start=1):
        assert bv.select(0, j) == pos
    for j in range(1, n + 2):
        k = np.searchsorted(ones, j)
        expected = int(ones[k]) if k < ones.shape[0] else None
        assert bv.selectnext(1, j) == expected
        k = np.searchsorted(zeros, j)
        expected = int(zeros[k]) if k < zeros.shape[0] else None
        assert bv.selectnext(0, j) == expected


def test_plain_against_scan():
    """Plain bitvector answers like a linear scan"""
    print("=== Testing BitVector against naive scans ===")
    for bits in _instances():
        _check_against_scan(BitVector(bits), bits)
    # a small directory period exercises the multi-block select path
    for bits in _instances(seed=11):
        _check_against_scan(BitVector(bits, block_size=64), bits)
    print("✅ BitVector scan test passed")


def test_compressed_against_scan():
    """Compressed bitvector answers like a linear scan"""
    print("=== Testing CompressedBitVector against naive scans ===")
    for bits in _instances(seed=3):
        _check_against_scan(CompressedBitVector(bits), bits)
    print("✅ CompressedBitVector scan test passed")


def test_small_example():
    """Hand-checked example"""
    print("=== Testing small example ===")
    for compressed in (False, True):
        bv = make_bitvector("0110100", compressed=compressed)
        assert bv.access(2) == 1
        assert bv.rank(1, 0) == 0
        assert bv.rank(1, 5) == 3
        assert bv.rank(0, 7) == 4
        assert bv.select(1, 3) == 5
        assert bv.select(0, 1) == 1
        assert bv.selectnext(1, 4) == 5
        assert bv.selectnext(1, 6) is None
    print("✅ Small example test passed")


def test_errors():
    """Out-of-range arguments raise the documented errors"""
    print("=== Testing error reporting ===")
    for compressed in (False, True):
        bv = make_bitvector("1010", compressed=compressed)
        for call in (lambda: bv.access(0), lambda: bv.access(5), lambda: bv.rank(1, 5)):
            try:
                call()
            except PositionError:
                pass
            else:
                raise AssertionError("expected PositionError")
        try:
            bv.select(1, 3)
        except OccurrenceNotFound:
            pass
        else:
            raise AssertionError("expected OccurrenceNotFound")
        assert bv.selectnext(1, 5) is None
    print("✅ Error reporting test passed")


def test_serialization():
    """Both flavors read back from their payload with identical answers"""
    print("=== Testing serialization ===")
    rng = np.random.default_rng(21)
    bits = rng.random(3001) < 0.3
    for compressed in (False, True):
        bv = make_bitvector(bits, compressed=compressed)
        reader = ByteReader(bv.to_bytes(), "test")
        back = read_bitvector(reader)
        reader.expect_end()
        assert type(back) is type(bv)
        assert back.to_bytes() == bv.to_bytes()
        _check_against_scan(back, bits)
    print("✅ Serialization test passed")


def test_compressed_is_smaller_on_sparse_bits():
    """Zero-order compression pays off on skewed bits"""
    print("=== Testing compressed size ===")
    rng = np.random.default_rng(5)
    bits = rng.random(60_000) < 0.02
    assert CompressedBitVector(bits).nbytes < BitVector(bits).nbytes
    print("✅ Compressed size test passed")


if __name__ == "__main__":
    print("🚀 Starting bitvector tests...\n")

    test_small_example()
    print()
    test_plain_against_scan()
    print()
    test_compressed_against_scan()
    print()
    test_errors()
    print()
    test_serialization()
    print()
    test_compressed_is_smaller_on_sparse_bits()
    print()

    print("🎉 All bitvector tests completed!")
