#!/usr/bin/env python3
"""
Test script for the ring structure: columns, cumulative arrays and LF steps
"""

import itertools
import os
import sys
import time

import numpy as np

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "../../../src"))

from wcoindex.indices.base import LeapCounter, QueryTimeout
from wcoindex.indices.ring import CumulativeArray, Ring, RingIndex, URingIndex
from wcoindex.types import ROLES, TriplePattern, Variable
from wcoindex.utils.misc import Deadline

TINY = np.array([[1, 1, 2], [1, 2, 3], [2, 1, 2]])
BUILDS = int(os.getenv("WCO_ORACLE_CASES", "20"))


def _column(ring: Ring, role: str):
    wm = ring.columns[role]
    return [wm.access(i) for i in range(1, ring.n + 1)]


def test_tiny_columns():
    """The three stored columns of the tiny graph"""
    print("=== Testing tiny graph columns ===")
    ring = Ring(TINY, 3)
    assert _column(ring, "o") == [2, 3, 2]
    assert _column(ring, "p") == [1, 1, 2]
    assert _column(ring, "s") == [1, 2, 1]
    assert [ring.lf_step("o", i) for i in (1, 2, 3)] == [1, 3, 2]
    assert ring.decode().tolist() == TINY.tolist()
    print("✅ Tiny graph columns test passed")


def test_cumulative_array():
    """A[c] counts smaller symbols; blocks and successors follow"""
    print("=== Testing cumulative array ===")
    acc = CumulativeArray(np.array([2, 0, 3, 1]))
    assert [acc[c] for c in range(1, 6)] == [0, 2, 2, 5, 6]
    assert acc.block(1) == (1, 2)
    assert acc.block(2) == (3, 2)  # empty
    assert acc.block(3) == (3, 5)
    assert acc.block(0) == (1, 0)
    assert [acc.symbol_of(i) for i in range(1, 7)] == [1, 1, 3, 3, 3, 4]
    assert acc.next_symbol(1) == 1
    assert acc.next_symbol(2) == 3
    assert acc.next_symbol(4) == 4
    assert acc.next_symbol(5) is None
    print("✅ Cumulative array test passed")


def test_backward_step_tiny():
    """Prepending a constant narrows to the right rows"""
    print("=== Testing backward step ===")
    ring = Ring(TINY, 3)
    # table o (rows sorted by s, p, o): rows with s = 1 are [1, 2]
    s, e = ring.cumulative["s"].block(1)
    assert (s, e) == (1, 2)
    # prepend o = 2 to the s = 1 block of table o: triples (1, *, 2) seen from table p
    lo, hi = ring.backward_step("o", 1, 2, 2)
    assert hi - lo + 1 == 1
    assert ring.backward_step("o", 1, 2, 1) == (1, 0)
    print("✅ Backward step test passed")


def test_random_rings():
    """LF steps cycle back to the start row and the columns decode the graph"""
    print("=== Testing random rings ===")
    rng = np.random.default_rng(2024)
    for case in range(BUILDS):
        U = int(rng.integers(1, 40))
        n = int(rng.integers(1, 300))
        triples = np.unique(rng.integers(1, U + 1, size=(n, 3)), axis=0)
        ring = Ring(triples, U, compressed=bool(case % 2), with_children=bool(case % 3 == 0))
        for i in range(1, ring.n + 1):
            j = ring.lf_step("o", i)
            k = ring.lf_step("p", j)
            assert ring.lf_step("s", k) == i
            assert ring.lf_step_inv("o", j) == i
        assert ring.decode().tolist() == triples.tolist()
    print("✅ Random ring test passed")


def test_index_sections_roundtrip():
    """A ring index rebuilt from its sections is byte-identical"""
    print("=== Testing ring sections ===")
    rng = np.random.default_rng(8)
    triples = np.unique(rng.integers(1, 20, size=(150, 3)), axis=0)
    for variant in ("ring-large", "ring-small", "vring-large", "vring-small"):
        index = RingIndex.build(triples, 19, variant)
        back = RingIndex.from_sections(variant, index.n, index.U, index.sections())
        assert back.sections() == index.sections()
        assert back.supports_children == variant.startswith("vring")
        assert back.triples().tolist() == triples.tolist()
    print("✅ Ring sections test passed")


def test_tiny_cursor():
    """Leaps and descents on the tiny graph"""
    print("=== Testing ring cursor ===")
    index = RingIndex.build(TINY, 3, "vring-large")
    x, y = Variable(name="x"), Variable(name="y")
    cursor = index.cursor(TriplePattern(s=x, p=1, o=y))
    assert cursor.size() == 2
    assert cursor.leap("x", 1) == 1
    assert cursor.leap("x", 2) == 2
    assert cursor.leap("x", 3) is None
    assert cursor.leap("y", 1) == 2
    assert cursor.distinct("x") == 2
    assert cursor.distinct("y") == 1
    cursor.down("x", 2)
    assert cursor.size() == 1
    assert cursor.leap("y", 1) == 2
    assert cursor.leap("y", 3) is None
    cursor.up()
    assert cursor.size() == 2
    print("✅ Ring cursor test passed")


def _distinct_scan(triples: np.ndarray, bound: dict, role: str) -> int:
    rows = triples
    for r, value in bound.items():
        rows = rows[rows[:, ROLES.index(r)] == value]
    return len(np.unique(rows[:, ROLES.index(role)]))


def test_distinct_matches_scan():
    """Distinct-children counts equal a distinct scan for every bound-role mask"""
    print("=== Testing distinct counts ===")
    rng = np.random.default_rng(63)
    checked = 0
    for variant in ("vring-large", "vring-small"):
        for _ in range(max(BUILDS // 4, 3)):
            U = int(rng.integers(2, 40))
            triples = np.unique(rng.integers(1, U + 1, size=(int(rng.integers(1, 300)), 3)), axis=0)
            index = RingIndex.build(triples, U, variant)
            for size in range(3):
                for mask in itertools.combinations(ROLES, size):
                    for _ in range(4):
                        anchor = triples[int(rng.integers(0, triples.shape[0]))]
                        if rng.random() < 0.25:
                            anchor = rng.integers(1, U + 1, size=3)
                        bound = {r: int(anchor[ROLES.index(r)]) for r in mask}
                        terms = {r: bound.get(r, Variable(name=f"v{r}")) for r in ROLES}
                        cursor = index.cursor(TriplePattern(**terms))
                        free = [r for r in ROLES if r not in bound]
                        for r in free:
                            assert cursor.distinct(f"v{r}") == _distinct_scan(triples, bound, r)
                            checked += 1

                        # bind one more role through the cursor and count again
                        if len(free) > 1 and (value := cursor.leap(f"v{free[0]}", 1)) is not None:
                            cursor.down(f"v{free[0]}", value)
                            narrowed = {**bound, free[0]: value}
                            for r in free[1:]:
                                got = cursor.distinct(f"v{r}")
                                assert got == _distinct_scan(triples, narrowed, r)
                                checked += 1
                            cursor.up()
    print(f"   {checked} counts compared")
    print("✅ Distinct count test passed")


def test_uring_candidates_poll_deadline():
    """Filtering intersection candidates polls the deadline"""
    print("=== Testing candidate deadline ===")
    U = 300
    ids = np.arange(1, U + 1)
    triples = np.concatenate(
        [
            np.stack([ids, np.ones(U, dtype=np.int64), ids], axis=1),
            np.stack([ids, np.ones(U, dtype=np.int64), ids % 7 + 1], axis=1),
        ]
    )
    triples = np.unique(triples, axis=0)
    index = URingIndex.build(triples, U, "uring-large")
    x, y = Variable(name="x"), Variable(name="y")
    # the repeated variable has no single wavelet range, so it is checked by leaps
    patterns = [TriplePattern(s=x, p=1, o=y), TriplePattern(s=x, p=1, o=x)]
    assert index.cursor(patterns[1]).value_range("x") is None

    counter = LeapCounter()
    values = list(index.candidates([index.cursor(p) for p in patterns], "x", counter))
    assert values == list(range(1, U + 1))
    assert counter.leaps > U

    deadline = Deadline(1e-9)
    time.sleep(0.001)
    try:
        list(index.candidates([index.cursor(p) for p in patterns], "x", LeapCounter(deadline)))
    except QueryTimeout:
        pass
    else:
        raise AssertionError("expected QueryTimeout while filtering candidates")
    print("✅ Candidate deadline test passed")


if __name__ == "__main__":
    print("🚀 Starting ring tests...\n")

    test_tiny_columns()
    print()
    test_cumulative_array()
    print()
    test_backward_step_tiny()
    print()
    test_random_rings()
    print()
    test_index_sections_roundtrip()
    print()
    test_tiny_cursor()
    print()
    test_distinct_matches_scan()
    print()
    test_uring_candidates_poll_deadline()
    print()

    print("🎉 All ring tests completed!")
