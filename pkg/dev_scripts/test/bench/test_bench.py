#!/usr/bin/env python3
"""
Test script for query files, query classification and benchmark records
"""

import io
import os
import sys

import numpy as np

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "../../../src"))

from wcoindex.bench import classify_query, parse_query_file, run_bench, write_csv
from wcoindex.config import EngineConfig
from wcoindex.engine.veo import VeoStrategy
from wcoindex.errors import QueryParseError
from wcoindex.indices import build_index
from wcoindex.types import BGP, CSV_COLUMNS


def test_query_file():
    """Ids, comments, blank lines and line numbers"""
    print("=== Testing query file parsing ===")
    lines = [
        "# header",
        "a\t?x 1 ?y",
        "",
        "?x 2 ?y ; ?y 3 ?z",
        "  b \t ?x ?p 7 ",
    ]
    entries = parse_query_file(lines)
    assert [e.query_id for e in entries] == ["a", "4", "b"]
    assert [e.line_no for e in entries] == [2, 4, 5]
    assert len(entries[1].bgp) == 2
    assert str(entries[2].bgp) == "?x ?p 7"

    resolved = parse_query_file(["q\t?x knows bob"], {"knows": 2, "bob": 9}.get)
    assert str(resolved[0].bgp) == "?x 2 9"

    for bad, line_no in ((["ok\t?x 1 ?y", "bad\t?x 1"], 2), (["empty\t ; "], 1), (["?x 1 -3"], 1)):
        try:
            parse_query_file(bad)
        except QueryParseError as e:
            assert e.line_no == line_no
        else:
            raise AssertionError(f"expected QueryParseError for {bad}")
    print("✅ Query file test passed")


def test_classification():
    """One pattern, one join variable, or more"""
    print("=== Testing query classification ===")
    assert classify_query(BGP.parse("?x 1 ?y")) == "I"
    assert classify_query(BGP.parse("?x 1 ?y ; ?x 2 ?z")) == "II"
    assert classify_query(BGP.parse("?x 1 ?y ; ?y 2 ?z ; ?z 3 ?w")) == "III"
    assert classify_query(BGP.parse("?x 1 ?y ; ?y 2 ?x")) == "III"
    assert classify_query(BGP.parse("?x 1 ?y ; ?z 2 ?w")) == "III"
    print("✅ Classification test passed")


def test_run_bench_records():
    """One record per query and strategy, with exhaustive columns when asked"""
    print("=== Testing bench records ===")
    rng = np.random.default_rng(17)
    triples = np.unique(rng.integers(1, 10, size=(120, 3)), axis=0)
    index = build_index(triples, 9, "vring-small")
    entries = parse_query_file(["t1\t?x 1 ?y", "t2\t?x 1 ?y ; ?y 2 ?z ; ?z 3 ?x"])
    strategies = [VeoStrategy.parse("global", "children"), VeoStrategy.parse("adaptive", "refined:1")]
    base = EngineConfig(limit=0, timeout=None, seed=3)

    records = run_bench(index, entries, base, strategies, exhaustive=True, progress=False)
    assert [(r.query_id, r.estimator) for r in records] == [
        ("t1", "children"),
        ("t1", "refined:1"),
        ("t2", "children"),
        ("t2", "refined:1"),
    ]
    assert records[0].results == records[1].results == int(np.count_nonzero(triples[:, 1] == 1))
    assert records[2].results == records[3].results
    assert all(r.variant == "vring-small" and not r.timeout for r in records)
    assert sorted(records[2].best_order.split(",")) == ["x", "y", "z"]

    out = io.StringIO()
    write_csv(records, out)
    lines = out.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) and len(lines) == 5
    assert lines[1].startswith("t1,I,vring-small,global,children,")
    print("✅ Bench record test passed")


if __name__ == "__main__":
    print("🚀 Starting bench tests...\n")

    test_query_file()
    print()
    test_classification()
    print()
    test_run_bench_records()
    print()

    print("🎉 All bench tests completed!")
