#!/usr/bin/env python3
"""
Test script for the wco-index command line: build, query and bench
"""

import io
import os
import re
import sys
import tempfile
from contextlib import redirect_stdout
from pathlib import Path

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "../../../src"))

from wcoindex.cli import main
from wcoindex.types import CSV_COLUMNS, EXHAUSTIVE_COLUMNS

TINY = "1 1 2\n1 2 3\n2 1 2\n"
TERMS = "<alice> <knows> <bob> .\n<bob> <knows> <carol> .\n<alice> <likes> <carol> .\n"


def _run(*argv: str):
    """Run the CLI; returns (exit code, stdout)."""
    out = io.StringIO()
    with redirect_stdout(out):
        try:
            code = main(list(argv))
        except SystemExit as e:
            code = e.code if isinstance(e.code, int) else 1
    return code, out.getvalue()


def _workspace(tmp: str, graph: str = TINY, queries: str = "q1\t?x 1 ?y\nq2\t?x 1 2 ; ?x 2 3\n"):
    root = Path(tmp)
    (root / "graph.txt").write_text(graph)
    (root / "queries.txt").write_text(queries)
    (root / "wco.yaml").write_text("limit: 1000\ntimeout: 30\n")
    return root


def _build(root: Path, variant: str, fmt: str = "ints"):
    return _run(
        "-q",
        "--config", str(root / "wco.yaml"),
        "build",
        "--input", str(root / "graph.txt"),
        "--format", fmt,
        "--variant", variant,
        "--out", str(root / f"{variant}.wco"),
    )


def test_build_reports_size():
    """build prints the triple count, universe, size and bytes per triple"""
    print("=== Testing build ===")
    with tempfile.TemporaryDirectory() as tmp:
        root = _workspace(tmp)
        for variant in ("ring-large", "vring-small", "uring-large", "rdfcsa-small"):
            code, out = _build(root, variant)
            assert code == 0, out
            match = re.fullmatch(r"n=3 U=3 bytes=(\d+) bpt=(\d+\.\d\d)\n", out)
            assert match, out
            assert int(match.group(1)) == (root / f"{variant}.wco").stat().st_size
    print("✅ Build test passed")


def test_query_output():
    """query prints one block per query with bindings and a stats line"""
    print("=== Testing query ===")
    with tempfile.TemporaryDirectory() as tmp:
        root = _workspace(tmp)
        assert _build(root, "vring-large")[0] == 0
        code, out = _run(
            "-q",
            "--config", str(root / "wco.yaml"),
            "query",
            "--index", str(root / "vring-large.wco"),
            "--queries", str(root / "queries.txt"),
            "--veo", "global",
            "--estimator", "children",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "# query q1"
        assert set(lines[1:3]) == {"x=1\ty=2", "x=2\ty=2"}
        assert lines[3].startswith("# stats elapsed_us=") and "results=2" in lines[3]
        assert "timeout=0" in lines[3]
        assert lines[4] == "# query q2"
        assert lines[5] == "x=1"
        assert "results=1" in lines[6]
        assert len(lines) == 7
    print("✅ Query test passed")


def test_query_limit_flag():
    """--limit caps the printed results"""
    print("=== Testing query limit ===")
    with tempfile.TemporaryDirectory() as tmp:
        root = _workspace(tmp, queries="?x ?p ?y\n")
        assert _build(root, "ring-small")[0] == 0
        code, out = _run(
            "-q",
            "--config", str(root / "wco.yaml"),
            "query",
            "--index", str(root / "ring-small.wco"),
            "--queries", str(root / "queries.txt"),
            "--limit", "2",
        )
        assert code == 0
        lines = out.splitlines()
        # no tab: the line number is the id
        assert lines[0] == "# query 1"
        assert len(lines) == 4 and "results=2" in lines[3]
    print("✅ Query limit test passed")


def test_terms_roundtrip():
    """Terms in, terms out"""
    print("=== Testing terms mode ===")
    with tempfile.TemporaryDirectory() as tmp:
        root = _workspace(
            tmp,
            graph=TERMS,
            queries="k\t?x <knows> ?y\nu\t?x <hates> ?y\n",
        )
        code, out = _build(root, "uring-small", fmt="terms")
        assert code == 0 and out.startswith("n=3 U=5 ")
        code, out = _run(
            "-q",
            "--config", str(root / "wco.yaml"),
            "query",
            "--index", str(root / "uring-small.wco"),
            "--queries", str(root / "queries.txt"),
        )
        assert code == 0
        lines = out.splitlines()
        assert set(lines[1:3]) == {"x=<alice>\ty=<bob>", "x=<bob>\ty=<carol>"}
        # unknown terms match nothing
        assert lines[4] == "# query u"
        assert "results=0" in lines[5]
    print("✅ Terms mode test passed")


def test_bench_csv():
    """bench writes one row per query and strategy"""
    print("=== Testing bench ===")
    with tempfile.TemporaryDirectory() as tmp:
        root = _workspace(tmp)
        assert _build(root, "ring-large")[0] == 0
        base = [
            "-q",
            "--config", str(root / "wco.yaml"),
            "bench",
            "--index", str(root / "ring-large.wco"),
            "--queries", str(root / "queries.txt"),
        ]
        code, out = _run(*base, "--veo", "global,adaptive", "--estimator", "range,refined:2")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + 2 * 4
        rows = [line.split(",") for line in lines[1:]]
        assert {r[0] for r in rows} == {"q1", "q2"}
        assert {(r[3], r[4]) for r in rows} == {
            ("global", "range"),
            ("global", "refined:2"),
            ("adaptive", "range"),
            ("adaptive", "refined:2"),
        }
        assert all(r[2] == "ring-large" for r in rows)
        assert {r[1] for r in rows if r[0] == "q1"} == {"I"}
        assert {r[1] for r in rows if r[0] == "q2"} == {"II"}
        assert {r[6] for r in rows if r[0] == "q1"} == {"2"}

        csv_path = root / "out.csv"
        code, out = _run(*base, "--exhaustive-veo", "--csv", str(csv_path))
        assert code == 0 and out == ""
        written = csv_path.read_text().splitlines()
        assert written[0] == ",".join(CSV_COLUMNS + EXHAUSTIVE_COLUMNS)
        assert len(written) == 3
        q1 = next(line for line in written[1:] if line.startswith("q1,"))
        # the order column holds "x,y" and is quoted
        assert '"x,y"' in q1 or '"y,x"' in q1
    print("✅ Bench test passed")


def test_exit_codes():
    """Usage problems exit 1, data problems exit 2"""
    print("=== Testing exit codes ===")
    with tempfile.TemporaryDirectory() as tmp:
        root = _workspace(tmp)
        assert _build(root, "ring-large")[0] == 0
        config = ["-q", "--config", str(root / "wco.yaml")]
        query = ["query", "--index", str(root / "ring-large.wco"), "--queries", str(root / "queries.txt")]

        assert _run("frobnicate")[0] == 1
        assert _run(*config, "build", "--input", "x", "--variant", "btree", "--out", "y")[0] == 1
        assert _run(*config, *query, "--veo", "sideways")[0] == 1
        assert _run(*config, *query, "--estimator", "refined:x")[0] == 1
        # distinct-children counting needs a vring index
        assert _run(*config, *query, "--estimator", "children")[0] == 1
        assert _run("-q", "--config", str(root / "missing.yaml"), *query)[0] == 1

        assert _run(*config, *query)[0] == 0
        (root / "bad.wco").write_bytes(b"garbage")
        assert _run(*config, "query", "--index", str(root / "bad.wco"), "--queries", str(root / "queries.txt"))[0] == 2
        (root / "bad_queries.txt").write_text("q1\t?x 1\n")
        assert _run(*config, "query", "--index", str(root / "ring-large.wco"), "--queries", str(root / "bad_queries.txt"))[0] == 2
        (root / "bad_graph.txt").write_text("1 2 3\n1 two 3\n")
        code, _ = _run(*config, "build", "--input", str(root / "bad_graph.txt"), "--variant", "ring-large", "--out", str(root / "x.wco"))
        assert code == 2
        assert _run(*config, "build", "--input", str(root / "nope.txt"), "--variant", "ring-large", "--out", str(root / "x.wco"))[0] == 2

        assert _run("--version")[0] == 0
    print("✅ Exit code test passed")


if __name__ == "__main__":
    print("🚀 Starting CLI tests...\n")

    test_build_reports_size()
    print()
    test_query_output()
    print()
    test_query_limit_flag()
    print()
    test_terms_roundtrip()
    print()
    test_bench_csv()
    print()
    test_exit_codes()
    print()

    print("🎉 All CLI tests completed!")
