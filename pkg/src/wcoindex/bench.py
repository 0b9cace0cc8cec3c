"""
Query files, query classification and benchmark runs.

A query file has one query per line, ``<id><TAB><bgp>``; lines that are blank
or start with ``#`` are skipped. A line without a tab is a query whose id is its
line number.
"""

import csv
from collections import Counter
from typing import Callable, Iterable, List, Optional, TextIO

from loguru import logger
from tqdm import tqdm

from .config import EngineConfig
from .engine.ltj import exhaustive_best_veo, ltj_eval
from .engine.veo import VeoStrategy
from .errors import QueryParseError
from .indices.base import TripleIndex
from .types import (
    BGP,
    CSV_COLUMNS,
    EXHAUSTIVE_COLUMNS,
    BenchRecord,
    QueryFileEntry,
    QueryType,
)


def parse_query_file(
    lines: Iterable[str], resolve: Optional[Callable[[str], int]] = None
) -> List[QueryFileEntry]:
    entries = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        query_id, tab, text = line.partition("\t")
        if not tab:
            query_id, text = str(line_no), line
        try:
            bgp = BGP.parse(text, resolve)
        except QueryParseError as e:
            raise QueryParseError(str(e), line_no) from None
        if not len(bgp):
            raise QueryParseError("query has no triple patterns", line_no)
        entries.append(QueryFileEntry(query_id=query_id.strip(), bgp=bgp, line_no=line_no))
    return entries


def classify_query(bgp: BGP) -> QueryType:
    """I: one pattern. II: exactly one variable joins patterns. III: anything else."""
    if len(bgp) == 1:
        return "I"
    joined = sum(1 for count in bgp.incidence().values() if len(count) > 1)
    return "II" if joined == 1 else "III"


def run_bench(
    index: TripleIndex,
    entries: List[QueryFileEntry],
    base: EngineConfig,
    strategies: List[VeoStrategy],
    exhaustive: bool = False,
    progress: bool = True,
) -> List[BenchRecord]:
    """One record per (query, strategy); queries run sequentially."""
    records = []
    types: Counter = Counter()
    jobs = [(entry, strategy) for entry in entries for strategy in strategies]
    for entry, strategy in tqdm(jobs, desc="queries", disable=not progress):
        query_type = classify_query(entry.bgp)
        config = EngineConfig(
            limit=base.limit, timeout=base.timeout, strategy=strategy, seed=base.seed
        )
        _, stats = ltj_eval(index, entry.bgp, config)
        record = BenchRecord(
            query_id=entry.query_id,
            type=query_type,
            variant=index.variant,
            veo=strategy.mode,
            estimator=strategy.label,
            elapsed_us=stats.elapsed_us,
            results=stats.results,
            timeout=stats.timed_out,
        )
        if exhaustive:
            order, best = exhaustive_best_veo(index, entry.bgp, config, progress=progress)
            record.best_order = ",".join(order)
            record.best_elapsed_us = best
        records.append(record)
        types[query_type] += 1

    per_strategy = max(len(strategies), 1)
    logger.info(
        "query types: "
        + ", ".join(f"{t}={types[t] // per_strategy}" for t in ("I", "II", "III"))
    )
    return records


def write_csv(records: Iterable[BenchRecord], out: TextIO, exhaustive: bool = False) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS + (EXHAUSTIVE_COLUMNS if exhaustive else []))
    for record in records:
        writer.writerow(record.row(exhaustive))
