"""
stats.py

Evaluation statistics, query-file entries and benchmark rows.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel

from .query import BGP

QueryType = Literal["I", "II", "III"]

CSV_COLUMNS = [
    "query_id",
    "type",
    "variant",
    "veo",
    "estimator",
    "elapsed_us",
    "results",
    "timeout",
]
EXHAUSTIVE_COLUMNS = ["best_order", "best_elapsed_us"]


class EvalStats(BaseModel):
    elapsed_us: int = 0
    results: int = 0
    timed_out: bool = False
    leaps: int = 0
    """Number of leap calls issued by the intersection loop."""
    order: List[str] = []
    """Elimination order of the first complete branch (the fixed order for global strategies)."""

    def line(self) -> str:
        order = ",".join(self.order) if self.order else "-"
        return (
            f"# stats elapsed_us={self.elapsed_us} results={self.results} "
            f"timeout={int(self.timed_out)} leaps={self.leaps} order={order}"
        )


class QueryFileEntry(BaseModel):
    query_id: str
    bgp: BGP
    line_no: int


class BenchRecord(BaseModel):
    query_id: str
    type: QueryType
    variant: str
    veo: str
    estimator: str
    elapsed_us: int
    results: int
    timeout: bool
    best_order: Optional[str] = None
    best_elapsed_us: Optional[int] = None

    def row(self, exhaustive: bool = False) -> List[str]:
        values = [
            self.query_id,
            self.type,
            self.variant,
            self.veo,
            self.estimator,
            str(self.elapsed_us),
            str(self.results),
            str(int(self.timeout)),
        ]
        if exhaustive:
            values.append(self.best_order or "")
            values.append("" if self.best_elapsed_us is None else str(self.best_elapsed_us))
        return values
