from .query import (
    BGP,
    NEXT_ROLE,
    PREV_ROLE,
    ROLES,
    Role,
    Term,
    TriplePattern,
    Variable,
    parse_term,
)
from .stats import (
    CSV_COLUMNS,
    EXHAUSTIVE_COLUMNS,
    BenchRecord,
    EvalStats,
    QueryFileEntry,
    QueryType,
)

__all__ = [
    # Query model
    "BGP",
    "TriplePattern",
    "Variable",
    "Term",
    "Role",
    "ROLES",
    "NEXT_ROLE",
    "PREV_ROLE",
    "parse_term",
    # Statistics and bench rows
    "EvalStats",
    "QueryFileEntry",
    "BenchRecord",
    "QueryType",
    "CSV_COLUMNS",
    "EXHAUSTIVE_COLUMNS",
]
