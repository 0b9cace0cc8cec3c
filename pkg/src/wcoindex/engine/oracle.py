"""
Brute-force BGP evaluation used as ground truth in tests.
"""

from typing import Dict, FrozenSet, Iterable, Iterator, List, Set, Tuple

import numpy as np

from ..types import BGP, ROLES, TriplePattern, Variable

Triple = Tuple[int, int, int]
Solution = Tuple[Tuple[str, int], ...]


def canonical(mapping: Dict[str, int]) -> Solution:
    """Hashable, order-independent form of a mapping."""
    return tuple(sorted(mapping.items()))


class OracleGraph:
    """Triple set with one posting list per (role, value)."""

    def __init__(self, triples: Iterable[Triple]):
        self.triples: FrozenSet[Triple] = frozenset(
            (int(s), int(p), int(o)) for s, p, o in np.asarray(list(triples)).reshape(-1, 3)
        )
        self.postings: Dict[Tuple[int, int], List[Triple]] = {}
        for triple in sorted(self.triples):
            for column in range(3):
                self.postings.setdefault((column, triple[column]), []).append(triple)

    def __len__(self) -> int:
        return len(self.triples)

    def matches(self, pattern: TriplePattern, mapping: Dict[str, int]) -> Iterator[Dict[str, int]]:
        """Extensions of ``mapping`` under which ``pattern`` is a triple of the graph."""
        fixed: List[Tuple[int, int]] = []
        free: List[Tuple[int, str]] = []
        for column, role in enumerate(ROLES):
            term = pattern.term(role)
            if isinstance(term, Variable):
                if term.name in mapping:
                    fixed.append((column, mapping[term.name]))
                else:
                    free.append((column, term.name))
            else:
                fixed.append((column, term))

        if fixed:
            pool = min(
                (self.postings.get(key, []) for key in fixed), key=len
            )
        else:
            pool = sorted(self.triples)
        for triple in pool:
            if any(triple[column] != value for column, value in fixed):
                continue
            extension = dict(mapping)
            for column, name in free:
                if extension.setdefault(name, triple[column]) != triple[column]:
                    break
            else:
                yield extension


def oracle_eval(graph: "OracleGraph | Iterable[Triple]", bgp: BGP) -> Set[Solution]:
    """All solutions of ``bgp``; the empty BGP has exactly the empty solution."""
    if not isinstance(graph, OracleGraph):
        graph = OracleGraph(graph)
    out: Set[Solution] = set()

    def extend(k: int, mapping: Dict[str, int]) -> None:
        if k == len(bgp.patterns):
            out.add(canonical(mapping))
            return
        for extension in graph.matches(bgp.patterns[k], mapping):
            extend(k + 1, extension)

    extend(0, {})
    return out
