"""
Leapfrog TrieJoin over any `TripleIndex`.

Variables are eliminated one at a time: the cursors of the patterns that
mention the variable are intersected, and for each common value every one of
them descends, the rest of the query is solved, and they come back up.
"""

import random
from typing import Dict, Iterator, List, Optional, Tuple

from loguru import logger
from tqdm import tqdm

from ..config import EngineConfig
from ..indices.base import LeapCounter, QueryTimeout, TripleIndex
from ..types import BGP, EvalStats
from ..utils.misc import Deadline
from .veo import VeoPlanner, adaptive_next

Mapping = Dict[str, int]


def iter_solutions(
    index: TripleIndex,
    bgp: BGP,
    config: EngineConfig,
    stats: Optional[EvalStats] = None,
) -> Iterator[Mapping]:
    """Stream the solutions of ``bgp`` as they are found.

    ``stats`` is filled in place; its final values are known once the iterator
    is exhausted or closed. A timeout ends the stream and sets ``timed_out``.
    """
    stats = stats if stats is not None else EvalStats()
    deadline = Deadline(config.timeout)
    counter = LeapCounter(deadline)
    try:
        yield from _evaluate(index, bgp, config, stats, deadline, counter)
    except QueryTimeout:
        stats.timed_out = True
        logger.warning(f"query timed out after {stats.results} results")
    finally:
        stats.elapsed_us = deadline.elapsed_us()
        stats.leaps = counter.leaps


def _evaluate(
    index: TripleIndex,
    bgp: BGP,
    config: EngineConfig,
    stats: EvalStats,
    deadline: Deadline,
    counter: LeapCounter,
) -> Iterator[Mapping]:
    variables = bgp.variables()
    if not bgp.patterns:
        stats.results = 1
        yield {}
        return

    cursors = [index.cursor(p) for p in bgp.patterns]
    if any(c.empty for c in cursors):
        return

    planner = VeoPlanner(index, bgp, cursors, config.strategy, random.Random(config.seed))
    incidence = planner.incidence
    if config.order is not None:
        fixed: Optional[List[str]] = list(config.order)
    elif config.strategy.is_global:
        fixed = planner.global_order()
    else:
        fixed = None
    if fixed is not None:
        stats.order = fixed

    mapping: Mapping = {}
    path: List[str] = []

    def solve(depth: int) -> Iterator[Mapping]:
        if depth == len(variables):
            if not stats.order:
                stats.order = list(path)
            yield dict(mapping)
            return
        if fixed is not None:
            var = fixed[depth]
        else:
            var = adaptive_next(planner, [v for v in variables if v not in mapping])
        relevant = [cursors[i] for i in incidence[var]]
        path.append(var)
        for value in index.candidates(relevant, var, counter):
            if deadline.expired():
                raise QueryTimeout()
            mapping[var] = value
            for cursor in relevant:
                cursor.down(var, value)
            try:
                yield from solve(depth + 1)
            finally:
                for cursor in relevant:
                    cursor.up()
                del mapping[var]
        path.pop()

    limit = config.limit
    solutions = solve(0)
    try:
        for solution in solutions:
            stats.results += 1
            yield solution
            if limit and stats.results >= limit:
                return
    finally:
        solutions.close()


def ltj_eval(
    index: TripleIndex, bgp: BGP, config: EngineConfig
) -> Tuple[List[Mapping], EvalStats]:
    """Evaluate ``bgp`` and collect the (possibly partial) solutions."""
    stats = EvalStats()
    solutions = list(iter_solutions(index, bgp, config, stats))
    return solutions, stats


def exhaustive_best_veo(
    index: TripleIndex,
    bgp: BGP,
    config: EngineConfig,
    progress: bool = False,
) -> Tuple[List[str], int]:
    """Fastest fixed order among those with lonely variables last and
    connected-if-possible prefixes.

    Falls back to the global order when the query has too many non-lonely
    variables to enumerate.
    """
    cursors = [index.cursor(p) for p in bgp.patterns]
    planner = VeoPlanner(index, bgp, cursors, config.strategy, random.Random(config.seed))
    orders = planner.candidate_orders()
    if orders is None:
        order = planner.global_order()
        logger.debug(f"too many variables for exhaustive search; using {order}")
        _, stats = ltj_eval(index, bgp, config.with_order(order))
        return order, stats.elapsed_us

    best_order: List[str] = []
    best_time: Optional[int] = None
    for order in tqdm(list(orders), desc="orders", leave=False, disable=not progress):
        _, stats = ltj_eval(index, bgp, config.with_order(order))
        if best_time is None or stats.elapsed_us < best_time:
            best_order, best_time = order, stats.elapsed_us
    logger.debug(f"best order {best_order} in {best_time} us")
    return best_order, best_time or 0
