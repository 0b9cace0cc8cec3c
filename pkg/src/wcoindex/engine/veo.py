"""
Variable elimination orders (VEOs) and the weights that drive them.

The weight of a variable is the minimum, over the patterns that mention it, of
that pattern's estimate of how many values the variable can take:

- ``range``: number of triples matching the pattern so far.
- ``children``: number of distinct values (needs the vring M sequences).
- ``refined``: sum over alphabet partitions, ``k`` levels deep, of the minimum
  per-pattern count; with several patterns this is computed for the variable as
  a whole instead of per pattern.
- ``random``, ``random-nl``, ``random-e``: baselines with random orders.

A global strategy fixes the order once, taking lonely variables (those in a
single pattern) last and preferring variables that share a pattern with one
already chosen. An adaptive strategy picks the lightest remaining non-lonely
variable after every binding.
"""

import random
from dataclasses import dataclass
from itertools import permutations
from typing import Dict, Iterator, List, Literal, Optional, Sequence

from loguru import logger

from ..errors import ConfigurationError, UnsupportedFeatureError
from ..indices.base import TrieCursor, TripleIndex
from ..structures.wavelet import refined_estimate
from ..types import BGP

VeoMode = Literal["global", "adaptive"]

ESTIMATORS = ("range", "children", "refined", "random", "random-nl", "random-e")
RANDOM_ESTIMATORS = ("random", "random-nl", "random-e")
MAX_EXHAUSTIVE_VARS = 6


@dataclass(frozen=True)
class VeoStrategy:
    mode: VeoMode = "adaptive"
    estimator: str = "range"
    levels: int = 3
    """Partition depth for the refined estimator."""

    @classmethod
    def parse(cls, veo: str, estimator: str, default_levels: int = 3) -> "VeoStrategy":
        """Parse ``--veo`` and ``--estimator`` values such as ``global`` and ``refined:3``."""
        veo = veo.strip().lower()
        if veo not in ("global", "adaptive"):
            raise ConfigurationError(f"unknown VEO mode {veo!r}; expected global or adaptive")
        name, _, levels = estimator.strip().lower().partition(":")
        if name not in ESTIMATORS:
            raise ConfigurationError(
                f"unknown estimator {estimator!r}; expected one of {', '.join(ESTIMATORS)}"
            )
        k = default_levels
        if levels:
            if name != "refined":
                raise ConfigurationError(f"estimator {name!r} takes no level argument")
            try:
                k = int(levels)
            except ValueError:
                raise ConfigurationError(f"invalid refined level {levels!r}") from None
        if k < 0:
            raise ConfigurationError(f"refined levels must be >= 0, got {k}")
        return cls(veo, name, k)  # type: ignore[arg-type]

    @property
    def is_global(self) -> bool:
        """Random baselines always produce a fixed order."""
        return self.mode == "global" or self.estimator in RANDOM_ESTIMATORS

    @property
    def label(self) -> str:
        return f"refined:{self.levels}" if self.estimator == "refined" else self.estimator


class VeoPlanner:
    """Computes weights and orders for one query over its live cursors."""

    def __init__(
        self,
        index: TripleIndex,
        bgp: BGP,
        cursors: Sequence[TrieCursor],
        strategy: VeoStrategy,
        rng: Optional[random.Random] = None,
    ):
        self.index = index
        self.cursors = cursors
        self.strategy = strategy
        self.rng = rng or random.Random()
        self.variables = bgp.variables()
        self.incidence = bgp.incidence()
        self.lonely = bgp.lonely()
        self._rank = {v: k for k, v in enumerate(self.variables)}
        self.estimator = strategy.estimator

        if self.estimator == "children" and not index.supports_children:
            raise UnsupportedFeatureError(
                f"estimator 'children' needs a vring index, got {index.variant}"
            )
        if self.estimator == "refined" and not index.supports_refined:
            logger.warning(
                f"refined estimator unavailable on {index.variant}; using range sizes"
            )
            self.estimator = "range"

    # ----- weights -----

    def _cursors_of(self, var: str) -> List[TrieCursor]:
        return [self.cursors[i] for i in self.incidence[var]]

    def weight(self, var: str) -> int:
        cursors = self._cursors_of(var)
        if self.estimator == "children":
            return min(c.distinct(var) for c in cursors)
        if self.estimator == "refined":
            return self.refined_weight(var)
        return min(c.size() for c in cursors)

    def refined_weight(self, var: str) -> int:
        return refined_weight(self._cursors_of(var), var, self.strategy.levels)

    def _sorted(self, names: Sequence[str], weights: Dict[str, float]) -> List[str]:
        return sorted(names, key=lambda v: (weights[v], self._rank[v]))

    # ----- orders -----

    def _connected(self, var: str, chosen: Sequence[str]) -> bool:
        patterns = set(self.incidence[var])
        return any(patterns.intersection(self.incidence[c]) for c in chosen)

    def _greedy(self, weights: Dict[str, float]) -> List[str]:
        """Lightest first; later picks share a pattern with earlier ones when possible."""
        pending = self._sorted([v for v in self.variables if not self.lonely[v]], weights)
        order: List[str] = []
        while pending:
            pick = next((v for v in pending if self._connected(v, order)), pending[0])
            order.append(pick)
            pending.remove(pick)
        return order + self._sorted([v for v in self.variables if self.lonely[v]], weights)

    def global_order(self) -> List[str]:
        estimator = self.estimator
        if estimator == "random":
            order = list(self.variables)
            self.rng.shuffle(order)
        elif estimator == "random-nl":
            heavy = [v for v in self.variables if not self.lonely[v]]
            light = [v for v in self.variables if self.lonely[v]]
            self.rng.shuffle(heavy)
            self.rng.shuffle(light)
            order = heavy + light
        elif estimator == "random-e":
            order = self._greedy({v: self.rng.random() for v in self.variables})
        else:
            order = self._greedy({v: self.weight(v) for v in self.variables})
        logger.debug(f"global order ({self.strategy.label}): {order}")
        return order

    def next_variable(self, remaining: Sequence[str]) -> str:
        """Adaptive choice among the unbound variables."""
        if len(remaining) == 1:
            return remaining[0]
        pool = [v for v in remaining if not self.lonely[v]] or list(remaining)
        return min(pool, key=lambda v: (self.weight(v), self._rank[v]))

    def candidate_orders(self) -> Optional[Iterator[List[str]]]:
        """Every order with lonely variables last that respects the connectivity rule.

        None when there are more non-lonely variables than the search allows.
        """
        heavy = [v for v in self.variables if not self.lonely[v]]
        if len(heavy) > MAX_EXHAUSTIVE_VARS:
            return None
        weights = {v: self.weight(v) for v in self.variables}
        tail = self._sorted([v for v in self.variables if self.lonely[v]], weights)

        def valid(order: Sequence[str]) -> bool:
            for k in range(1, len(order)):
                prefix = order[:k]
                if not self._connected(order[k], prefix) and any(
                    self._connected(v, prefix) for v in order[k:]
                ):
                    return False
            return True

        return (list(p) + tail for p in permutations(heavy) if valid(p))


def refined_weight(cursors: Sequence[TrieCursor], var: str, k: int) -> int:
    """Upper bound on the number of values of ``var`` common to all ``cursors``.

    When every cursor exposes the values of ``var`` as the symbols of a wavelet
    range the ranges are descended together; otherwise each cursor reports its
    own per-partition counts and the minima are summed.
    """
    specs = [c.value_range(var) for c in cursors]
    if all(spec is not None for spec in specs):
        return refined_estimate(specs, k)  # type: ignore[arg-type]
    counts = [c.partition_counts(var, k) for c in cursors]
    if any(cnt is None for cnt in counts):
        return min(c.size() for c in cursors)
    return sum(min(column) for column in zip(*counts))  # type: ignore[misc]


def global_veo(
    index: TripleIndex,
    bgp: BGP,
    strategy: VeoStrategy,
    rng: Optional[random.Random] = None,
) -> List[str]:
    """Fixed elimination order for ``bgp`` with its constants resolved."""
    cursors = [index.cursor(p) for p in bgp.patterns]
    return VeoPlanner(index, bgp, cursors, strategy, rng).global_order()


def adaptive_next(planner: VeoPlanner, remaining: Sequence[str]) -> str:
    return planner.next_variable(remaining)
