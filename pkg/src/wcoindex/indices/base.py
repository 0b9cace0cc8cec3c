"""
Cursor contract shared by every index family, plus the leapfrog intersection.

An index hands out one `TrieCursor` per triple pattern. A cursor tracks the set
of triples matching the pattern's constants and the variables bound so far, and
answers the trie questions LTJ asks about one unbound variable at a time.

Subclasses implement the role-level primitives (``_leap_role``, ``_down_role``,
``_up_role``); this base turns them into variable-level operations, including
variables that occupy several roles of the same pattern.
"""

from abc import ABC, abstractmethod
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import UnsupportedFeatureError
from ..structures.wavelet import RangeSpec
from ..types import ROLES, TriplePattern
from ..utils.misc import Deadline


class QueryTimeout(Exception):
    """Raised inside evaluation when the deadline passes."""


class LeapCounter:
    """Leap-call counter that also polls the deadline."""

    CHECK_EVERY = 64

    def __init__(self, deadline: Optional[Deadline] = None):
        self.leaps = 0
        self.deadline = deadline or Deadline(None)

    def tick(self) -> None:
        self.leaps += 1
        if not self.leaps % self.CHECK_EVERY and self.deadline.expired():
            raise QueryTimeout()


class TrieCursor(ABC):
    """Per-pattern evaluation state over an index."""

    def __init__(self, pattern: TriplePattern):
        self.pattern = pattern
        self.var_roles: Dict[str, List[str]] = pattern.variable_roles()
        self._pushed: List[int] = []

    # ----- role-level primitives -----

    @property
    @abstractmethod
    def empty(self) -> bool: ...

    @abstractmethod
    def size(self) -> int:
        """Number of triples matching everything bound so far."""

    @abstractmethod
    def _leap_role(self, role: str, c: int) -> Optional[int]: ...

    @abstractmethod
    def _down_role(self, role: str, c: int) -> None: ...

    @abstractmethod
    def _up_role(self) -> None: ...

    # ----- variable-level operations -----

    def roles_of(self, var: str) -> List[str]:
        return self.var_roles[var]

    def leap(self, var: str, c: int) -> Optional[int]:
        """Smallest admissible value ``>= c`` for ``var``, or None."""
        if self.empty:
            return None
        roles = self.var_roles[var]
        if len(roles) == 1:
            return self._leap_role(roles[0], c)
        while True:
            a = self._leap_role(roles[0], c)
            if a is None or self._admits(roles, a):
                return a
            c = a + 1

    def _admits(self, roles: Sequence[str], value: int) -> bool:
        for role in roles:
            self._down_role(role, value)
        ok = not self.empty
        for _ in roles:
            self._up_role()
        return ok

    def down(self, var: str, c: int) -> None:
        roles = self.var_roles[var]
        for role in roles:
            self._down_role(role, c)
        self._pushed.append(len(roles))

    def up(self) -> None:
        for _ in range(self._pushed.pop()):
            self._up_role()

    # ----- estimators -----

    def distinct(self, var: str) -> int:
        """Number of distinct values ``var`` can take next."""
        raise UnsupportedFeatureError(
            f"{type(self).__name__} cannot count distinct children"
        )

    def value_range(self, var: str) -> Optional[RangeSpec]:
        """A wavelet range whose symbols are exactly the values of ``var``, if one exists."""
        return None

    def partition_counts(self, var: str, k: int) -> Optional[List[int]]:
        """Triples per alphabet partition of depth ``k`` for ``var`` (None if unsupported)."""
        return None


def leapfrog(
    cursors: Sequence[TrieCursor], var: str, counter: LeapCounter
) -> Iterator[int]:
    """Ascending values of ``var`` admitted by every cursor.

    The caller may descend and come back between values; cursors must be back
    in the state they were in when the value was yielded.
    """
    k = len(cursors)
    c, agreed, idx = 1, 0, 0
    while True:
        counter.tick()
        a = cursors[idx].leap(var, c)
        if a is None:
            return
        if a == c:
            agreed += 1
        else:
            c, agreed = a, 1
        if agreed == k:
            yield c
            c, agreed = c + 1, 0
        idx = (idx + 1) % k


class TripleIndex(ABC):
    """An immutable index over a set of integer triples with ids in [1, U]."""

    variant: str = ""
    supports_children: bool = False
    supports_refined: bool = False

    n: int
    U: int

    @abstractmethod
    def cursor(self, pattern: TriplePattern) -> TrieCursor:
        """Cursor with the pattern's constants already resolved."""

    def candidates(
        self, cursors: Sequence[TrieCursor], var: str, counter: LeapCounter
    ) -> Iterable[int]:
        return leapfrog(cursors, var, counter)

    @abstractmethod
    def triples(self) -> np.ndarray:
        """Decoded (n, 3) array of the indexed triples, in spo order."""

    @abstractmethod
    def sections(self) -> Dict[str, bytes]:
        """Named binary payloads for the index container."""

    @classmethod
    @abstractmethod
    def from_sections(cls, variant: str, n: int, U: int, sections: Dict[str, bytes]):
        """Rebuild an index from `sections` output."""

    @property
    def nbytes(self) -> int:
        return sum(len(payload) for payload in self.sections().values())


def canonical_triples(triples: np.ndarray) -> np.ndarray:
    """Deduplicate and sort an (n, 3) triple array in spo order."""
    arr = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    if not arr.shape[0]:
        return arr
    return np.unique(arr, axis=0)


def role_column(role: str) -> int:
    return ROLES.index(role)


def resolution_order(constants: Dict[str, int]) -> List[Tuple[str, int]]:
    """Order to bind constants so every step extends the bound prefix to the left.

    For a pair ``{x, next(x)}`` the right one goes first; three constants go o, p, s.
    """
    roles = [r for r in ROLES if r in constants]
    if len(roles) == 3:
        ordered = ["o", "p", "s"]
    elif len(roles) == 2:
        a, b = roles
        # (s, p) -> p, s ; (p, o) -> o, p ; (s, o) is the pair (o, s) -> s, o
        ordered = [b, a] if (a, b) != ("s", "o") else ["s", "o"]
    else:
        ordered = roles
    return [(r, constants[r]) for r in ordered]
