"""
query.py

Query model: variables, triple patterns and basic graph patterns (BGPs).

Constants are positive integer ids. The id 0 stands for a constant that is
known not to occur in the graph (an unknown term), which simply matches nothing.

Sections:
    - Terms
    - Triple patterns
    - Basic graph patterns
"""

from typing import Callable, Dict, Iterator, List, Literal, Optional, Tuple, TypeAlias, Union

from pydantic import BaseModel, ConfigDict, Field

from ..errors import QueryParseError

Role: TypeAlias = Literal["s", "p", "o"]
ROLES: Tuple[Role, Role, Role] = ("s", "p", "o")

NEXT_ROLE: Dict[str, Role] = {"s": "p", "p": "o", "o": "s"}
"""Cyclic successor in spo order."""
PREV_ROLE: Dict[str, Role] = {"s": "o", "p": "s", "o": "p"}
"""Cyclic predecessor in spo order."""


# ======================================================================
# TERMS
# ======================================================================


class Variable(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)
    """Variable name without the leading '?'."""

    def __str__(self) -> str:
        return f"?{self.name}"


Term: TypeAlias = Union[Variable, int]


def parse_term(token: str, resolve: Optional[Callable[[str], int]] = None) -> Term:
    """Parse one query token. With ``resolve``, constants are looked up as terms."""
    if token.startswith("?"):
        if len(token) == 1:
            raise QueryParseError("variable without a name")
        return Variable(name=token[1:])
    if resolve is not None:
        return resolve(token)
    try:
        value = int(token)
    except ValueError:
        raise QueryParseError(f"invalid term {token!r}") from None
    if value < 0:
        raise QueryParseError(f"negative constant {value}")
    return value


# ======================================================================
# TRIPLE PATTERNS
# ======================================================================


class TriplePattern(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: Term
    p: Term
    o: Term

    def term(self, role: str) -> Term:
        return getattr(self, role)

    def items(self) -> Iterator[Tuple[Role, Term]]:
        for role in ROLES:
            yield role, getattr(self, role)

    def constants(self) -> Dict[Role, int]:
        return {role: t for role, t in self.items() if isinstance(t, int)}

    def variable_roles(self) -> Dict[str, List[Role]]:
        """Variable name -> roles it occupies (two or three for a repeated variable)."""
        out: Dict[str, List[Role]] = {}
        for role, t in self.items():
            if isinstance(t, Variable):
                out.setdefault(t.name, []).append(role)
        return out

    def variables(self) -> List[str]:
        return list(self.variable_roles())

    def __str__(self) -> str:
        return " ".join(str(t) for _, t in self.items())


# ======================================================================
# BASIC GRAPH PATTERNS
# ======================================================================


class BGP(BaseModel):
    model_config = ConfigDict(frozen=True)

    patterns: Tuple[TriplePattern, ...] = ()

    @classmethod
    def parse(cls, text: str, resolve: Optional[Callable[[str], int]] = None) -> "BGP":
        """Parse ``'?x 1 ?y ; ?y 2 3'`` (patterns separated by ';')."""
        patterns = []
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            tokens = chunk.split()
            if len(tokens) != 3:
                raise QueryParseError(
                    f"triple pattern needs 3 terms, got {len(tokens)}: {chunk!r}"
                )
            s, p, o = (parse_term(tok, resolve) for tok in tokens)
            patterns.append(TriplePattern(s=s, p=p, o=o))
        return cls(patterns=tuple(patterns))

    def __len__(self) -> int:
        return len(self.patterns)

    def variables(self) -> List[str]:
        """Variables in order of first appearance."""
        seen: Dict[str, None] = {}
        for pattern in self.patterns:
            for name in pattern.variables():
                seen.setdefault(name, None)
        return list(seen)

    def incidence(self) -> Dict[str, List[int]]:
        """Variable name -> indices of the patterns that mention it."""
        out: Dict[str, List[int]] = {name: [] for name in self.variables()}
        for idx, pattern in enumerate(self.patterns):
            for name in pattern.variables():
                out[name].append(idx)
        return out

    def lonely(self) -> Dict[str, bool]:
        """A variable is lonely when it occurs in exactly one pattern."""
        return {name: len(idx) == 1 for name, idx in self.incidence().items()}

    def __str__(self) -> str:
        return " ; ".join(str(p) for p in self.patterns)
