from typing import Dict, Type

import numpy as np

from ..errors import ConfigurationError, IngestError
from .base import LeapCounter, QueryTimeout, TrieCursor, TripleIndex, leapfrog
from .rdfcsa import RdfcsaIndex
from .ring import RingIndex, URingIndex

VARIANTS = [
    "ring-large",
    "ring-small",
    "vring-large",
    "vring-small",
    "uring-large",
    "uring-small",
    "rdfcsa-large",
    "rdfcsa-small",
]

_FAMILIES: Dict[str, Type[TripleIndex]] = {
    "ring": RingIndex,
    "vring": RingIndex,
    "uring": URingIndex,
    "rdfcsa": RdfcsaIndex,
}


def index_class(variant: str) -> Type[TripleIndex]:
    if variant not in VARIANTS:
        raise ConfigurationError(
            f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}"
        )
    return _FAMILIES[variant.split("-")[0]]


def build_index(
    triples: np.ndarray, U: int, variant: str, psi_sample_rate: int = 16
) -> TripleIndex:
    """Build the index ``variant`` over an (n, 3) array of ids in [1, U]."""
    cls = index_class(variant)
    if triples.size and (triples.min() < 1 or triples.max() > U):
        raise IngestError(f"ids must lie in [1, {U}]")
    if cls is RdfcsaIndex:
        return RdfcsaIndex.build(triples, U, variant, sample_rate=psi_sample_rate)
    return cls.build(triples, U, variant)  # type: ignore[attr-defined]


__all__ = [
    "VARIANTS",
    "build_index",
    "index_class",
    "TripleIndex",
    "TrieCursor",
    "LeapCounter",
    "QueryTimeout",
    "leapfrog",
    "RingIndex",
    "URingIndex",
    "RdfcsaIndex",
]
