"""Seeded planted-partition graphs with ground-truth communities.

Stream algorithm ``planted-uniform-v1``: a ``numpy.random.PCG64`` bit
generator seeded with ``seed`` feeds ``Generator.random``; candidate pairs
``(i, j)``, ``i < j``, are visited in lexicographic order, one double ``U``
per pair, and the pair becomes an edge iff ``U < p`` (``p_in`` inside a
community, ``p_out`` across).  Community ``k`` occupies a contiguous block of
vertex ids.  Only exact comparisons touch the random stream, so the output
does not depend on floating-point library details.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .graph import Graph, LoadStats
from .metrics import Partition

__all__ = ["GENERATOR_VERSION", "PlantedSpec", "generate_planted"]

GENERATOR_VERSION = "planted-uniform-v1"


@dataclass(frozen=True)
class PlantedSpec:
    communities: Sequence[int]
    p_in: float
    p_out: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "communities", tuple(int(c) for c in self.communities))
        if any(c <= 0 for c in self.communities):
            raise DomainError(f"community sizes must be positive, got {self.communities}")
        if sum(self.communities) < 2:
            raise DomainError("a planted graph needs at least two vertices")
        for name in ("p_in", "p_out"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {p}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.p_in <= self.p_out:
            warnings.warn(
                f"p_in={self.p_in} <= p_out={self.p_out}: no planted structure",
                stacklevel=3,
            )


def generate_planted(spec: PlantedSpec) -> tuple[Graph, Partition]:
    """Draw a graph from ``spec`` and return it with its planted partition."""
    sizes = np.asarray(spec.communities, dtype=np.int64)
    block = np.repeat(np.arange(len(sizes)), sizes)
    n = len(block)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    src_parts, dst_parts = [], []
    for i in range(n - 1):
        j = np.arange(i + 1, n)
        p = np.where(block[j] == block[i], spec.p_in, spec.p_out)
        keep = j[rng.random(len(j)) < p]
        if len(keep):
            src_parts.append(np.full(len(keep), i, dtype=np.int64))
            dst_parts.append(keep)
    src = np.concatenate(src_parts) if src_parts else np.empty(0, dtype=np.int64)
    dst = np.concatenate(dst_parts) if dst_parts else np.empty(0, dtype=np.int64)
    # pairs come out lexicographically ordered with src < dst
    g = Graph._from_canonical(n, src, dst, np.ones(len(src)), None, LoadStats())
    return g, Partition(block)
