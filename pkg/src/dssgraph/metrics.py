"""Partition quality: sqrt-normalized mutual information, modularity, size-distribution error."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, Mapping

import numpy as np

from .errors import DomainError, GraphFormatError
from .graph import Graph
from .scan import Clustering

__all__ = [
    "Partition",
    "PartitionScore",
    "clustering_to_partition",
    "nmi",
    "modularity",
    "size_distribution_mse",
    "size_histograms",
    "evaluate",
    "read_partition",
    "write_partition",
    "write_report",
]


@dataclass(frozen=True, eq=False)
class Partition:
    """Dense community id for every vertex."""

    labels: np.ndarray

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=np.int64)
        if len(lab) and lab.min() < 0:
            raise DomainError("partition labels must be non-negative")
        _, dense = np.unique(lab, return_inverse=True)
        dense = dense.astype(np.int64).reshape(-1)
        dense.flags.writeable = False
        object.__setattr__(self, "labels", dense)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def community_count(self) -> int:
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.community_count)

    @property
    def singleton_count(self) -> int:
        return int(np.sum(self.sizes() == 1))

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int], g: Graph) -> "Partition":
        """Align a ``vertex label -> community`` mapping with ``g``'s vertices."""
        try:
            return cls(np.array([mapping[lab] for lab in g.labels.tolist()], dtype=np.int64))
        except KeyError as exc:
            raise DomainError(f"vertex label {exc.args[0]} has no community") from None


@dataclass(frozen=True)
class PartitionScore:
    nmi: float
    modularity: float
    size_mse: float
    community_count: int
    singleton_count: int


def clustering_to_partition(c: Clustering) -> Partition:
    """Communities keep their ids; every hub and outlier becomes its own singleton."""
    labels = np.array(c.assignment, dtype=np.int64)
    loose = np.flatnonzero(labels < 0)
    labels[loose] = c.community_count + np.arange(len(loose))
    return Partition(labels)


def _check_same_size(a: Partition, b: Partition) -> None:
    if len(a) != len(b):
        raise DomainError(f"partitions cover {len(a)} and {len(b)} vertices")


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(a: Partition, b: Partition) -> float:
    """Mutual information over the geometric mean of the two entropies.

    If either partition has zero entropy the score is 1.0 when the two
    partitions are identical and 0.0 otherwise.
    """
    _check_same_size(a, b)
    n = len(a)
    if n == 0:
        raise DomainError("cannot compare empty partitions")
    ka, kb = a.community_count, b.community_count
    row = np.bincount(a.labels, minlength=ka)
    col = np.bincount(b.labels, minlength=kb)
    ha = _entropy(row, n)
    hb = _entropy(col, n)
    if ha == 0.0 or hb == 0.0:
        return 1.0 if ka == kb == 1 else 0.0
    # sparse contingency table: only co-occurring (a, b) label pairs
    pairs, joint = np.unique(a.labels * kb + b.labels, return_counts=True)
    i, j = np.divmod(pairs, kb)
    mi = float(np.sum(joint / n * np.log(joint * n / (row[i] * col[j].astype(np.float64)))))
    return min(1.0, max(0.0, mi / math.sqrt(ha * hb)))


def modularity(g: Graph, p: Partition) -> float:
    """Newman modularity ``sum_c (e_cc / m - (a_c / 2m)^2)``."""
    if len(p) != g.vertex_count:
        raise DomainError(f"partition covers {len(p)} vertices, graph has {g.vertex_count}")
    m = g.edge_count
    if m == 0:
        raise DomainError("modularity is undefined for a graph without edges")
    k = p.community_count
    cu, cv = p.labels[g.src], p.labels[g.dst]
    intra = np.bincount(cu[cu == cv], minlength=k)
    total_degree = np.bincount(p.labels, weights=g.degrees(), minlength=k)
    return float(np.sum(intra / m - (total_degree / (2.0 * m)) ** 2))


def size_histograms(estimated: Partition, real: Partition) -> list[tuple[int, int, int]]:
    """Rows ``(size, count_estimated, count_real)`` over the union of observed sizes."""
    he = Counter(estimated.sizes().tolist())
    hr = Counter(real.sizes().tolist())
    return [(s, he.get(s, 0), hr.get(s, 0)) for s in sorted(set(he) | set(hr))]


def size_distribution_mse(estimated: Partition, real: Partition) -> float:
    """Mean squared difference of the community-size histograms.

    The mean runs over every size that occurs in either partition.
    """
    _check_same_size(estimated, real)
    rows = size_histograms(estimated, real)
    if not rows:
        return 0.0
    return float(np.mean([(ce - cr) ** 2 for _, ce, cr in rows]))


def evaluate(g: Graph | None, estimated: Partition, real: Partition | None) -> PartitionScore:
    """Score ``estimated``; NMI and MSE need ``real``, modularity needs ``g``."""
    return PartitionScore(
        nmi=nmi(estimated, real) if real is not None else math.nan,
        modularity=modularity(g, estimated) if g is not None and g.edge_count else math.nan,
        size_mse=size_distribution_mse(estimated, real) if real is not None else math.nan,
        community_count=estimated.community_count,
        singleton_count=estimated.singleton_count,
    )


def read_partition(stream: Iterable[str]) -> dict[int, int]:
    """Parse ``label community`` lines (comments start with ``#`` or ``%``).

    Extra columns are ignored, so overlapping-community files keep each
    vertex's first community.  ``hub`` and ``outlier`` assignments from a
    clustering dump become singleton communities.
    """
    out: dict[int, int] = {}
    loose: list[int] = []
    seen: set[int] = set()
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        toks = s.split()
        if len(toks) < 2:
            raise GraphFormatError(f"expected 'label community', got {s!r}", lineno)
        try:
            lab = int(toks[0])
        except ValueError:
            raise GraphFormatError(f"vertex label {toks[0]!r} is not an integer", lineno) from None
        if lab in seen:
            raise GraphFormatError(f"vertex {lab} listed twice", lineno)
        seen.add(lab)
        if toks[1] in ("hub", "outlier"):
            loose.append(lab)
            continue
        try:
            out[lab] = int(toks[1])
        except ValueError:
            raise GraphFormatError(f"community {toks[1]!r} is not an integer", lineno) from None
        if out[lab] < 0:
            raise DomainError(f"line {lineno}: community ids must be non-negative")
    base = max(out.values(), default=-1) + 1
    for i, lab in enumerate(loose):
        out[lab] = base + i
    return out


def write_partition(g: Graph, p: Partition, stream: IO[str]) -> None:
    for lab, c in zip(g.labels.tolist(), p.labels.tolist()):
        stream.write(f"{lab}\t{c}\n")


def write_report(score: PartitionScore, stream: IO[str], header: bool = True) -> None:
    if header:
        stream.write("nmi\tmodularity\tsize_mse\tcommunity_count\tsingleton_count\n")
    stream.write(
        f"{score.nmi!r}\t{score.modularity!r}\t{score.size_mse!r}\t"
        f"{score.community_count}\t{score.singleton_count}\n"
    )
