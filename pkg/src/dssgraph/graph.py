"""Immutable undirected graph with sorted CSR adjacency and edge ids.

Every undirected edge ``(u, v)`` with ``u < v`` gets an edge id; edge ids
are ordered lexicographically by ``(u, v)``.  Each vertex row of the CSR
structure stores ``(neighbor, edge_id)`` pairs sorted by neighbor, so per-edge
state can live in a flat array indexed by edge id and common neighborhoods
are computed by merging two sorted rows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import DomainError, GraphFormatError

__all__ = [
    "Graph",
    "LoadStats",
    "load_edge_list",
    "read_edge_list",
    "write_edge_list",
    "write_label_map",
    "common_closed_neighbors",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LoadStats:
    """Counts of input records dropped while building a simple graph."""

    duplicates: int = 0
    self_loops: int = 0
    reciprocal: int = 0


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph in CSR form.

    Attributes
    ----------
    indptr : ndarray of shape (n + 1,)
        Row offsets into ``indices`` and ``edge_ids``.
    indices : ndarray of shape (2m,)
        Neighbor ids, strictly ascending within each row.
    edge_ids : ndarray of shape (2m,)
        Edge id of each adjacency entry.
    src, dst : ndarray of shape (m,)
        Endpoints of each edge, ``src < dst``.
    weights : ndarray of shape (m,)
        Non-negative edge weights, 1.0 for unweighted input.
    labels : ndarray of shape (n,)
        External label of each internal vertex id.
    """

    indptr: np.ndarray
    indices: np.ndarray
    edge_ids: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    weights: np.ndarray
    labels: np.ndarray
    load_stats: LoadStats = field(default_factory=LoadStats)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]] | np.ndarray,
        weights: Sequence[float] | np.ndarray | None = None,
        labels: Sequence[int] | np.ndarray | None = None,
    ) -> "Graph":
        """Build a graph on vertices ``0..n-1`` from an edge sequence.

        Self-loops are dropped and parallel edges collapse to the first
        occurrence (orientation is ignored).
        """
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        m_in = len(arr)
        if weights is None:
            w = np.ones(m_in, dtype=np.float64)
        else:
            w = np.asarray(weights, dtype=np.float64)
            if w.shape != (m_in,):
                raise DomainError(f"expected {m_in} weights, got {w.shape}")
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise DomainError("edge weights must be finite and non-negative")
        if n < 0:
            raise DomainError("vertex count must be non-negative")
        if m_in and (arr.min() < 0 or arr.max() >= n):
            raise DomainError(f"edge endpoint out of range for {n} vertices")

        loops = arr[:, 0] == arr[:, 1]
        arr, w = arr[~loops], w[~loops]
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        key = lo * max(n, 1) + hi
        _, first = np.unique(key, return_index=True)
        # np.unique sorts by key, i.e. lexicographically by (lo, hi)
        src, dst, w = lo[first], hi[first], w[first]
        stats = LoadStats(duplicates=int(len(lo) - len(first)), self_loops=int(loops.sum()))
        return cls._from_canonical(n, src, dst, w, labels, stats)

    @classmethod
    def _from_canonical(cls, n, src, dst, w, labels, stats) -> "Graph":
        m = len(src)
        eid = np.arange(m, dtype=np.int64)
        rows = np.concatenate([src, dst])
        cols = np.concatenate([dst, src])
        ids = np.concatenate([eid, eid])
        order = np.lexsort((cols, rows))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        if labels is None:
            lab = np.arange(n, dtype=np.int64)
        else:
            lab = np.asarray(labels, dtype=np.int64)
            if lab.shape != (n,):
                raise DomainError(f"expected {n} labels, got {lab.shape}")
        return cls(
            indptr=_readonly(indptr),
            indices=_readonly(np.ascontiguousarray(cols[order], dtype=np.int64)),
            edge_ids=_readonly(np.ascontiguousarray(ids[order], dtype=np.int64)),
            src=_readonly(np.ascontiguousarray(src, dtype=np.int64)),
            dst=_readonly(np.ascontiguousarray(dst, dtype=np.int64)),
            weights=_readonly(np.ascontiguousarray(w, dtype=np.float64)),
            labels=_readonly(lab),
            load_stats=stats,
        )

    @property
    def vertex_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.src)

    @property
    def is_weighted(self) -> bool:
        return bool(np.any(self.weights != 1.0))

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self, u: int) -> int:
        self._check_vertex(u)
        return int(self.indptr[u + 1] - self.indptr[u])

    def closed_degree(self, u: int) -> int:
        return self.degree(u) + 1

    def neighbors(self, u: int) -> np.ndarray:
        self._check_vertex(u)
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def incident_edges(self, u: int) -> np.ndarray:
        self._check_vertex(u)
        return self.edge_ids[self.indptr[u] : self.indptr[u + 1]]

    def edge_id(self, u: int, v: int) -> int | None:
        """Edge id of ``(u, v)``, or None if the vertices are not adjacent."""
        row = self.neighbors(u)
        self._check_vertex(v)
        k = int(np.searchsorted(row, v))
        if k < len(row) and row[k] == v:
            return int(self.edge_ids[self.indptr[u] + k])
        return None

    def has_edge(self, u: int, v: int) -> bool:
        return self.edge_id(u, v) is not None

    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of endpoints in edge-id order."""
        return np.stack([self.src, self.dst], axis=1)

    def vertex_of(self, label: int) -> int:
        """Internal id of an external vertex label."""
        try:
            return self._label_index[int(label)]
        except KeyError:
            raise DomainError(f"unknown vertex label {label}") from None

    @cached_property
    def _label_index(self) -> dict[int, int]:
        return {lab: i for i, lab in enumerate(self.labels.tolist())}

    def _check_vertex(self, u: int) -> None:
        if not 0 <= u < self.vertex_count:
            raise DomainError(f"vertex id {u} out of range [0, {self.vertex_count})")

    def same_structure(self, other: "Graph") -> bool:
        """Exact equality of topology, weights and labels."""
        return all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("indptr", "indices", "edge_ids", "src", "dst", "weights", "labels")
        )

    def __repr__(self) -> str:
        return f"Graph(vertex_count={self.vertex_count}, edge_count={self.edge_count})"


def common_closed_neighbors(g: Graph, u: int, v: int) -> list[int]:
    """Sorted members of ``N[u] & N[v]``, by merging the two sorted closed rows."""
    g._check_vertex(u)
    g._check_vertex(v)
    if u == v:
        return sorted([u, *g.neighbors(u).tolist()])
    a = g.neighbors(u).tolist()
    b = g.neighbors(v).tolist()
    # closed rows: splice the vertex itself into its sorted open row
    a.insert(int(np.searchsorted(a, u)), u)
    b.insert(int(np.searchsorted(b, v)), v)
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] < b[j]:
            i += 1
        elif a[i] > b[j]:
            j += 1
        else:
            out.append(a[i])
            i += 1
            j += 1
    return out


def _parse_int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphFormatError(f"vertex label {tok!r} is not an integer", lineno) from None


def load_edge_list(stream: IO[str] | Iterable[str], directed: bool = False) -> Graph:
    """Parse ``u v [w]`` lines into a :class:`Graph`.

    Lines starting with ``#`` or ``%`` and blank lines are skipped.  Vertex
    labels must be integers; they are densified in ascending label order so
    that writing and re-reading a graph reproduces it exactly.  Duplicate
    edges keep their first weight and self-loops are dropped; both are
    counted in ``Graph.load_stats`` and logged.

    With ``directed=True`` the input is read as arcs and symmetrized: the
    reverse of an arc already seen is counted as ``reciprocal`` rather than
    as a duplicate.

    Raises
    ------
    GraphFormatError
        On a line with fewer than two tokens or a non-numeric token.
    DomainError
        On a negative or non-finite weight.
    """
    us: list[int] = []
    vs: list[int] = []
    ws: list[float] = []
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        toks = s.split()
        if len(toks) < 2:
            raise GraphFormatError(f"expected 'u v [w]', got {s!r}", lineno)
        us.append(_parse_int(toks[0], lineno))
        vs.append(_parse_int(toks[1], lineno))
        if len(toks) >= 3:
            try:
                w = float(toks[2])
            except ValueError:
                raise GraphFormatError(f"weight {toks[2]!r} is not a number", lineno) from None
            if not np.isfinite(w) or w < 0:
                raise DomainError(f"line {lineno}: weight {w} must be finite and non-negative")
            ws.append(w)
        else:
            ws.append(1.0)

    raw_u = np.asarray(us, dtype=np.int64)
    raw_v = np.asarray(vs, dtype=np.int64)
    lab, inv = np.unique(np.concatenate([raw_u, raw_v]), return_inverse=True)
    m_in = len(raw_u)
    pairs = inv.reshape(2, m_in).T if m_in else np.empty((0, 2), dtype=np.int64)
    g = Graph.from_edges(len(lab), pairs, np.asarray(ws, dtype=np.float64), labels=lab)

    stats = g.load_stats
    if directed and stats.duplicates:
        arcs = {(int(a), int(b)) for a, b in pairs if a != b}
        reciprocal = sum(1 for a, b in arcs if a < b and (b, a) in arcs)
        stats = LoadStats(
            duplicates=stats.duplicates - reciprocal,
            self_loops=stats.self_loops,
            reciprocal=reciprocal,
        )
        object.__setattr__(g, "load_stats", stats)
    if stats.self_loops:
        logger.warning("dropped %d self-loop(s)", stats.self_loops)
    if stats.duplicates:
        logger.warning("collapsed %d duplicate edge(s), first weight kept", stats.duplicates)
    return g


def read_edge_list(path, directed: bool = False) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh, directed=directed)


def write_edge_list(g: Graph, stream: IO[str], weights: bool | None = None) -> None:
    """Write one ``label_u label_v [w]`` line per edge in edge-id order.

    Weights are written when the graph is weighted (or when forced), using
    ``repr`` so every float survives a round trip.
    """
    if weights is None:
        weights = g.is_weighted
    lab = g.labels
    for e in range(g.edge_count):
        a, b = lab[g.src[e]], lab[g.dst[e]]
        if weights:
            stream.write(f"{a} {b} {float(g.weights[e])!r}\n")
        else:
            stream.write(f"{a} {b}\n")


def write_label_map(g: Graph, stream: IO[str]) -> None:
    """Two-column TSV ``internal_id<TAB>label``."""
    stream.write("# internal_id\tlabel\n")
    for i, lab in enumerate(g.labels.tolist()):
        stream.write(f"{i}\t{lab}\n")
