"""Structure-connected clustering (SCAN) over any per-edge similarity.

A vertex is a core when at least ``mu`` of its neighbors have similarity
``>= epsilon`` with it.  Clusters grow breadth-first from cores, in
ascending vertex order; non-core members (borders) join the first cluster
that reaches them and do not propagate.  Vertices left over become hubs
when they touch two or more clusters and outliers otherwise.

ISCAN is SCAN run on normalized dynamic structural similarity.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import ContractError, DomainError
from .graph import Graph
from .similarity import EdgeSimilarity, dss_run, local_similarities, normalize

__all__ = [
    "HUB",
    "OUTLIER",
    "ScanParams",
    "Clustering",
    "epsilon_neighborhood",
    "core_mask",
    "scan_cluster",
    "scan",
    "iscan",
    "write_clustering",
]

HUB = -1
OUTLIER = -2


@dataclass(frozen=True)
class ScanParams:
    """SCAN parameters.

    ``mu`` counts neighbors only (the vertex itself is not in its own
    epsilon-neighborhood).  When ``mu_fraction`` is set, a vertex ``u`` is a
    core iff ``|N_eps(u)| >= max(1, ceil(mu_fraction * d(u)))`` and ``mu`` is
    ignored.
    """

    epsilon: float = 0.5
    mu: int = 2
    dss_iterations: int = 5
    mu_fraction: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise DomainError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if int(self.mu) != self.mu or self.mu < 1:
            raise DomainError(f"mu must be a positive integer, got {self.mu}")
        if self.dss_iterations < 1:
            raise DomainError(f"dss_iterations must be >= 1, got {self.dss_iterations}")
        if self.mu_fraction is not None and not 0.0 < self.mu_fraction <= 1.0:
            raise DomainError(f"mu_fraction must lie in (0, 1], got {self.mu_fraction}")


@dataclass(frozen=True, eq=False)
class Clustering:
    """Per-vertex community id, or :data:`HUB` / :data:`OUTLIER`."""

    assignment: np.ndarray
    community_count: int

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == c)

    def communities(self) -> list[np.ndarray]:
        return [self.members(c) for c in range(self.community_count)]

    @property
    def hubs(self) -> np.ndarray:
        return np.flatnonzero(self.assignment == HUB)

    @property
    def outliers(self) -> np.ndarray:
        return np.flatnonzero(self.assignment == OUTLIER)


def _require_normalized(sim: EdgeSimilarity, g: Graph) -> None:
    if not sim.normalized:
        raise ContractError("SCAN needs normalized similarity scores")
    if len(sim) != g.edge_count:
        raise ContractError(f"similarity has {len(sim)} scores for {g.edge_count} edges")


def epsilon_neighborhood(g: Graph, sim: EdgeSimilarity, u: int, epsilon: float) -> set[int]:
    """Neighbors ``v`` of ``u`` with ``score(u, v) >= epsilon``."""
    _require_normalized(sim, g)
    nbrs = g.neighbors(u)
    keep = sim.scores[g.incident_edges(u)] >= epsilon
    return set(nbrs[keep].tolist())


def core_mask(g: Graph, sim: EdgeSimilarity, params: ScanParams) -> np.ndarray:
    """Boolean array marking core vertices."""
    _require_normalized(sim, g)
    strong = sim.scores >= params.epsilon
    n = g.vertex_count
    eps_deg = np.bincount(g.src[strong], minlength=n) + np.bincount(g.dst[strong], minlength=n)
    if params.mu_fraction is None:
        need = np.full(n, params.mu)
    else:
        need = np.maximum(1, np.ceil(params.mu_fraction * g.degrees() - 1e-12)).astype(np.int64)
    return eps_deg >= need


def scan_cluster(g: Graph, sim: EdgeSimilarity, params: ScanParams) -> Clustering:
    """Cluster ``g`` with SCAN using the given normalized edge similarity."""
    cores = core_mask(g, sim, params)
    strong = sim.scores >= params.epsilon
    indptr, indices, eids = g.indptr, g.indices, g.edge_ids
    n = g.vertex_count
    assign = np.full(n, OUTLIER, dtype=np.int64)
    unassigned = OUTLIER
    cid = 0
    for seed in np.flatnonzero(cores).tolist():
        if assign[seed] != unassigned:
            continue
        assign[seed] = cid
        queue = deque([seed])
        while queue:
            x = queue.popleft()
            for k in range(indptr[x], indptr[x + 1]):
                if not strong[eids[k]]:
                    continue
                y = int(indices[k])
                if assign[y] != unassigned:
                    continue
                assign[y] = cid
                if cores[y]:
                    queue.append(y)
        cid += 1

    for u in np.flatnonzero(assign == unassigned).tolist():
        touched = {int(c) for c in assign[g.neighbors(u)] if c >= 0}
        if len(touched) >= 2:
            assign[u] = HUB
    assign.flags.writeable = False
    return Clustering(assignment=assign, community_count=cid)


def scan(g: Graph, params: ScanParams, measure: str = "cosine") -> tuple[Clustering, EdgeSimilarity]:
    """Classic SCAN on local structural similarity."""
    sim = local_similarities(g, measure)
    return scan_cluster(g, sim, params), sim


def iscan(g: Graph, params: ScanParams, workers: int = 1) -> tuple[Clustering, EdgeSimilarity]:
    """SCAN on dynamic structural similarity after ``params.dss_iterations`` sweeps."""
    raw, _ = dss_run(g, 1.0, params.dss_iterations, stop_early=False, workers=workers)
    sim = normalize(raw)
    return scan_cluster(g, sim, params), sim


def role_name(value: int) -> str:
    if value == HUB:
        return "hub"
    if value == OUTLIER:
        return "outlier"
    return str(value)


def write_clustering(g: Graph, c: Clustering, stream: IO[str]) -> None:
    """TSV ``label<TAB>assignment`` with assignment an id, ``hub`` or ``outlier``."""
    for lab, a in zip(g.labels.tolist(), c.assignment.tolist()):
        stream.write(f"{lab}\t{role_name(a)}\n")

