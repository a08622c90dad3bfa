"""Local and dynamic structural similarity of adjacent vertices.

Local measures (cosine, Jaccard, Dice) use closed neighborhoods
``N[u] = N(u) | {u}``.  The dynamic structural similarity (DSS) is the
fixed point of the edge map

    DSS_{t+1}(u, v) = sum_{x in N[u] & N[v]} (DSS_t(u, x) + DSS_t(v, x))
                      / sqrt(sum_{x in N(u)} DSS_t(u, x) * sum_{y in N(v)} DSS_t(v, y))

with ``DSS_t(a, a) = 0`` and ``DSS_t(a, b) = 0`` for non-adjacent pairs, so
the whole state is one float per edge.  Raw scores lie in ``[0, 2]``;
:func:`normalize` maps them to ``[0, 1]`` by dividing by 2.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Literal

import numpy as np

from . import _kernels
from .errors import ContractError, DomainError
from .graph import Graph, common_closed_neighbors

__all__ = [
    "MEASURES",
    "EdgeSimilarity",
    "DssTrace",
    "local_similarity",
    "local_similarities",
    "dss_init",
    "dss_sweep",
    "dss_run",
    "normalize",
    "edge_dynamics_counts",
    "write_similarity",
]

Measure = Literal["cosine", "jaccard", "dice"]
MEASURES = ("cosine", "jaccard", "dice")

DEFAULT_TOLERANCE = 1e-12
# raw DSS is bounded by 2; normalization overshoot from rounding is clipped
DSS_RANGE = 2.0


@dataclass(frozen=True, eq=False)
class EdgeSimilarity:
    """One score per undirected edge, indexed by edge id."""

    scores: np.ndarray
    iteration: int = 0
    normalized: bool = False
    measure: str = "dss"

    def __post_init__(self):
        self.scores.flags.writeable = False

    def __len__(self) -> int:
        return len(self.scores)

    def score(self, g: Graph, u: int, v: int) -> float:
        """Score of ``(u, v)``; 0 for non-adjacent or identical vertices."""
        e = g.edge_id(u, v) if u != v else None
        return 0.0 if e is None else float(self.scores[e])


@dataclass
class DssTrace:
    """Per-iteration edge-dynamics record of a :func:`dss_run`.

    ``counts[i]`` and ``max_delta[i]`` describe iteration ``i + 1``.
    ``history`` holds the raw state of every iteration, starting at 0, when
    requested.
    """

    stability_tolerance: float = DEFAULT_TOLERANCE
    counts: list[tuple[int, int, int, int]] = field(default_factory=list)
    max_delta: list[float] = field(default_factory=list)
    converged_at: int | None = None
    iterations: int = 0
    history: list[np.ndarray] | None = None


def _split(m: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, m)) if m else 1
    bounds = np.linspace(0, m, workers + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]


def _over_edges(fn, m: int, workers: int, *args) -> None:
    ranges = _split(m, workers)
    if len(ranges) == 1:
        fn(*args, *ranges[0])
        return
    # kernels release the GIL and write disjoint slices
    with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
        for f in [pool.submit(fn, *args, lo, hi) for lo, hi in ranges]:
            f.result()


def _check_measure(measure: str) -> None:
    if measure not in MEASURES:
        raise DomainError(f"unknown measure {measure!r}, expected one of {MEASURES}")


def local_similarity(g: Graph, u: int, v: int, measure: Measure = "cosine") -> float:
    """Cosine, Jaccard or Dice similarity of the closed neighborhoods of ``u`` and ``v``.

    The pair need not be adjacent.
    """
    _check_measure(measure)
    if u == v:
        raise DomainError("local similarity is defined for distinct vertices")
    common = len(common_closed_neighbors(g, u, v))
    du, dv = g.closed_degree(u), g.closed_degree(v)
    if measure == "cosine":
        return common / math.sqrt(du * dv)
    if measure == "jaccard":
        return common / (du + dv - common)
    return 2.0 * common / (du + dv)


def local_similarities(g: Graph, measure: Measure = "cosine", workers: int = 1) -> EdgeSimilarity:
    """Local similarity of every edge; already in ``[0, 1]`` so marked normalized."""
    _check_measure(measure)
    m = g.edge_count
    common = np.empty(m, dtype=np.int64)
    _over_edges(_kernels.common_open_counts, m, workers, g.indptr, g.indices, g.src, g.dst, common)
    # both endpoints of an edge are in N[u] & N[v]
    closed = common + 2.0
    deg = g.degrees() + 1.0
    du, dv = deg[g.src], deg[g.dst]
    if measure == "cosine":
        scores = closed / np.sqrt(du * dv)
    elif measure == "jaccard":
        scores = closed / (du + dv - closed)
    else:
        scores = 2.0 * closed / (du + dv)
    return EdgeSimilarity(scores, iteration=0, normalized=True, measure=measure)


def dss_init(g: Graph, s: float = 1.0, use_weights: bool = False) -> EdgeSimilarity:
    """Initial DSS state: ``s`` on every edge, or the edge weights."""
    if not s > 0:
        raise DomainError(f"initial score s must be positive, got {s}")
    if use_weights:
        scores = np.array(g.weights, dtype=np.float64)
    else:
        scores = np.full(g.edge_count, float(s))
    return EdgeSimilarity(scores, iteration=0, normalized=False)


def dss_sweep(g: Graph, current: EdgeSimilarity, workers: int = 1) -> EdgeSimilarity:
    """Apply one fixed-point step to every edge; ``current`` is not modified."""
    if current.normalized:
        raise ContractError("cannot iterate a normalized similarity")
    if len(current) != g.edge_count:
        raise ContractError(f"state has {len(current)} scores for {g.edge_count} edges")
    # the entire working set: |V| vertex sums plus |E| new scores
    sums = np.empty(g.vertex_count)
    _kernels.vertex_sums(g.indptr, g.edge_ids, current.scores, sums)
    out = np.empty(g.edge_count)
    _over_edges(
        _kernels.dss_sweep_range,
        g.edge_count,
        workers,
        g.indptr,
        g.indices,
        g.edge_ids,
        g.src,
        g.dst,
        current.scores,
        sums,
        out,
    )
    return EdgeSimilarity(out, iteration=current.iteration + 1, normalized=False)


def dss_run(
    g: Graph,
    s: float = 1.0,
    iterations: int = 5,
    record_trace: bool = False,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    stop_early: bool = True,
    keep_history: bool = False,
    use_weights: bool = False,
    workers: int = 1,
) -> tuple[EdgeSimilarity, DssTrace]:
    """Iterate :func:`dss_sweep` up to ``iterations`` times from :func:`dss_init`.

    Every iteration each edge is classified by its change ``delta_t``:
    stable if ``|delta_t| < tolerance``; fluctuating if it also changed by at
    least ``tolerance`` in the previous iteration with the opposite sign;
    otherwise increasing or decreasing.  ``trace.converged_at`` is the
    first iteration at which every edge is stable.  With ``stop_early`` the
    run ends there, so ``iterations`` is a cap.

    The result is raw (not normalized).
    """
    if iterations < 1:
        raise DomainError(f"iterations must be >= 1, got {iterations}")
    if not tolerance > 0:
        raise DomainError(f"stability tolerance must be positive, got {tolerance}")
    state = dss_init(g, s, use_weights=use_weights)
    trace = DssTrace(stability_tolerance=tolerance)
    if keep_history:
        trace.history = [state.scores]
    prev_delta = None
    for t in range(1, iterations + 1):
        nxt = dss_sweep(g, state, workers=workers)
        delta = nxt.scores - state.scores
        moving = np.abs(delta) >= tolerance
        n_moving = int(moving.sum())
        if record_trace:
            up = moving & (delta > 0)
            if prev_delta is not None:
                flips = moving & (np.abs(prev_delta) >= tolerance) & (np.sign(delta) != np.sign(prev_delta))
            else:
                flips = np.zeros_like(moving)
            n_flip = int(flips.sum())
            n_up = int((up & ~flips).sum())
            n_down = n_moving - n_up - n_flip
            trace.counts.append((g.edge_count - n_moving, n_up, n_down, n_flip))
            trace.max_delta.append(float(np.abs(delta).max()) if len(delta) else 0.0)
        if keep_history:
            trace.history.append(nxt.scores)
        prev_delta = delta
        state = nxt
        trace.iterations = t
        if n_moving == 0 and trace.converged_at is None:
            trace.converged_at = t
            if stop_early:
                break
    return state, trace


def normalize(sim: EdgeSimilarity) -> EdgeSimilarity:
    """Map raw DSS scores from ``[0, 2]`` onto ``[0, 1]``.

    Rounding can push a raw score a few ulps above 2; the result is clipped
    to ``[0, 1]``.
    """
    if sim.normalized:
        raise ContractError("similarity is already normalized")
    scores = np.clip(sim.scores / DSS_RANGE, 0.0, 1.0)
    return EdgeSimilarity(scores, iteration=sim.iteration, normalized=True, measure=sim.measure)


def edge_dynamics_counts(trace: DssTrace) -> list[tuple[int, int, int, int, int]]:
    """Rows ``(iteration, stable, increasing, decreasing, fluctuating)``."""
    if not trace.counts:
        raise ContractError("trace is empty; run dss_run with record_trace=True")
    return [(t, *c) for t, c in enumerate(trace.counts, start=1)]


def write_similarity(g: Graph, sim: EdgeSimilarity, stream: IO[str]) -> None:
    """TSV ``label_u label_v score`` in edge-id order, after a state header."""
    stream.write(f"# iteration={sim.iteration} normalized={str(sim.normalized).lower()}\n")
    lab = g.labels
    for e, x in enumerate(sim.scores.tolist()):
        stream.write(f"{lab[g.src[e]]}\t{lab[g.dst[e]]}\t{x!r}\n")
