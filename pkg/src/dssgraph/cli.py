"""Command-line entry point: ``dssgraph <command> ...``.

Every output file starts with ``#`` comment lines recording the version,
the arguments and the resolved parameters, and contains nothing
time-dependent, so identical invocations produce identical bytes.

Exit codes: 0 success, 1 usage error, 2 input error, 3 contract violation.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import IO, Iterator, Sequence

import numpy as np

from . import __version__
from .errors import ContractError, DomainError, GraphFormatError
from .graph import Graph, read_edge_list, write_edge_list, write_label_map
from .metrics import (
    Partition,
    clustering_to_partition,
    evaluate,
    read_partition,
    size_histograms,
    write_partition,
    write_report,
)
from .scan import ScanParams, scan_cluster, write_clustering
from .similarity import (
    DEFAULT_TOLERANCE,
    MEASURES,
    dss_run,
    edge_dynamics_counts,
    local_similarities,
    normalize,
    write_similarity,
)
from .synth import GENERATOR_VERSION, PlantedSpec, generate_planted

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_CONTRACT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_range(text: str) -> list[float]:
    """``start:stop:step`` inclusive of ``stop`` (within 1e-9 of a step), or a comma list."""
    try:
        if ":" not in text:
            return [float(x) for x in text.split(",")]
        start, stop, step = map(float, text.split(":"))
    except ValueError:
        raise UsageError(f"bad range {text!r}, expected start:stop:step or a comma list") from None
    if step <= 0 or stop < start:
        raise UsageError(f"bad range {text!r}, need step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def parse_int_list(text: str) -> list[int]:
    if ":" in text:
        return [int(round(x)) for x in parse_range(text)]
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad integer list {text!r}") from None


@contextlib.contextmanager
def _open_out(path: str | None) -> Iterator[IO[str]]:
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yield fh


def _header(stream: IO[str], argv: Sequence[str], params: dict) -> None:
    stream.write(f"# dssgraph {__version__}\n")
    stream.write(f"# command: dssgraph {shlex.join(argv)}\n")
    stream.write("# params: " + " ".join(f"{k}={v}" for k, v in params.items()) + "\n")


def _load_truth(path: str | None, g: Graph) -> Partition | None:
    if path is None:
        return None
    with open(path, encoding="utf-8") as fh:
        return Partition.from_mapping(read_partition(fh), g)


def _similarity_for(g: Graph, measure: str, iters: int, s: float, workers: int):
    if measure == "dss":
        raw, _ = dss_run(g, s, iters, stop_early=False, workers=workers)
        return raw
    return local_similarities(g, measure, workers=workers)


def cmd_similarity(args, argv) -> None:
    g = read_edge_list(args.graph)
    sim = _similarity_for(g, args.measure, args.iters, args.s, args.workers)
    if args.measure == "dss" and not args.raw:
        sim = normalize(sim)
    params = {"measure": args.measure}
    if args.measure == "dss":
        params.update(iters=args.iters, s=args.s, normalized=not args.raw)
    with _open_out(args.output) as out:
        _header(out, argv, params)
        write_similarity(g, sim, out)
    if args.label_map:
        with open(args.label_map, "w", encoding="utf-8") as fh:
            write_label_map(g, fh)


def _scan_params(args) -> ScanParams:
    return ScanParams(
        epsilon=args.eps,
        mu=args.mu,
        dss_iterations=args.iters,
        mu_fraction=args.mu_fraction,
    )


def cmd_cluster(args, argv) -> None:
    params = _scan_params(args)
    g = read_edge_list(args.graph)
    truth = _load_truth(args.truth, g)
    if args.algo == "iscan":
        sim = normalize(_similarity_for(g, "dss", params.dss_iterations, 1.0, args.workers))
    else:
        sim = local_similarities(g, args.measure, workers=args.workers)
    c = scan_cluster(g, sim, params)
    meta = {"algo": args.algo, "eps": params.epsilon, "mu": params.mu}
    if params.mu_fraction is not None:
        meta["mu_fraction"] = params.mu_fraction
    if args.algo == "iscan":
        meta["iters"] = params.dss_iterations
    else:
        meta["measure"] = args.measure
    with _open_out(args.output) as out:
        _header(out, argv, meta)
        write_clustering(g, c, out)
    if truth is None and not args.report:
        return
    score = evaluate(g, clustering_to_partition(c), truth)
    if args.report:
        with _open_out(args.report) as rep:
            _header(rep, argv, meta)
            write_report(score, rep)
    else:
        # stdout may already carry the clustering
        write_report(score, sys.stdout if args.output not in (None, "-") else sys.stderr)


def cmd_eval(args, argv) -> None:
    with open(args.estimated, encoding="utf-8") as fh:
        est_map = read_partition(fh)
    with open(args.truth, encoding="utf-8") as fh:
        real_map = read_partition(fh)
    if set(est_map) != set(real_map):
        raise DomainError("the two partition files cover different vertex sets")
    if args.graph:
        g = read_edge_list(args.graph)
        missing = set(g.labels.tolist()) - set(est_map)
        if missing:
            raise DomainError(f"{len(missing)} graph vertices are missing from the partitions")
        extra = set(est_map) - set(g.labels.tolist())
        if extra:
            raise DomainError(f"{len(extra)} partition vertices are not in the graph")
        order = g.labels.tolist()
    else:
        g = None
        order = sorted(est_map)
    est = Partition(np.array([est_map[v] for v in order], dtype=np.int64))
    real = Partition(np.array([real_map[v] for v in order], dtype=np.int64))
    score = evaluate(g, est, real)
    with _open_out(args.output) as out:
        _header(out, argv, {"graph": args.graph is not None})
        write_report(score, out)
    if args.histogram:
        with _open_out(args.histogram) as out:
            _header(out, argv, {})
            out.write("size\tcount_est\tcount_real\n")
            for size, ce, cr in size_histograms(est, real):
                out.write(f"{size}\t{ce}\t{cr}\n")


def cmd_dynamics(args, argv) -> None:
    g = read_edge_list(args.graph)
    _, trace = dss_run(
        g,
        args.s,
        args.iters,
        record_trace=True,
        tolerance=args.tol,
        stop_early=not args.no_early_stop,
        workers=args.workers,
    )
    rows = edge_dynamics_counts(trace)
    with _open_out(args.output) as out:
        _header(out, argv, {"iters": args.iters, "s": args.s, "tol": args.tol, "edges": g.edge_count})
        out.write(f"# converged_at={trace.converged_at}\n")
        out.write("iteration,stable,increasing,decreasing,fluctuating,max_abs_delta\n")
        for row, md in zip(rows, trace.max_delta):
            out.write(",".join(map(str, row)) + f",{md!r}\n")


def cmd_generate(args, argv) -> None:
    sizes = parse_int_list(args.sizes)
    spec = PlantedSpec(sizes, args.p_in, args.p_out, args.seed)
    g, truth = generate_planted(spec)
    meta = {
        "generator": GENERATOR_VERSION,
        "sizes": ",".join(map(str, sizes)),
        "p_in": args.p_in,
        "p_out": args.p_out,
        "seed": args.seed,
        "vertices": g.vertex_count,
        "edges": g.edge_count,
    }
    with _open_out(args.output) as out:
        _header(out, argv, meta)
        write_edge_list(g, out)
    if args.truth_out:
        with _open_out(args.truth_out) as out:
            _header(out, argv, meta)
            write_partition(g, truth, out)


def _sweep_cell(g, truth, sim, algo, iters, eps, mu, mu_fraction):
    c = scan_cluster(g, sim, ScanParams(eps, mu, max(iters, 1), mu_fraction))
    score = evaluate(g, clustering_to_partition(c), truth)
    return (
        f"{algo}\t{iters}\t{eps!r}\t{score.nmi!r}\t{score.modularity!r}\t{score.size_mse!r}\t"
        f"{score.community_count}\t{score.singleton_count}\n"
    )


def cmd_sweep(args, argv) -> None:
    eps_grid = parse_range(args.eps)
    iters_grid = parse_int_list(args.iters)
    algos = ["scan", "iscan"] if args.algo == "both" else [args.algo]
    if any(not 0.0 <= eps <= 1.0 for eps in eps_grid):
        raise UsageError(f"--eps values must lie in [0, 1], got {args.eps}")
    if any(t < 1 for t in iters_grid):
        raise UsageError(f"--iters values must be >= 1, got {args.iters}")
    g = read_edge_list(args.graph)
    truth = _load_truth(args.truth, g)

    cells = []
    for algo in algos:
        if algo == "scan":
            sim = local_similarities(g, args.measure, workers=args.workers)
            cells += [(sim, algo, 0, eps) for eps in eps_grid]
        else:
            # one DSS run per T, reused across the epsilon grid
            for t in iters_grid:
                sim = normalize(_similarity_for(g, "dss", t, 1.0, args.workers))
                cells += [(sim, algo, t, eps) for eps in eps_grid]
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        rows = list(
            pool.map(
                lambda c: _sweep_cell(g, truth, c[0], c[1], c[2], c[3], args.mu, args.mu_fraction),
                cells,
            )
        )
    with _open_out(args.output) as out:
        _header(
            out,
            argv,
            {"algo": args.algo, "eps": args.eps, "iters": args.iters, "mu": args.mu, "measure": args.measure},
        )
        out.write("algo\titers\teps\tnmi\tmodularity\tsize_mse\tcommunity_count\tsingleton_count\n")
        out.writelines(rows)


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _unit_float(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in [0, 1], got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dssgraph", description="Dynamic structural similarity and SCAN/ISCAN clustering.")
    p.add_argument("--version", action="version", version=f"dssgraph {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log load warnings and progress")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, graph=True):
        if graph:
            sp.add_argument("graph", help="edge list 'u v [w]'")
        sp.add_argument("-o", "--output", help="output path (default stdout)")
        sp.add_argument("--workers", type=_positive_int, default=1, help="threads for edge kernels")

    sp = sub.add_parser("similarity", help="per-edge similarity scores")
    common(sp)
    sp.add_argument("--measure", choices=[*MEASURES, "dss"], default="dss")
    sp.add_argument("--iters", type=_positive_int, default=5)
    sp.add_argument("--s", type=_positive_float, default=1.0, help="initial DSS score")
    sp.add_argument("--raw", action="store_true", help="skip normalization of DSS scores")
    sp.add_argument("--label-map", help="also write internal id / label TSV here")
    sp.set_defaults(func=cmd_similarity)

    sp = sub.add_parser("cluster", help="SCAN or ISCAN clustering")
    common(sp)
    sp.add_argument("--algo", choices=["scan", "iscan"], default="iscan")
    sp.add_argument("--eps", type=_unit_float, default=0.5)
    sp.add_argument("--mu", type=_positive_int, default=2)
    sp.add_argument("--mu-fraction", type=_unit_float, default=None, help="fractional core rule")
    sp.add_argument("--iters", type=_positive_int, default=5)
    sp.add_argument("--measure", choices=MEASURES, default="cosine", help="local measure for scan")
    sp.add_argument("--truth", help="ground-truth 'label community' file")
    sp.add_argument("--report", help="evaluation line output path")
    sp.set_defaults(func=cmd_cluster)

    sp = sub.add_parser("eval", help="score one partition file against another")
    common(sp, graph=False)
    sp.add_argument("estimated")
    sp.add_argument("truth")
    sp.add_argument("--graph", help="edge list, enables modularity")
    sp.add_argument("--histogram", help="size histogram TSV output path")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("dynamics", help="stable/increasing/decreasing/fluctuating edge counts")
    common(sp)
    sp.add_argument("--iters", type=_positive_int, default=100)
    sp.add_argument("--s", type=_positive_float, default=1.0)
    sp.add_argument("--tol", type=_positive_float, default=DEFAULT_TOLERANCE)
    sp.add_argument("--no-early-stop", action="store_true")
    sp.set_defaults(func=cmd_dynamics)

    sp = sub.add_parser("generate", help="planted-partition graph and ground truth")
    common(sp, graph=False)
    sp.add_argument("--sizes", required=True, help="community sizes, e.g. 20,20,20")
    sp.add_argument("--p-in", type=_unit_float, required=True)
    sp.add_argument("--p-out", type=_unit_float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--truth-out", help="ground-truth output path")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("sweep", help="evaluate SCAN/ISCAN over an epsilon (and T) grid")
    common(sp)
    sp.add_argument("--truth")
    sp.add_argument("--algo", choices=["scan", "iscan", "both"], default="both")
    sp.add_argument("--eps", default="0.1:0.9:0.05")
    sp.add_argument("--iters", default="5", help="T values: 5, 1,3,5 or 1:9:2")
    sp.add_argument("--mu", type=_positive_int, default=2)
    sp.add_argument("--mu-fraction", type=_unit_float, default=None)
    sp.add_argument("--measure", choices=MEASURES, default="cosine")
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="dssgraph: %(levelname)s: %(message)s",
    )
    try:
        args.func(args, argv)
    except UsageError as exc:
        print(f"dssgraph: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphFormatError, DomainError, OSError, ValueError) as exc:
        print(f"dssgraph: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ContractError as exc:
        print(f"dssgraph: contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
