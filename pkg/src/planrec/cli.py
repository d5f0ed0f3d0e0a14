"""Command-line surface: thin composition of the library operations.

Exit codes: 0 success, 1 usage error, 2 data/parse error.
"""

from __future__ import annotations

import argparse
import sys

from . import datagen_bench, dbscan, persistence, query_text, recommender
from . import similarity as similarity_mod
from . import tf_features
from .dbscan import ClusteringParams
from .errors import PlanrecError
from .mr_engine import DISK_SPILL, IN_MEMORY, PARALLEL, SEQUENTIAL, EngineConfig
from .query_text import Query
from .recommender import OptimizeFresh, ReusePlan


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _engine_config(args) -> EngineConfig:
    executor = PARALLEL if args.workers > 1 else SEQUENTIAL
    shuffle = DISK_SPILL if args.shuffle == "disk" else IN_MEMORY
    return EngineConfig(executor=executor, workers=args.workers, shuffle=shuffle)


def _add_engine_flags(parser) -> None:
    parser.add_argument("--workers", type=int, default=1, metavar="N")
    parser.add_argument("--shuffle", choices=["memory", "disk"], default="memory")


def _add_cluster_flags(parser) -> None:
    parser.add_argument("--eps", type=float, default=0.5, metavar="F")
    parser.add_argument("--min-pts", type=int, default=3, metavar="K")


def split_counts(total: int, classes: int) -> list[int]:
    """Near-uniform split of total over classes."""
    base, extra = divmod(total, classes)
    return [base + (1 if i < extra else 0) for i in range(classes)]


def build_parser() -> _Parser:
    parser = _Parser(prog="planrec",
                     description="SQL query clustering and plan-reuse recommendation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="instantiate templates into a query set file")
    p.add_argument("templates", help="template manifest (JSON)")
    p.add_argument("output", help="query set file to write")
    p.add_argument("--counts", help="comma-separated per-template counts")
    p.add_argument("--per-class", type=int, default=10, metavar="N")
    p.add_argument("--seed", type=int, default=0, metavar="S")

    p = sub.add_parser("featurize", help="queries -> TF vectors file")
    p.add_argument("queries")
    p.add_argument("output")
    _add_engine_flags(p)

    p = sub.add_parser("similarity", help="vectors -> distance matrix file")
    p.add_argument("vectors")
    p.add_argument("output")
    _add_engine_flags(p)

    p = sub.add_parser("cluster", help="distance matrix -> cluster labels file")
    p.add_argument("matrix")
    p.add_argument("output")
    _add_cluster_flags(p)

    p = sub.add_parser("build", help="labeled queries -> plan store workspace")
    p.add_argument("queries")
    p.add_argument("workspace")
    _add_engine_flags(p)
    _add_cluster_flags(p)

    p = sub.add_parser("recommend", help="workspace + SQL -> verdict on stdout")
    p.add_argument("workspace")
    p.add_argument("sql")
    p.add_argument("--threshold", type=float, default=None, metavar="F")

    p = sub.add_parser("bench", help="benchmark manifest -> CSV report")
    p.add_argument("manifest", help="benchmark manifest (JSON)")
    p.add_argument("output", help="CSV report to write")
    p.add_argument("--seed", type=int, default=0, metavar="S")

    return parser


def _cmd_gen(args) -> int:
    templates = datagen_bench.load_templates(args.templates)
    if args.counts:
        counts = [int(c) for c in args.counts.split(",")]
    else:
        counts = [args.per_class] * len(templates)
    queries = datagen_bench.generate(templates, counts, seed=args.seed)
    query_text.write_query_file(args.output, queries)
    print(f"wrote {len(queries)} queries to {args.output}")
    return 0


def _cmd_featurize(args) -> int:
    queries = query_text.read_query_file(args.queries)
    vectors, failures = tf_features.featurize_report(queries, _engine_config(args))
    for qid, exc in sorted(failures.items()):
        print(f"skipped {qid}: {exc}", file=sys.stderr)
    tf_features.save_vectors(args.output, vectors)
    print(f"wrote {len(vectors)} vectors to {args.output}")
    return 0


def _cmd_similarity(args) -> int:
    vectors = tf_features.load_vectors(args.vectors)
    entries = similarity_mod.pairwise_job(vectors, _engine_config(args))
    matrix = similarity_mod.to_distance_matrix(
        entries, sorted(v.query_id for v in vectors))
    similarity_mod.save_matrix(args.output, matrix)
    print(f"wrote {len(matrix.ids)}x{len(matrix.ids)} matrix to {args.output}")
    return 0


def _cmd_cluster(args) -> int:
    matrix = similarity_mod.load_matrix(args.matrix)
    params = ClusteringParams(eps=args.eps, min_pts=args.min_pts)
    model = dbscan.cluster(matrix, params)
    dbscan.save_model(args.output, model)
    noise = sum(1 for label in model.labels if label == dbscan.NOISE)
    print(f"{model.n_clusters} clusters, {noise} noise points -> {args.output}")
    return 0


def _cmd_build(args) -> int:
    queries = query_text.read_query_file(args.queries)
    params = ClusteringParams(eps=args.eps, min_pts=args.min_pts)
    store = recommender.build_store(queries, params, _engine_config(args))
    persistence.save_store(args.workspace, store)
    print(f"built workspace {args.workspace}: {len(store.queries)} queries, "
          f"{store.model.n_clusters} clusters")
    return 0


def _cmd_recommend(args) -> int:
    store = persistence.load_store(args.workspace)
    verdict = recommender.recommend(Query(id="__probe__", text=args.sql),
                                    store, threshold=args.threshold)
    if isinstance(verdict, ReusePlan):
        print(f"ReusePlan\t{verdict.qep_hash}\t{verdict.cluster_id}"
              f"\t{verdict.best_match_id}\t{verdict.similarity:.17g}")
    else:
        print(f"OptimizeFresh\t{verdict.best_similarity:.17g}")
    return 0


def _cmd_bench(args) -> int:
    import json

    with open(args.manifest, encoding="utf-8") as fh:
        spec = json.load(fh)
    sets = {}
    for entry in spec["sets"]:
        templates = datagen_bench.make_templates(
            entry["classes"], overlap=entry.get("overlap", 0.0))
        counts = split_counts(entry["total"], entry["classes"])
        sets[entry["name"]] = datagen_bench.generate(
            templates, counts, seed=spec.get("seed", args.seed))
    params = ClusteringParams(eps=spec.get("eps", 0.5),
                              min_pts=spec.get("min_pts", 2))
    report = datagen_bench.run_benchmark(
        sets,
        worker_counts=spec.get("workers", [1, 4]),
        modes=spec.get("modes", ["memory", "disk"]),
        params=params,
        repeats=spec.get("repeats", 5),
    )
    report.write_csv(args.output)
    for key, exc in report.errors.items():
        print(f"cell {key} failed: {exc}", file=sys.stderr)
    print(f"wrote {len(report.rows)} rows to {args.output}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "featurize": _cmd_featurize,
    "similarity": _cmd_similarity,
    "cluster": _cmd_cluster,
    "build": _cmd_build,
    "recommend": _cmd_recommend,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except PlanrecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
