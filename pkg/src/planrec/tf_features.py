"""Term-frequency weighting of tokenized queries as a three-job chain.

Job 1 counts term occurrences per query, job 2 totals the terms of each
query, job 3 divides count by total. The weight of a term is its share
of the query's tokens, so every weight map sums to exactly 1 (up to one
binary64 division per term, performed once so results are independent of
executor and partitioning).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import mr_engine, query_text
from .errors import EmptyQuery, FeaturizeError, PlanrecError
from .mr_engine import EngineConfig, JobSpec
from .query_text import Query, TokenizedQuery


@dataclass(frozen=True)
class TermCount:
    term: str
    query_id: str
    count: int


@dataclass(frozen=True)
class QueryTotal:
    query_id: str
    n: int
    entries: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class FeatureVector:
    query_id: str
    weights: dict[str, float]

    def __post_init__(self):
        object.__setattr__(self, "weights", dict(self.weights))


# --------------------------------------------------------------------------
# Map/reduce functions (module-level so the parallel executor can pickle them)
# --------------------------------------------------------------------------

def _count_map(record):
    # record: (query_id, (term, term, ...))
    query_id, terms = record
    return [((term, query_id), 1) for term in terms]


def _count_reduce(key, counts):
    return [(key, sum(counts))]


def _totals_map(record):
    (term, query_id), count = record
    return [(query_id, (term, count))]


def _totals_reduce(query_id, entries):
    n = sum(count for _, count in entries)
    return [((query_id, n), (term, count)) for term, count in entries]


def _tf_map(record):
    (query_id, n), (term, count) = record
    return [(query_id, (term, count / n))]


def _tf_reduce(query_id, entries):
    return [(query_id, tuple(entries))]


def _count_job(partitions: int) -> JobSpec:
    return JobSpec(_count_map, _count_reduce, partitions=partitions)


def _totals_job(partitions: int) -> JobSpec:
    return JobSpec(_totals_map, _totals_reduce, partitions=partitions)


def _tf_job(partitions: int) -> JobSpec:
    return JobSpec(_tf_map, _tf_reduce, partitions=partitions)


def _as_records(tokenized: list[TokenizedQuery]) -> list:
    records = []
    for tq in tokenized:
        if not tq.terms:
            raise EmptyQuery(f"query {tq.id!r} has no tokens")
        records.append((tq.id, tuple(tq.terms)))
    return records


# --------------------------------------------------------------------------
# Per-stage operations
# --------------------------------------------------------------------------

def count_terms_job(tokenized: list[TokenizedQuery],
                    cfg: EngineConfig = EngineConfig()) -> list[TermCount]:
    out = mr_engine.run_job(_as_records(tokenized), _count_job(_partitions(cfg)), cfg)
    return [TermCount(term=term, query_id=qid, count=count)
            for (term, qid), count in out]


def query_totals_job(counts: list[TermCount],
                     cfg: EngineConfig = EngineConfig()) -> list[QueryTotal]:
    records = [((tc.term, tc.query_id), tc.count) for tc in counts]
    out = mr_engine.run_job(records, _totals_job(_partitions(cfg)), cfg)
    totals: dict[str, QueryTotal] = {}
    grouped: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for key, entry in out:
        grouped.setdefault(key, []).append(entry)
    for (query_id, n), entries in sorted(grouped.items()):
        totals[query_id] = QueryTotal(query_id=query_id, n=n, entries=tuple(entries))
    return [totals[qid] for qid in sorted(totals)]


def tf_job(totals: list[QueryTotal],
           cfg: EngineConfig = EngineConfig()) -> list[FeatureVector]:
    records = [((qt.query_id, qt.n), entry) for qt in totals for entry in qt.entries]
    out = mr_engine.run_job(records, _tf_job(_partitions(cfg)), cfg)
    return [FeatureVector(query_id=qid, weights=dict(entries)) for qid, entries in out]


def _partitions(cfg: EngineConfig) -> int:
    return max(1, cfg.workers)


# --------------------------------------------------------------------------
# End-to-end featurization
# --------------------------------------------------------------------------

def featurize_report(queries: list[Query],
                     cfg: EngineConfig = EngineConfig()
                     ) -> tuple[list[FeatureVector], dict[str, PlanrecError]]:
    """Normalize, tokenize, and TF-weight a query batch.

    Queries that fail to parse are excluded and reported in the second
    return value; the batch fails only if every query fails.
    """
    tokenized = []
    failures: dict[str, PlanrecError] = {}
    for query in queries:
        try:
            tokenized.append(query_text.tokenize_query(query))
        except PlanrecError as exc:
            failures[query.id] = exc
    if queries and not tokenized:
        raise FeaturizeError(failures)
    jobs = [_count_job(_partitions(cfg)), _totals_job(_partitions(cfg)),
            _tf_job(_partitions(cfg))]
    out = mr_engine.chain(jobs, _as_records(tokenized), cfg)
    vectors = [FeatureVector(query_id=qid, weights=dict(entries))
               for qid, entries in out]
    vectors.sort(key=lambda v: v.query_id)
    return vectors, failures


def featurize(queries: list[Query], cfg: EngineConfig = EngineConfig()) -> list[FeatureVector]:
    vectors, _ = featurize_report(queries, cfg)
    return vectors


# --------------------------------------------------------------------------
# Persistence: one "query_id \t term \t tf" line per weight, %.17g floats
# --------------------------------------------------------------------------

def save_vectors(path, vectors: list[FeatureVector]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for vector in vectors:
            for term in sorted(vector.weights):
                fh.write(f"{vector.query_id}\t{term}\t{vector.weights[term]:.17g}\n")


def load_vectors(path) -> list[FeatureVector]:
    weights: dict[str, dict[str, float]] = {}
    order: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            query_id, term, tf = line.split("\t")
            if query_id not in weights:
                weights[query_id] = {}
                order.append(query_id)
            weights[query_id][term] = float(tf)
    return [FeatureVector(query_id=qid, weights=weights[qid]) for qid in order]
