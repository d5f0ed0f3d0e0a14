"""Plan store construction and plan-reuse recommendations.

A PlanStore holds TF vectors, the DBSCAN model over them, and the
QEP hash of every stored query. A cluster's plan is the hash held by
the majority of its members (ties to the lowest query id). A new query
is matched 1-NN by cosine against every stored non-noise query; at or
above the threshold its best match's cluster plan is recommended,
otherwise the caller is told to optimize from scratch.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Optional, Union

from . import dbscan, query_text, similarity, tf_features
from .dbscan import NOISE, ClusteringParams, ClusterModel
from .errors import DuplicateId, InsufficientData
from .mr_engine import EngineConfig
from .query_text import Query
from .similarity import DistanceMatrix
from .tf_features import FeatureVector


@dataclass(frozen=True)
class ReusePlan:
    qep_hash: str
    cluster_id: int
    best_match_id: str
    similarity: float


@dataclass(frozen=True)
class OptimizeFresh:
    best_similarity: float


Recommendation = Union[ReusePlan, OptimizeFresh]


@dataclass(frozen=True)
class PlanStore:
    queries: tuple[Query, ...]
    vectors: dict[str, FeatureVector]
    matrix: DistanceMatrix
    model: ClusterModel
    plans: dict[str, str]  # query_id -> qep_hash
    cluster_plan: dict[int, str]
    params: ClusteringParams
    cfg: EngineConfig

    @property
    def default_threshold(self) -> float:
        # reuse decision tied to the clustering radius
        return 1.0 - self.params.eps


def _majority_plan(member_ids: list[str], plans: dict[str, str]) -> str:
    votes = Counter(plans[qid] for qid in member_ids)
    best_count = max(votes.values())
    tied = [plan for plan, count in votes.items() if count == best_count]
    if len(tied) == 1:
        return tied[0]
    for qid in sorted(member_ids):
        if plans[qid] in tied:
            return plans[qid]
    raise AssertionError("unreachable")


def build_store(queries: list[Query],
                params: ClusteringParams = ClusteringParams(),
                cfg: EngineConfig = EngineConfig()) -> PlanStore:
    """Cluster a labeled query set and derive per-cluster plans."""
    if len(queries) < 2:
        raise InsufficientData("need at least 2 queries to build a plan store")
    unlabeled = [q.id for q in queries if q.qep_hash is None]
    if unlabeled:
        raise InsufficientData(f"queries without qep_hash labels: {unlabeled[:5]}")
    seen = set()
    for q in queries:
        if q.id in seen:
            raise DuplicateId(f"duplicate query id {q.id!r}")
        seen.add(q.id)
    vectors = tf_features.featurize(list(queries), cfg)
    entries = similarity.pairwise_job(vectors, cfg)
    ids = sorted(v.query_id for v in vectors)
    matrix = similarity.to_distance_matrix(entries, ids)
    model = dbscan.cluster(matrix, params)
    plans = {q.id: q.qep_hash for q in queries}
    cluster_plan = {
        k: _majority_plan(model.members(k), plans)
        for k in range(model.n_clusters)
    }
    return PlanStore(
        queries=tuple(sorted(queries, key=lambda q: q.id)),
        vectors={v.query_id: v for v in vectors},
        matrix=matrix,
        model=model,
        plans=plans,
        cluster_plan=cluster_plan,
        params=params,
        cfg=cfg,
    )


def featurize_single(sql: str) -> FeatureVector:
    """TF vector of one statement computed in isolation (no engine)."""
    tokenized = query_text.tokenize_query(Query(id="", text=sql))
    counts = Counter(tokenized.terms)
    n = len(tokenized.terms)
    return FeatureVector(query_id="", weights={t: c / n for t, c in counts.items()})


def recommend(new_query: Query, store: PlanStore,
              threshold: Optional[float] = None) -> Recommendation:
    """1-NN match of a new query against the stored non-noise queries."""
    if threshold is None:
        threshold = store.default_threshold
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    vector = featurize_single(new_query.text)
    best_id: Optional[str] = None
    best_sim = 0.0
    for qid in sorted(store.vectors):
        if store.model.label_of(qid) == NOISE:
            continue
        sim = similarity.cosine(vector, store.vectors[qid])
        if sim > best_sim or best_id is None:
            best_id = qid
            best_sim = sim
    if best_id is None or best_sim < threshold:
        return OptimizeFresh(best_similarity=best_sim)
    cluster_id = store.model.label_of(best_id)
    return ReusePlan(
        qep_hash=store.cluster_plan[cluster_id],
        cluster_id=cluster_id,
        best_match_id=best_id,
        similarity=best_sim,
    )


def update_store(store: PlanStore, new_query: Query, fresh_qep_hash: str) -> PlanStore:
    """Add a freshly optimized query and recluster the whole set."""
    if new_query.id in store.plans:
        raise DuplicateId(f"duplicate query id {new_query.id!r}")
    labeled = replace(new_query, qep_hash=fresh_qep_hash)
    return build_store(list(store.queries) + [labeled], store.params, store.cfg)
