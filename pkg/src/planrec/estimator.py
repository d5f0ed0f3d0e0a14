"""Scikit-learn style front end for the plan recommender.

QueryPlanRecommender wraps build_store/recommend behind fit/predict so
the pipeline composes with sklearn tooling (get_params/set_params,
clone). X is a sequence of SQL strings or Query objects; y supplies the
QEP hash labels when X is plain strings.
"""

from __future__ import annotations

from typing import Optional, Sequence

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import recommender
from .dbscan import ClusteringParams
from .mr_engine import PARALLEL, SEQUENTIAL, EngineConfig
from .query_text import Query
from .recommender import PlanStore, ReusePlan


def _as_queries(X: Sequence, y: Optional[Sequence] = None) -> list[Query]:
    queries = []
    for i, item in enumerate(X):
        if isinstance(item, Query):
            query = item
        else:
            query = Query(id=f"q{i:06d}", text=str(item))
        if y is not None:
            query = Query(id=query.id, text=query.text, qep_hash=str(y[i]))
        queries.append(query)
    return queries


class QueryPlanRecommender(BaseEstimator):
    """Clusters labeled SQL queries and predicts reusable plan hashes.

    predict returns the recommended qep_hash per input query, or None
    where the query is too dissimilar and needs fresh optimization.
    """

    def __init__(self, eps: float = 0.5, min_pts: int = 3,
                 threshold: Optional[float] = None,
                 workers: int = 1, shuffle: str = "memory"):
        self.eps = eps
        self.min_pts = min_pts
        self.threshold = threshold
        self.workers = workers
        self.shuffle = shuffle

    def _engine_config(self) -> EngineConfig:
        executor = PARALLEL if self.workers > 1 else SEQUENTIAL
        return EngineConfig(executor=executor, workers=self.workers,
                            shuffle=self.shuffle)

    def fit(self, X: Sequence, y: Optional[Sequence] = None) -> "QueryPlanRecommender":
        if y is not None and len(y) != len(X):
            raise ValueError("X and y length mismatch")
        queries = _as_queries(X, y)
        params = ClusteringParams(eps=self.eps, min_pts=self.min_pts)
        self.store_ = recommender.build_store(queries, params, self._engine_config())
        self.labels_ = list(self.store_.model.labels)
        return self

    def _check_fitted(self) -> PlanStore:
        store = getattr(self, "store_", None)
        if store is None:
            raise NotFittedError("fit the recommender before calling predict")
        return store

    def predict(self, X: Sequence) -> list[Optional[str]]:
        store = self._check_fitted()
        out = []
        for query in _as_queries(X):
            verdict = recommender.recommend(query, store, threshold=self.threshold)
            out.append(verdict.qep_hash if isinstance(verdict, ReusePlan) else None)
        return out

    def recommendations(self, X: Sequence) -> list[recommender.Recommendation]:
        """Full verdicts (similarity, matched cluster) per input query."""
        store = self._check_fitted()
        return [recommender.recommend(q, store, threshold=self.threshold)
                for q in _as_queries(X)]
