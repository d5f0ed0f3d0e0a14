"""SQL query clustering and execution-plan reuse over an embedded
map/reduce engine."""

from .dbscan import NOISE, ClusteringParams, ClusterModel, cluster
from .errors import PlanrecError
from .estimator import QueryPlanRecommender
from .mr_engine import (DISK_SPILL, IN_MEMORY, PARALLEL, SEQUENTIAL,
                        EngineConfig, JobSpec, chain, run_job)
from .persistence import load_store, save_store
from .query_text import Query, TokenizedQuery, normalize, tokenize, tokenize_query
from .recommender import (OptimizeFresh, PlanStore, ReusePlan, build_store,
                          recommend, update_store)
from .similarity import DistanceMatrix, cosine, pairwise_job, to_distance_matrix
from .tf_features import FeatureVector, featurize

__version__ = "0.1.0"

__all__ = [
    "NOISE", "ClusteringParams", "ClusterModel", "cluster",
    "PlanrecError", "QueryPlanRecommender",
    "DISK_SPILL", "IN_MEMORY", "PARALLEL", "SEQUENTIAL",
    "EngineConfig", "JobSpec", "chain", "run_job",
    "load_store", "save_store",
    "Query", "TokenizedQuery", "normalize", "tokenize", "tokenize_query",
    "OptimizeFresh", "PlanStore", "ReusePlan", "build_store", "recommend",
    "update_store",
    "DistanceMatrix", "cosine", "pairwise_job", "to_distance_matrix",
    "FeatureVector", "featurize",
    "__version__",
]
