"""Density-based clustering over a precomputed distance matrix.

Classic DBSCAN with a deterministic scan: points are visited in
ascending index order, a cluster is grown from each unvisited core
point, and border points reachable from several clusters stay with the
cluster discovered first. Boundary distances exactly equal to eps count
as inside the neighborhood.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput
from .similarity import DistanceMatrix

NOISE = -1


@dataclass(frozen=True)
class ClusteringParams:
    eps: float = 0.5
    min_pts: int = 3

    def __post_init__(self):
        if not 0.0 < self.eps <= 1.0:
            raise ValueError("eps must be in (0, 1]")
        if self.min_pts < 1:
            raise ValueError("min_pts must be >= 1")


@dataclass(frozen=True)
class ClusterModel:
    ids: tuple[str, ...]
    labels: tuple[int, ...]  # cluster id >= 0, or NOISE
    params: ClusteringParams

    @property
    def n_clusters(self) -> int:
        return max(self.labels, default=NOISE) + 1

    def label_of(self, query_id: str) -> int:
        return self.labels[self.ids.index(query_id)]

    def members(self, cluster: int) -> list[str]:
        return [qid for qid, label in zip(self.ids, self.labels) if label == cluster]


def eps_neighborhood(matrix: DistanceMatrix, p: int, eps: float) -> set[int]:
    """Indices within eps of p, including p itself."""
    return set(np.flatnonzero(matrix.d[p] <= eps).tolist())


def is_core(matrix: DistanceMatrix, p: int, params: ClusteringParams) -> bool:
    return len(eps_neighborhood(matrix, p, params.eps)) >= params.min_pts


def cluster(matrix: DistanceMatrix, params: ClusteringParams) -> ClusterModel:
    n = len(matrix.ids)
    if n == 0:
        raise EmptyInput("cannot cluster zero points")
    labels = np.full(n, NOISE, dtype=int)
    visited = np.zeros(n, dtype=bool)
    next_cluster = 0
    for p in range(n):
        if visited[p]:
            continue
        visited[p] = True
        neighbors = eps_neighborhood(matrix, p, params.eps)
        if len(neighbors) < params.min_pts:
            continue  # noise unless later claimed as a border point
        labels[p] = next_cluster
        seeds = sorted(neighbors - {p})
        while seeds:
            q = seeds.pop(0)
            if labels[q] == NOISE:
                labels[q] = next_cluster  # border point
            if visited[q]:
                continue
            visited[q] = True
            labels[q] = next_cluster
            q_neighbors = eps_neighborhood(matrix, q, params.eps)
            if len(q_neighbors) >= params.min_pts:
                seeds.extend(sorted(q_neighbors - set(seeds) - {q}))
        next_cluster += 1
    return ClusterModel(ids=tuple(matrix.ids), labels=tuple(labels.tolist()),
                        params=params)


# --------------------------------------------------------------------------
# Persistence: one "query_id \t label" line, label "noise" or cluster int
# --------------------------------------------------------------------------

def save_model(path, model: ClusterModel) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for qid, label in zip(model.ids, model.labels):
            fh.write(f"{qid}\t{'noise' if label == NOISE else label}\n")


def load_model(path, params: ClusteringParams) -> ClusterModel:
    ids = []
    labels = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            qid, label = line.split("\t")
            ids.append(qid)
            labels.append(NOISE if label == "noise" else int(label))
    return ClusterModel(ids=tuple(ids), labels=tuple(labels), params=params)
