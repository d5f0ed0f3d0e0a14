"""Cosine similarity over TF vectors and the derived distance matrix.

The dot product runs over the intersection of term keys (absent terms
contribute zero) in sorted term order, so cosine(a, b) == cosine(b, a)
exactly. Distance is 1 - cosine, which keeps DBSCAN's eps interpretable
in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import mr_engine
from .errors import EmptyInput, MissingPair, ZeroVector
from .mr_engine import EngineConfig, JobSpec
from .tf_features import FeatureVector


@dataclass(frozen=True)
class SimilarityEntry:
    q1: str
    q2: str
    cosine: float


@dataclass
class DistanceMatrix:
    ids: list[str]
    d: np.ndarray  # symmetric, zero diagonal, entries in [0, 1]

    def index_of(self, query_id: str) -> int:
        return self.ids.index(query_id)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistanceMatrix):
            return NotImplemented
        return self.ids == other.ids and np.array_equal(self.d, other.d)


def _norm(vector: FeatureVector) -> float:
    return math.sqrt(sum(w * w for w in vector.weights.values()))


def _dot_over_norms(w1: dict, w2: dict, n1: float, n2: float) -> float:
    if w1 == w2:
        return 1.0  # identical vectors must not round below 1
    small, large = w1, w2
    if len(small) > len(large):
        small, large = large, small
    dot = 0.0
    for term in sorted(small):
        other = large.get(term)
        if other is not None:
            dot += small[term] * other
    return min(1.0, max(0.0, dot / (n1 * n2)))


def cosine(v1: FeatureVector, v2: FeatureVector) -> float:
    """Cosine of the angle between two TF vectors, clamped to [0, 1]."""
    n1 = _norm(v1)
    n2 = _norm(v2)
    if n1 == 0.0 or n2 == 0.0:
        raise ZeroVector(f"zero-norm vector for {v1.query_id if n1 == 0.0 else v2.query_id!r}")
    return _dot_over_norms(v1.weights, v2.weights, n1, n2)


# --------------------------------------------------------------------------
# All-pairs job. The mapper shards rows into blocks; the reducer computes
# the cosines for each block's rows against all higher rows. Rows are
# interleaved from both ends of the index range so every block carries
# about the same amount of pair work.
# --------------------------------------------------------------------------

def _block_map(record):
    block_id, rows = record
    return [(block_id, rows)]


def _block_reduce(data, block_id, row_lists):
    # data: ((query_id, weights, norm), ...) sorted by query_id
    out = []
    n = len(data)
    for rows in row_lists:
        for i in rows:
            qid_i, w_i, norm_i = data[i]
            for j in range(i + 1, n):
                qid_j, w_j, norm_j = data[j]
                out.append(((qid_i, qid_j),
                            _dot_over_norms(w_i, w_j, norm_i, norm_j)))
    return out


def _balanced_rows(n: int) -> list[int]:
    rows = []
    lo, hi = 0, n - 1
    while lo < hi:
        rows.append(lo)
        rows.append(hi)
        lo += 1
        hi -= 1
    if lo == hi:
        rows.append(lo)
    return rows


def pairwise_job(vectors: list[FeatureVector],
                 cfg: EngineConfig = EngineConfig()) -> list[SimilarityEntry]:
    """All C(n, 2) cosine similarities, each pair once with q1 < q2."""
    if len(vectors) < 2:
        raise EmptyInput("need at least 2 vectors for pairwise similarity")
    ordered = sorted(vectors, key=lambda v: v.query_id)
    data = []
    for vector in ordered:
        norm = _norm(vector)
        if norm == 0.0:
            raise ZeroVector(f"zero-norm vector for {vector.query_id!r}")
        data.append((vector.query_id, vector.weights, norm))
    rows = _balanced_rows(len(ordered))
    n_blocks = min(len(rows), max(1, cfg.workers) * 4)
    size = -(-len(rows) // n_blocks)
    records = [(b, tuple(rows[b * size:(b + 1) * size])) for b in range(n_blocks)]
    job = JobSpec(_block_map, partial(_block_reduce, tuple(data)),
                  partitions=n_blocks)
    out = mr_engine.run_job(records, job, cfg)
    return [SimilarityEntry(q1=q1, q2=q2, cosine=value) for (q1, q2), value in out]


def to_distance_matrix(entries: list[SimilarityEntry], ids: list[str]) -> DistanceMatrix:
    """Distance d = 1 - cosine over the given id order."""
    if not ids:
        raise EmptyInput("no query ids")
    index = {qid: i for i, qid in enumerate(ids)}
    n = len(ids)
    d = np.full((n, n), np.nan)
    np.fill_diagonal(d, 0.0)
    for entry in entries:
        i = index.get(entry.q1)
        j = index.get(entry.q2)
        if i is None or j is None:
            continue
        d[i, j] = d[j, i] = 1.0 - entry.cosine
    missing = np.argwhere(np.isnan(d))
    if missing.size:
        i, j = missing[0]
        raise MissingPair(ids[i], ids[j])
    return DistanceMatrix(ids=list(ids), d=d)


# --------------------------------------------------------------------------
# Persistence: header row of ids, then one dense row per id, %.17g floats
# --------------------------------------------------------------------------

def save_matrix(path, matrix: DistanceMatrix) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(matrix.ids) + "\n")
        for row in matrix.d:
            fh.write("\t".join(f"{value:.17g}" for value in row) + "\n")


def load_matrix(path) -> DistanceMatrix:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header:
            raise EmptyInput(f"empty matrix file {path}")
        ids = header.split("\t")
        rows = [[float(x) for x in line.rstrip("\n").split("\t")]
                for line in fh if line.strip()]
    d = np.array(rows)
    if d.shape != (len(ids), len(ids)):
        raise EmptyInput(f"matrix shape {d.shape} does not match {len(ids)} ids")
    return DistanceMatrix(ids=ids, d=d)
