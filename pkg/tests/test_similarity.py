import itertools
import math
import random

import numpy as np
import pytest

from planrec.errors import EmptyInput, MissingPair, ZeroVector
from planrec.mr_engine import DISK_SPILL, EngineConfig
from planrec.similarity import (DistanceMatrix, SimilarityEntry, cosine,
                                load_matrix, pairwise_job, save_matrix,
                                to_distance_matrix)
from planrec.tf_features import FeatureVector


def fv(qid, **weights):
    return FeatureVector(query_id=qid, weights=weights)


def direct_cosine(v1, v2):
    """Independent evaluation: dot over the term union, norms per vector."""
    terms = sorted(set(v1.weights) | set(v2.weights))
    dot = sum(v1.weights.get(t, 0.0) * v2.weights.get(t, 0.0) for t in terms)
    n1 = math.sqrt(sum(w * w for w in v1.weights.values()))
    n2 = math.sqrt(sum(w * w for w in v2.weights.values()))
    return dot / (n1 * n2)


def random_vectors(count, rng, n_terms=12, max_terms=6):
    vocabulary = [f"WHERE c{i}" for i in range(n_terms)]
    vectors = []
    for i in range(count):
        terms = rng.sample(vocabulary, rng.randrange(1, max_terms))
        raw = [rng.random() + 0.05 for _ in terms]
        total = sum(raw)
        vectors.append(FeatureVector(
            query_id=f"q{i:03d}",
            weights={t: w / total for t, w in zip(terms, raw)}))
    return vectors


class TestCosine:
    def test_self_similarity(self):
        v = fv("a", **{"SELECT x": 0.3, "FROM t": 0.7})
        assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_vectors(self):
        assert cosine(fv("a", **{"SELECT x": 1.0}), fv("b", **{"SELECT y": 1.0})) == 0.0

    def test_half_overlap_hand_value(self):
        v1 = fv("a", **{"SELECT a": 0.5, "SELECT b": 0.5})
        v2 = fv("b", **{"SELECT a": 0.5, "SELECT c": 0.5})
        assert cosine(v1, v2) == pytest.approx(0.5, abs=1e-12)

    def test_symmetry_exact(self):
        rng = random.Random(11)
        for v1, v2 in itertools.combinations(random_vectors(12, rng), 2):
            assert cosine(v1, v2) == cosine(v2, v1)

    def test_range_and_oracle(self):
        rng = random.Random(13)
        vectors = random_vectors(25, rng)
        for v1, v2 in itertools.combinations(vectors, 2):
            value = cosine(v1, v2)
            assert 0.0 <= value <= 1.0
            assert value == pytest.approx(direct_cosine(v1, v2), abs=1e-12)

    def test_scale_invariance(self):
        rng = random.Random(17)
        for v1, v2 in itertools.combinations(random_vectors(8, rng), 2):
            for scale in (0.001, 3.7, 1e6):
                s1 = fv(v1.query_id, **{t: w * scale for t, w in v1.weights.items()})
                s2 = fv(v2.query_id, **{t: w * scale for t, w in v2.weights.items()})
                assert cosine(s1, s2) == pytest.approx(cosine(v1, v2), abs=1e-12)

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            cosine(fv("a", **{"SELECT x": 0.0}), fv("b", **{"SELECT x": 1.0}))


class TestPairwiseJob:
    def test_two_identical_vectors(self):
        out = pairwise_job([fv("a", **{"FROM t": 1.0}), fv("b", **{"FROM t": 1.0})])
        assert out == [SimilarityEntry("a", "b", 1.0)]

    def test_pair_count(self):
        vectors = random_vectors(3, random.Random(1))
        assert len(pairwise_job(vectors)) == 3

    def test_completeness_and_ordering(self):
        vectors = random_vectors(9, random.Random(2))
        out = pairwise_job(vectors)
        assert len(out) == 9 * 8 // 2
        assert all(e.q1 < e.q2 for e in out)
        assert len({(e.q1, e.q2) for e in out}) == len(out)

    def test_matches_double_loop_oracle(self):
        rng = random.Random(23)
        vectors = random_vectors(50, rng)
        by_pair = {(e.q1, e.q2): e.cosine
                   for e in pairwise_job(vectors, EngineConfig.parallel(4))}
        ordered = sorted(vectors, key=lambda v: v.query_id)
        for i in range(len(ordered)):
            for j in range(i + 1, len(ordered)):
                key = (ordered[i].query_id, ordered[j].query_id)
                assert by_pair[key] == pytest.approx(
                    direct_cosine(ordered[i], ordered[j]), abs=1e-12)

    def test_executor_independence(self):
        vectors = random_vectors(30, random.Random(29))
        base = pairwise_job(vectors, EngineConfig.sequential())
        for cfg in (EngineConfig.parallel(2), EngineConfig.parallel(8),
                    EngineConfig.parallel(4, shuffle=DISK_SPILL)):
            assert pairwise_job(vectors, cfg) == base

    def test_too_few_vectors(self):
        with pytest.raises(EmptyInput):
            pairwise_job([fv("a", **{"FROM t": 1.0})])


class TestDistanceMatrix:
    def test_complement_values(self):
        entries = [SimilarityEntry("a", "b", 1.0), SimilarityEntry("a", "c", 0.0),
                   SimilarityEntry("b", "c", 0.5)]
        matrix = to_distance_matrix(entries, ["a", "b", "c"])
        assert matrix.d[0, 1] == 0.0
        assert matrix.d[0, 2] == 1.0
        assert matrix.d[1, 2] == 0.5

    def test_symmetry_and_zero_diagonal(self):
        vectors = random_vectors(12, random.Random(31))
        ids = sorted(v.query_id for v in vectors)
        matrix = to_distance_matrix(pairwise_job(vectors), ids)
        assert np.array_equal(matrix.d, matrix.d.T)
        assert np.all(np.diag(matrix.d) == 0.0)
        assert np.all((matrix.d >= 0.0) & (matrix.d <= 1.0))

    def test_missing_pair_detected(self):
        entries = [SimilarityEntry("a", "b", 1.0)]
        with pytest.raises(MissingPair):
            to_distance_matrix(entries, ["a", "b", "c"])

    def test_empty_ids_rejected(self):
        with pytest.raises(EmptyInput):
            to_distance_matrix([], [])

    def test_file_round_trip_exact(self, tmp_path):
        vectors = random_vectors(10, random.Random(37))
        ids = sorted(v.query_id for v in vectors)
        matrix = to_distance_matrix(pairwise_job(vectors), ids)
        path = tmp_path / "matrix.tsv"
        save_matrix(path, matrix)
        loaded = load_matrix(path)
        assert loaded.ids == matrix.ids
        assert np.array_equal(loaded.d, matrix.d)
