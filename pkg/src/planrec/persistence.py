"""Workspace save/load for a full PlanStore.

A workspace is a directory holding text artifacts (queries, vectors,
distance matrix, cluster labels, plans) plus a manifest recording the
format version, clustering/engine parameters, and a sha256 checksum per
file. Floats are written at 17 significant digits, so save followed by
load is bit-exact.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Callable

from . import dbscan, query_text, similarity, tf_features
from .dbscan import ClusteringParams
from .errors import ChecksumMismatch, VersionMismatch
from .mr_engine import EngineConfig
from .recommender import PlanStore, _majority_plan

FORMAT_VERSION = 1

_FILES = {
    "queries": "queries.tsv",
    "vectors": "vectors.tsv",
    "matrix": "matrix.tsv",
    "clusters": "clusters.tsv",
    "plans": "plans.tsv",
}
MANIFEST = "manifest.json"

# version -> function(root, manifest_dict) -> manifest_dict for version+1
_MIGRATIONS: dict[int, Callable[[Path, dict], dict]] = {}


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def save_store(root, store: PlanStore) -> None:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    query_text.write_query_file(root / _FILES["queries"], list(store.queries))
    tf_features.save_vectors(root / _FILES["vectors"],
                             [store.vectors[qid] for qid in sorted(store.vectors)])
    similarity.save_matrix(root / _FILES["matrix"], store.matrix)
    dbscan.save_model(root / _FILES["clusters"], store.model)
    with open(root / _FILES["plans"], "w", encoding="utf-8") as fh:
        for qid in sorted(store.plans):
            fh.write(f"{qid}\t{store.plans[qid]}\n")
    manifest = {
        "version": FORMAT_VERSION,
        "params": {"eps": store.params.eps, "min_pts": store.params.min_pts},
        "engine": {"executor": store.cfg.executor, "workers": store.cfg.workers,
                   "shuffle": store.cfg.shuffle},
        "files": {name: _sha256(root / filename)
                  for name, filename in _FILES.items()},
    }
    with open(root / MANIFEST, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)


def load_store(root) -> PlanStore:
    root = Path(root)
    with open(root / MANIFEST, encoding="utf-8") as fh:
        manifest = json.load(fh)
    version = manifest.get("version")
    while version != FORMAT_VERSION:
        migrate = _MIGRATIONS.get(version)
        if migrate is None:
            raise VersionMismatch(
                f"workspace version {version}, expected {FORMAT_VERSION}")
        manifest = migrate(root, manifest)
        version = manifest.get("version")
    for name, filename in _FILES.items():
        path = root / filename
        if not path.exists():
            raise ChecksumMismatch(f"missing workspace file {filename}")
        actual = _sha256(path)
        if actual != manifest["files"][name]:
            raise ChecksumMismatch(f"checksum mismatch for {filename}")

    params = ClusteringParams(eps=manifest["params"]["eps"],
                              min_pts=manifest["params"]["min_pts"])
    engine = manifest["engine"]
    cfg = EngineConfig(executor=engine["executor"], workers=engine["workers"],
                       shuffle=engine["shuffle"])
    queries = query_text.read_query_file(root / _FILES["queries"])
    vectors = tf_features.load_vectors(root / _FILES["vectors"])
    matrix = similarity.load_matrix(root / _FILES["matrix"])
    model = dbscan.load_model(root / _FILES["clusters"], params)
    plans = {}
    with open(root / _FILES["plans"], encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line:
                qid, qep = line.split("\t")
                plans[qid] = qep
    cluster_plan = {k: _majority_plan(model.members(k), plans)
                    for k in range(model.n_clusters)}
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
