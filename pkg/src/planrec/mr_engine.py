"""Embedded deterministic map/reduce engine.

Jobs are pure map and reduce functions over (key, value) pairs, modelled
as plain 2-tuples. The sequential executor is the reference path; the
parallel executor fans map partitions and reduce key groups out to a
forked worker pool. Either way the result is the canonical one:

    sort(flatten(reduce(k, sorted(vs)) for each key group of
         sort(flatten(map(r) for r in input))))

so every (executor, workers, partitions, shuffle) configuration returns
identical output. The InMemory shuffle keeps intermediates resident; the
DiskSpill shuffle writes every map partition (and, in chains, every
inter-job boundary) through temp files, emulating a disk-bound runtime.

User map/reduce functions must be side-effect-free and, for the parallel
executor, picklable (module-level functions or functools.partial of one).
"""

from __future__ import annotations

import atexit
import csv
import multiprocessing
import os
import pickle
import struct
import tempfile
import time
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Sequence

from .errors import SpillIOError, TaskError

KVPair = tuple[Any, Any]

SEQUENTIAL = "sequential"
PARALLEL = "parallel"
IN_MEMORY = "memory"
DISK_SPILL = "disk"


@dataclass(frozen=True)
class JobSpec:
    """One map/reduce job.

    map_fn: record -> iterable of (key, value)
    reduce_fn: (key, [values]) -> iterable of (key, value)
    reduce_fn receives its values canonically sorted, so it may rely on
    a deterministic value order.
    """

    map_fn: Callable[[Any], Iterable[KVPair]]
    reduce_fn: Callable[[Any, list], Iterable[KVPair]]
    partitions: int = 1

    def __post_init__(self):
        if self.partitions < 1:
            raise ValueError("partitions must be >= 1")


@dataclass(frozen=True)
class EngineConfig:
    executor: str = SEQUENTIAL
    workers: int = 1
    shuffle: str = IN_MEMORY
    spill_dir: Optional[str] = None

    def __post_init__(self):
        if self.executor not in (SEQUENTIAL, PARALLEL):
            raise ValueError(f"unknown executor {self.executor!r}")
        if self.shuffle not in (IN_MEMORY, DISK_SPILL):
            raise ValueError(f"unknown shuffle {self.shuffle!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @classmethod
    def sequential(cls, shuffle: str = IN_MEMORY, spill_dir=None) -> "EngineConfig":
        return cls(executor=SEQUENTIAL, workers=1, shuffle=shuffle, spill_dir=spill_dir)

    @classmethod
    def parallel(cls, workers: int, shuffle: str = IN_MEMORY, spill_dir=None) -> "EngineConfig":
        return cls(executor=PARALLEL, workers=workers, shuffle=shuffle, spill_dir=spill_dir)


@dataclass
class TimingReport:
    """Per-phase wall-clock for one job or chain run."""

    workers: int
    shuffle: str
    map_seconds: float = 0.0
    shuffle_seconds: float = 0.0
    reduce_seconds: float = 0.0
    spill_io_seconds: float = 0.0
    bytes_spilled: int = 0
    records_in: int = 0
    records_out: int = 0

    def merge(self, other: "TimingReport") -> None:
        self.map_seconds += other.map_seconds
        self.shuffle_seconds += other.shuffle_seconds
        self.reduce_seconds += other.reduce_seconds
        self.spill_io_seconds += other.spill_io_seconds
        self.bytes_spilled += other.bytes_spilled

    @property
    def total_seconds(self) -> float:
        return (self.map_seconds + self.shuffle_seconds
                + self.reduce_seconds + self.spill_io_seconds)

    CSV_FIELDS = ("workers", "shuffle", "map_seconds", "shuffle_seconds",
                  "reduce_seconds", "spill_io_seconds", "bytes_spilled",
                  "records_in", "records_out")

    def as_row(self) -> dict:
        return {name: getattr(self, name) for name in self.CSV_FIELDS}

    @staticmethod
    def write_csv(reports: Sequence["TimingReport"], path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=TimingReport.CSV_FIELDS)
            writer.writeheader()
            for report in reports:
                writer.writerow(report.as_row())


# --------------------------------------------------------------------------
# Canonical ordering
# --------------------------------------------------------------------------

def _canon(value) -> tuple:
    """A total-order sort key over heterogeneous values."""
    if isinstance(value, bool):
        return ("bool", value)
    if isinstance(value, (int, float)):
        return ("num", value)
    if isinstance(value, str):
        return ("str", value)
    if isinstance(value, bytes):
        return ("bytes", value)
    if isinstance(value, tuple):
        return ("tuple", tuple(_canon(v) for v in value))
    if isinstance(value, (list,)):
        return ("list", tuple(_canon(v) for v in value))
    if isinstance(value, frozenset):
        return ("frozenset", tuple(sorted(_canon(v) for v in value)))
    return (type(value).__name__, repr(value))


def canonical_sort(pairs: Iterable[KVPair]) -> list[KVPair]:
    pairs = list(pairs)
    try:  # fast path for homogeneous comparable pairs
        return sorted(pairs)
    except TypeError:
        return sorted(pairs, key=lambda kv: (_canon(kv[0]), _canon(kv[1])))


def _sorted_values(values: list) -> list:
    try:
        return sorted(values)
    except TypeError:
        return sorted(values, key=_canon)


def _sorted_groups(grouped: dict) -> list[tuple[Any, list]]:
    try:
        keys = sorted(grouped)
    except TypeError:
        keys = sorted(grouped, key=_canon)
    return [(key, _sorted_values(grouped[key])) for key in keys]


def _partition_of(key, partitions: int) -> int:
    # repr() is stable across processes for the key types the engine sees
    return zlib.crc32(repr(_canon(key)).encode("utf-8")) % partitions


# --------------------------------------------------------------------------
# Worker pool (forked, cached per worker count)
# --------------------------------------------------------------------------

_POOLS: dict[int, Any] = {}


def _get_pool(workers: int):
    pool = _POOLS.get(workers)
    if pool is None:
        method = "fork" if "fork" in multiprocessing.get_all_start_methods() else "spawn"
        pool = multiprocessing.get_context(method).Pool(processes=workers)
        _POOLS[workers] = pool
    return pool


@atexit.register
def _shutdown_pools() -> None:
    for pool in _POOLS.values():
        pool.terminate()
    _POOLS.clear()


def _map_task(map_fn, records):
    out = []
    for record in records:
        out.extend(map_fn(record))
    return out


def _reduce_task(reduce_fn, groups):
    out = []
    for key, values in groups:
        out.extend(reduce_fn(key, values))
    return out


def _chunk(items: list, n: int) -> list[list]:
    n = max(1, min(n, len(items)))
    size, extra = divmod(len(items), n)
    chunks = []
    start = 0
    for i in range(n):
        end = start + size + (1 if i < extra else 0)
        chunks.append(items[start:end])
        start = end
    return chunks


# --------------------------------------------------------------------------
# Spill files: length-prefixed pickled batches, one file per partition
# --------------------------------------------------------------------------

def _spill_write(path: Path, pairs: list[KVPair]) -> int:
    try:
        payload = pickle.dumps(pairs, protocol=pickle.HIGHEST_PROTOCOL)
        with open(path, "wb") as fh:
            fh.write(struct.pack("<Q", len(payload)))
            fh.write(payload)
        return len(payload) + 8
    except OSError as exc:
        raise SpillIOError(f"spill write failed for {path}: {exc}") from exc


def _spill_read(path: Path) -> list[KVPair]:
    try:
        with open(path, "rb") as fh:
            (size,) = struct.unpack("<Q", fh.read(8))
            payload = fh.read(size)
            if len(payload) != size:
                raise SpillIOError(f"truncated spill file {path}")
            return pickle.loads(payload)
    except OSError as exc:
        raise SpillIOError(f"spill read failed for {path}: {exc}") from exc


class _SpillArea:
    def __init__(self, spill_dir: Optional[str]):
        base = spill_dir or os.environ.get("PLANREC_TMPDIR") or None
        self._tmp = tempfile.TemporaryDirectory(prefix="planrec-spill-", dir=base)
        self.root = Path(self._tmp.name)
        self._counter = 0

    def fresh_path(self) -> Path:
        self._counter += 1
        return self.root / f"spill-{self._counter:06d}.bin"

    def cleanup(self) -> None:
        self._tmp.cleanup()


# --------------------------------------------------------------------------
# Execution
# --------------------------------------------------------------------------

def _run_map(records, job: JobSpec, cfg: EngineConfig, report: TimingReport) -> list[KVPair]:
    chunks = _chunk(list(records), job.partitions)
    start = time.perf_counter()
    mapped: list[KVPair] = []
    if cfg.executor == PARALLEL and cfg.workers > 1 and len(chunks) > 1:
        pool = _get_pool(cfg.workers)
        try:
            results = pool.starmap(_map_task, [(job.map_fn, chunk) for chunk in chunks])
        except Exception as exc:
            raise TaskError(partition=-1, cause=exc) from exc
        for part in results:
            mapped.extend(part)
    else:
        for index, chunk in enumerate(chunks):
            try:
                mapped.extend(_map_task(job.map_fn, chunk))
            except Exception as exc:
                raise TaskError(partition=index, cause=exc) from exc
    report.map_seconds += time.perf_counter() - start
    return mapped


def _shuffle(mapped: list[KVPair], job: JobSpec, cfg: EngineConfig,
             report: TimingReport, spill: Optional[_SpillArea]) -> list[tuple[Any, list]]:
    if cfg.shuffle == DISK_SPILL:
        # route every pair through per-partition spill files
        start = time.perf_counter()
        buckets: list[list[KVPair]] = [[] for _ in range(job.partitions)]
        for pair in mapped:
            buckets[_partition_of(pair[0], job.partitions)].append(pair)
        mapped = []
        for bucket in buckets:
            path = spill.fresh_path()
            report.bytes_spilled += _spill_write(path, bucket)
            mapped.extend(_spill_read(path))
        report.spill_io_seconds += time.perf_counter() - start
    start = time.perf_counter()
    grouped: dict[Any, list] = {}
    for key, value in mapped:
        grouped.setdefault(key, []).append(value)
    groups = _sorted_groups(grouped)
    report.shuffle_seconds += time.perf_counter() - start
    return groups


def _run_reduce(groups, job: JobSpec, cfg: EngineConfig, report: TimingReport) -> list[KVPair]:
    start = time.perf_counter()
    out: list[KVPair] = []
    if cfg.executor == PARALLEL and cfg.workers > 1 and len(groups) > 1:
        chunks = _chunk(groups, cfg.workers)
        pool = _get_pool(cfg.workers)
        try:
            results = pool.starmap(_reduce_task, [(job.reduce_fn, chunk) for chunk in chunks])
        except Exception as exc:
            raise TaskError(partition=-1, cause=exc) from exc
        for part in results:
            out.extend(part)
    else:
        for index, chunk in enumerate([groups]):
            try:
                out.extend(_reduce_task(job.reduce_fn, chunk))
            except Exception as exc:
                raise TaskError(partition=index, cause=exc) from exc
    result = canonical_sort(out)
    report.reduce_seconds += time.perf_counter() - start
    return result


def _run_job_inner(records, job: JobSpec, cfg: EngineConfig,
                   report: TimingReport, spill: Optional[_SpillArea]) -> list[KVPair]:
    records = list(records)
    report.records_in += len(records)
    mapped = _run_map(records, job, cfg, report)
    groups = _shuffle(mapped, job, cfg, report, spill)
    out = _run_reduce(groups, job, cfg, report)
    if cfg.shuffle == DISK_SPILL:
        # reduce output is also written through disk, like the map side
        start = time.perf_counter()
        path = spill.fresh_path()
        report.bytes_spilled += _spill_write(path, out)
        out = _spill_read(path)
        report.spill_io_seconds += time.perf_counter() - start
    report.records_out += len(out)
    return out


def run_job(records, job: JobSpec, cfg: EngineConfig = EngineConfig()) -> list[KVPair]:
    """Run one job; output is in canonical (key, value) order."""
    out, _ = run_job_timed(records, job, cfg)
    return out


def run_job_timed(records, job: JobSpec,
                  cfg: EngineConfig = EngineConfig()) -> tuple[list[KVPair], TimingReport]:
    report = TimingReport(workers=cfg.workers if cfg.executor == PARALLEL else 1,
                          shuffle=cfg.shuffle)
    spill = _SpillArea(cfg.spill_dir) if cfg.shuffle == DISK_SPILL else None
    try:
        out = _run_job_inner(records, job, cfg, report, spill)
    finally:
        if spill is not None:
            spill.cleanup()
    return out, report


def chain(jobs: Sequence[JobSpec], records,
          cfg: EngineConfig = EngineConfig()) -> list[KVPair]:
    """Fold run_job over a job pipeline; DiskSpill also materializes
    every inter-job boundary to disk."""
    out, _ = chain_timed(jobs, records, cfg)
    return out


def chain_timed(jobs: Sequence[JobSpec], records,
                cfg: EngineConfig = EngineConfig()) -> tuple[list[KVPair], TimingReport]:
    report = TimingReport(workers=cfg.workers if cfg.executor == PARALLEL else 1,
                          shuffle=cfg.shuffle)
    spill = _SpillArea(cfg.spill_dir) if cfg.shuffle == DISK_SPILL else None
    current = list(records)
    report.records_in = len(current)
    try:
        for index, job in enumerate(jobs):
            job_report = TimingReport(workers=report.workers, shuffle=cfg.shuffle)
            try:
                current = _run_job_inner(current, job, cfg, job_report, spill)
            except TaskError as exc:
                raise TaskError(exc.partition, exc.cause, job_index=index) from exc
            report.merge(job_report)
            if cfg.shuffle == DISK_SPILL and index < len(jobs) - 1:
                start = time.perf_counter()
                path = spill.fresh_path()
                report.bytes_spilled += _spill_write(path, current)
                current = _spill_read(path)
                report.spill_io_seconds += time.perf_counter() - start
    finally:
        if spill is not None:
            spill.cleanup()
    report.records_out = len(current)
    return current, report
