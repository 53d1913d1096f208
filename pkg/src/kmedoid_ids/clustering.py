"""Medoid clustering with distance-ratio initialization, plus a Lloyd K-means baseline.

The medoid algorithm:

1. Score every object ``j`` by ``v_j = sum_i dist(i, j) / sum_k dist(i, k)``
   and take the ``c`` lowest-scoring objects as initial medoids.
2. Assign each object to its nearest medoid; the objective is the summed
   distance from every object to its medoid.
3. Inside each cluster, replace the medoid by the member with the smallest
   total distance to the other members.
4. Reassign and recompute the objective; stop once it no longer changes.

Clusters that end up with no members are deleted as soon as they appear.
All ties go to the lowest index, so a run is fully deterministic.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import NumericDataset
from .errors import (
    ConfigError,
    DimensionMismatch,
    EmptyCluster,
    EmptyClusterEncountered,
    InvalidClusterCount,
    NonFiniteData,
)

DEFAULT_CACHE_CAP = 8192
# rows per block when distances are computed on demand
_BLOCK_ELEMENTS = 1 << 22


def euclidean(a, b) -> float:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch(f"vectors of length {a.size} and {b.size}")
    return float(math.sqrt(np.sum((a - b) ** 2)))


class DistanceCache:
    """Pairwise Euclidean distances over the rows of ``X``.

    With ``n <= cap`` the full ``n x n`` matrix is computed once. Above the
    cap nothing quadratic is stored: row blocks are computed as needed and
    only the distance columns of current medoids are memoised. Both modes
    produce bit-identical numbers because every entry comes from the same
    ``cdist`` kernel and every reduction runs over the same row layout.
    """

    def __init__(self, X, cap: int = DEFAULT_CACHE_CAP):
        self.X = np.ascontiguousarray(X, dtype=float)
        self.n = self.X.shape[0]
        self.cap = cap
        self.mode = "full" if self.n <= cap else "on-demand"
        self.matrix = cdist(self.X, self.X) if self.mode == "full" else None
        self._columns: dict[int, np.ndarray] = {}

    def _row_blocks(self, rows, width):
        step = max(1, _BLOCK_ELEMENTS // max(width, 1))
        for start in range(0, len(rows), step):
            yield rows[start:start + step]

    def block(self, rows, cols) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if self.matrix is not None:
            return self.matrix[np.ix_(rows, cols)]
        return cdist(self.X[rows], self.X[cols])

    def to_medoids(self, medoids) -> np.ndarray:
        """``n x c`` distances from every row to each medoid."""
        medoids = [int(m) for m in medoids]
        if self.matrix is not None:
            return self.matrix[:, medoids]
        for m in medoids:
            if m not in self._columns:
                self._columns[m] = cdist(self.X, self.X[m:m + 1])[:, 0]
        # keep the memo bounded to the medoids in play
        for stale in set(self._columns) - set(medoids):
            del self._columns[stale]
        return np.column_stack([self._columns[m] for m in medoids])

    def row_sums(self, rows=None, cols=None) -> np.ndarray:
        """``sum_k dist(i, k)`` over ``cols`` (default: all) for each ``i`` in ``rows``."""
        rows = np.arange(self.n) if rows is None else np.asarray(rows, dtype=np.int64)
        cols = np.arange(self.n) if cols is None else np.asarray(cols, dtype=np.int64)
        out = np.empty(len(rows))
        pos = 0
        for blk in self._row_blocks(rows, len(cols)):
            out[pos:pos + len(blk)] = self.block(blk, cols).sum(axis=1)
            pos += len(blk)
        return out

    def init_scores(self) -> np.ndarray:
        """``v_j = sum_i dist(i, j) / sum_k dist(i, k)``; zero-sum rows contribute 0."""
        s = self.row_sums()
        inv = np.zeros(self.n)
        nz = s > 0
        inv[nz] = 1.0 / s[nz]
        every = np.arange(self.n)
        # dist is symmetric, so v_j is row j of D weighted by 1/s
        v = np.empty(self.n)
        pos = 0
        for blk in self._row_blocks(every, self.n):
            v[pos:pos + len(blk)] = (self.block(blk, every) * inv).sum(axis=1)
            pos += len(blk)
        return v


def _as_matrix(data) -> np.ndarray:
    X = data.rows if isinstance(data, NumericDataset) else np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteData("data contains NaN or infinite values")
    return X


def _check_c(c, n):
    if isinstance(c, bool) or not isinstance(c, (int, np.integer)) or not 1 <= c <= n:
        raise InvalidClusterCount(f"cluster count must be an integer in [1, {n}], got {c!r}")


def select_initial_medoids(cache: DistanceCache, c: int) -> np.ndarray:
    _check_c(c, cache.n)
    v = cache.init_scores()
    return np.argsort(v, kind="stable")[:c]


def assign(cache: DistanceCache, medoids) -> tuple[np.ndarray, float]:
    """Nearest-medoid assignment (ties to the earliest listed medoid) and its objective."""
    D = cache.to_medoids(medoids)
    labels = np.argmin(D, axis=1)
    objective = float(np.sum(D[np.arange(cache.n), labels]))
    return labels, objective


def update_medoids(cache: DistanceCache, assignment, n_clusters: int | None = None) -> np.ndarray:
    assignment = np.asarray(assignment)
    k = int(assignment.max()) + 1 if n_clusters is None else n_clusters
    empty = [j for j in range(k) if not np.any(assignment == j)]
    if empty:
        raise EmptyClusterEncountered(empty)
    medoids = np.empty(k, dtype=np.int64)
    for j in range(k):
        members = np.flatnonzero(assignment == j)
        totals = cache.row_sums(members, members)
        medoids[j] = members[np.argmin(totals)]
    return medoids


def _drop_empty(medoids, labels):
    sizes = np.bincount(labels, minlength=len(medoids))
    keep = sizes > 0
    if keep.all():
        return medoids, labels, sizes, 0
    remap = np.cumsum(keep) - 1
    return medoids[keep], remap[labels], sizes[keep], int((~keep).sum())


@dataclass
class ClusterConfig:
    max_iterations: int = 100
    tolerance: float = 0.0
    cache_cap: int = DEFAULT_CACHE_CAP
    require_standardized: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be at least 1")
        if not self.tolerance >= 0:
            raise ConfigError("tolerance must be non-negative")
        if self.cache_cap < 0:
            raise ConfigError("cache_cap must be non-negative")


@dataclass
class ClusteringResult:
    medoids: np.ndarray
    assignment: np.ndarray
    objective: float
    objective_trace: list[float]
    cluster_sizes: np.ndarray
    iterations: int
    removed_empty: int
    converged: bool
    initial_medoids: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def n_clusters(self) -> int:
        return len(self.medoids)

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == k)


def cluster(data, c: int, config: ClusterConfig | None = None) -> ClusteringResult:
    config = config or ClusterConfig()
    if config.require_standardized and not getattr(data, "standardized", False):
        raise ConfigError("dataset is not marked as standardized")
    X = _as_matrix(data)
    _check_c(c, X.shape[0])
    cache = DistanceCache(X, config.cache_cap)

    medoids = select_initial_medoids(cache, c)
    initial = medoids.copy()
    labels, objective = assign(cache, medoids)
    medoids, labels, sizes, removed = _drop_empty(medoids, labels)
    trace = [objective]
    iterations = 0
    converged = False
    while iterations < config.max_iterations:
        medoids = update_medoids(cache, labels, len(medoids))
        labels, new_objective = assign(cache, medoids)
        medoids, labels, sizes, dropped = _drop_empty(medoids, labels)
        removed += dropped
        trace.append(new_objective)
        iterations += 1
        if abs(new_objective - objective) <= config.tolerance:
            converged = True
            objective = new_objective
            break
        objective = new_objective

    return ClusteringResult(
        medoids=medoids.astype(np.int64),
        assignment=labels.astype(np.int64),
        objective=objective,
        objective_trace=trace,
        cluster_sizes=sizes.astype(np.int64),
        iterations=iterations,
        removed_empty=removed,
        converged=converged,
        initial_medoids=initial.astype(np.int64),
    )


# --- K-means baseline --------------------------------------------------------------

def cluster_mean(members) -> np.ndarray:
    M = np.asarray(members, dtype=float)
    if M.ndim == 1:
        M = M[:, None] if M.size else M.reshape(0, 1)
    if M.shape[0] == 0:
        raise EmptyCluster("mean of an empty cluster is undefined")
    return M.sum(axis=0) / M.shape[0]


@dataclass
class KMeansResult:
    centroids: np.ndarray
    assignment: np.ndarray
    objective: float
    iterations: int
    converged: bool
    reseeded: int = 0

    @property
    def n_clusters(self) -> int:
        return len(self.centroids)

    @property
    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.n_clusters).astype(np.int64)


def _reseed_empty(X, centroids, labels):
    # Move the point farthest from its own centroid into each empty cluster.
    # Donors must come from clusters with at least two members.
    c = len(centroids)
    moved = 0
    for k in range(c):
        sizes = np.bincount(labels, minlength=c)
        if sizes[k] > 0:
            continue
        dist = np.sqrt(((X - centroids[labels]) ** 2).sum(axis=1))
        dist[sizes[labels] < 2] = -np.inf
        i = int(np.argmax(dist))
        labels[i] = k
        moved += 1
    return moved


def kmeans_cluster(data, c: int, config: ClusterConfig | None = None,
                   init: str = "medoid", seed: int | None = None) -> KMeansResult:
    """Lloyd iteration.

    ``init="medoid"`` starts from the same rows as :func:`cluster`;
    ``init="random"`` draws ``c`` distinct rows with ``seed``.
    """
    config = config or ClusterConfig()
    X = _as_matrix(data)
    n = X.shape[0]
    _check_c(c, n)
    if init == "medoid":
        start = select_initial_medoids(DistanceCache(X, config.cache_cap), c)
    elif init == "random":
        start = np.sort(np.random.default_rng(seed).choice(n, size=c, replace=False))
    else:
        raise ConfigError(f"unknown K-means init {init!r}")
    centroids = X[start].copy()
    prev = None
    reseeded = 0
    converged = False
    iterations = 0
    while iterations < config.max_iterations:
        iterations += 1
        labels = np.argmin(cdist(X, centroids, "sqeuclidean"), axis=1)
        reseeded += _reseed_empty(X, centroids, labels)
        centroids = np.vstack([cluster_mean(X[labels == k]) for k in range(c)])
        if prev is not None and np.array_equal(labels, prev):
            converged = True
            break
        prev = labels
    objective = float(((X - centroids[labels]) ** 2).sum())
    return KMeansResult(centroids, labels.astype(np.int64), objective, iterations, converged, reseeded)


# --- serialization -----------------------------------------------------------------

def fingerprint(data) -> str:
    """SHA-256 over the row matrix (and row ids, when available)."""
    X = np.ascontiguousarray(_as_matrix(data), dtype="<f8")
    h = hashlib.sha256()
    h.update(np.asarray(X.shape, dtype="<i8").tobytes())
    h.update(X.tobytes())
    if isinstance(data, NumericDataset):
        h.update(np.ascontiguousarray(data.row_ids, dtype="<i8").tobytes())
    return h.hexdigest()


def result_to_dict(result, row_ids, config: dict | None = None, dataset_hash: str | None = None) -> dict:
    """JSON-ready description keyed by row id rather than positional index."""
    row_ids = np.asarray(row_ids)
    out = {
        "assignment": {str(int(r)): int(k) for r, k in zip(row_ids, result.assignment)},
        "cluster_sizes": [int(s) for s in result.cluster_sizes],
        "objective": float(result.objective),
        "iterations": int(result.iterations),
        "converged": bool(result.converged),
        "config": config or {},
        "dataset_sha256": dataset_hash,
    }
    if isinstance(result, ClusteringResult):
        out.update(
            method="new-medoid",
            medoids=[int(row_ids[m]) for m in result.medoids],
            initial_medoids=[int(row_ids[m]) for m in result.initial_medoids],
            objective_trace=[float(v) for v in result.objective_trace],
            removed_empty=int(result.removed_empty),
        )
    else:
        out.update(
            method="kmeans",
            centroids=[[float(v) for v in row] for row in result.centroids],
            reseeded=int(result.reseeded),
        )
    return out


def result_from_dict(d: dict, row_ids):
    """Rebuild a result from :func:`result_to_dict` output, ordered by ``row_ids``."""
    row_ids = [int(r) for r in row_ids]
    assignment = np.array([d["assignment"][str(r)] for r in row_ids], dtype=np.int64)
    if d.get("method") == "kmeans":
        return KMeansResult(np.array(d["centroids"], dtype=float), assignment, d["objective"],
                            d["iterations"], d["converged"], d.get("reseeded", 0))
    pos = {r: i for i, r in enumerate(row_ids)}
    return ClusteringResult(
        medoids=np.array([pos[m] for m in d["medoids"]], dtype=np.int64),
        assignment=assignment,
        objective=d["objective"],
        objective_trace=list(d["objective_trace"]),
        cluster_sizes=np.array(d["cluster_sizes"], dtype=np.int64),
        iterations=d["iterations"],
        removed_empty=d["removed_empty"],
        converged=d["converged"],
        initial_medoids=np.array([pos[m] for m in d["initial_medoids"]], dtype=np.int64),
    )
