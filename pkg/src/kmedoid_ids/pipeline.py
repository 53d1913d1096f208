"""Experiment pipeline: ingest -> encode -> standardize -> cluster -> label -> evaluate.

Configuration is one JSON document. Relative paths inside it resolve
against the directory holding the config file. Every output except the run
manifest is a pure function of the config and the input bytes.
"""

from __future__ import annotations

import json
import logging
import platform
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from ._files import atomic_write_text, sha256_file, write_json
from .clustering import (
    DEFAULT_CACHE_CAP,
    ClusterConfig,
    ClusteringResult,
    cluster,
    fingerprint,
    kmeans_cluster,
    result_from_dict,
    result_to_dict,
)
from .dataset import (
    NumericDataset,
    default_taxonomy_path,
    encode_features,
    kdd_schema,
    load_dataset,
    load_taxonomy,
    read_kdd_file,
    sample_dataset,
    save_dataset,
)
from .errors import ConfigError, DataError, InvariantViolation
from .evaluation import MetricsReport, comparison_table, evaluate, plot_csv, plot_rows
from .labeling import classify_instances, label_clusters_majority, label_clusters_unsupervised
from .preprocess import StandardizationParams, apply_standardizer, fit_standardizer

log = logging.getLogger(__name__)

METHODS = ("new-medoid", "kmeans")
OUTPUT_FILES = {
    "clustering": "clustering.json",
    "verdicts": "verdicts.csv",
    "metrics": "metrics.json",
    "plot": "metrics.csv",
    "manifest": "manifest.json",
}


@dataclass
class ExperimentConfig:
    dataset: str
    clusters: int
    taxonomy: str | None = None
    sample_strategy: str | None = None
    sample_count: int | None = None
    seed: int = 0
    method: str = "new-medoid"
    max_iterations: int = 100
    tolerance: float = 0.0
    cache_cap: int = DEFAULT_CACHE_CAP
    labeling: str = "unsupervised"
    alpha: float = 0.05
    kmeans_init: str = "medoid"
    output_dir: str = "out"
    base_dir: str = field(default=".", repr=False)

    @classmethod
    def from_dict(cls, raw: dict, base_dir=".") -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        # a run manifest carries the config it was produced from
        if "config" in raw and isinstance(raw["config"], dict):
            raw = raw["config"]
        known = {f.name for f in fields(cls)} - {"base_dir"}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
        for required in ("dataset", "clusters"):
            if required not in raw:
                name = "cluster count" if required == "clusters" else required
                raise ConfigError(f"missing required field {required!r} ({name})")
        cfg = cls(**raw, base_dir=str(base_dir))
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file {path} not found") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(raw, base_dir=path.resolve().parent)

    def validate(self) -> None:
        def is_int(v):
            return isinstance(v, int) and not isinstance(v, bool)

        if not is_int(self.clusters) or self.clusters < 1:
            raise ConfigError(f"cluster count ('clusters') must be an integer >= 1, got {self.clusters!r}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.labeling not in ("unsupervised", "majority"):
            raise ConfigError(f"labeling must be 'unsupervised' or 'majority', got {self.labeling!r}")
        if not isinstance(self.alpha, (int, float)) or not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not is_int(self.max_iterations) or self.max_iterations < 1:
            raise ConfigError("max_iterations must be an integer >= 1")
        if not isinstance(self.tolerance, (int, float)) or self.tolerance < 0:
            raise ConfigError("tolerance must be a non-negative number")
        if not is_int(self.cache_cap) or self.cache_cap < 0:
            raise ConfigError("cache_cap must be a non-negative integer")
        if not is_int(self.seed):
            raise ConfigError("seed must be an integer")
        if self.kmeans_init not in ("medoid", "random"):
            raise ConfigError("kmeans_init must be 'medoid' or 'random'")
        if self.sample_strategy is not None:
            if self.sample_strategy not in ("uniform", "stratified"):
                raise ConfigError("sample_strategy must be 'uniform' or 'stratified'")
            if not is_int(self.sample_count) or self.sample_count < 1:
                raise ConfigError("sample_count must be a positive integer when sampling")

    def resolve(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else Path(self.base_dir) / p

    @property
    def dataset_path(self) -> Path:
        return self.resolve(self.dataset)

    @property
    def taxonomy_path(self) -> Path:
        return default_taxonomy_path() if self.taxonomy is None else self.resolve(self.taxonomy)

    @property
    def out_dir(self) -> Path:
        return self.resolve(self.output_dir)

    def echo(self) -> dict:
        """Config as written into result files: absolute inputs, no output location."""
        d = asdict(self)
        d.pop("base_dir")
        d.pop("output_dir")
        d["dataset"] = str(self.dataset_path.resolve())
        d["taxonomy"] = None if self.taxonomy is None else str(self.taxonomy_path.resolve())
        return d

    def cluster_config(self) -> ClusterConfig:
        return ClusterConfig(self.max_iterations, float(self.tolerance), self.cache_cap)


# --- stages -------------------------------------------------------------------------

def ingest(cfg: ExperimentConfig) -> NumericDataset:
    for label, path in (("dataset", cfg.dataset_path), ("taxonomy", cfg.taxonomy_path)):
        if not path.is_file():
            raise DataError(f"{label} file {path} does not exist")
    taxonomy = load_taxonomy(cfg.taxonomy_path)
    records = read_kdd_file(cfg.dataset_path)
    if not records:
        raise DataError(f"{cfg.dataset_path} contains no records")
    ds = encode_features(records, kdd_schema(), taxonomy)
    ds.provenance["source"] = {"path": str(cfg.dataset_path.resolve()),
                               "sha256": sha256_file(cfg.dataset_path)}
    if cfg.sample_strategy is not None:
        ds = sample_dataset(ds, cfg.sample_strategy, cfg.sample_count, cfg.seed)
    log.info("ingested %d rows x %d columns", ds.n, ds.d)
    return ds


def standardize(ds: NumericDataset, params: StandardizationParams | None = None):
    params = params or fit_standardizer(ds)
    return apply_standardizer(params, ds), params


def run_method(cfg: ExperimentConfig, std: NumericDataset, method: str):
    if cfg.clusters > std.n:
        raise ConfigError(f"cluster count {cfg.clusters} exceeds the {std.n} rows available")
    t0 = time.perf_counter()
    if method == "new-medoid":
        result = cluster(std, cfg.clusters, cfg.cluster_config())
        check_clustering(result, std.rows)
    else:
        result = kmeans_cluster(std, cfg.clusters, cfg.cluster_config(),
                                init=cfg.kmeans_init, seed=cfg.seed)
    log.info("%s: %d clusters, %d iterations, %.2fs", method, len(result.cluster_sizes),
             result.iterations, time.perf_counter() - t0)
    return result


def check_clustering(result: ClusteringResult, X: np.ndarray) -> None:
    """Re-verify the result's structural guarantees; raise InvariantViolation if broken."""
    n = X.shape[0]
    k = len(result.medoids)
    sizes = np.bincount(result.assignment, minlength=k)
    problems = []
    if len(result.assignment) != n or result.assignment.min() < 0 or result.assignment.max() >= k:
        problems.append("assignment is not a partition onto surviving clusters")
    if not np.array_equal(sizes, result.cluster_sizes) or np.any(sizes < 1):
        problems.append("cluster sizes disagree with assignment or include an empty cluster")
    if len(set(result.medoids.tolist())) != k:
        problems.append("medoids are not distinct")
    if np.any(result.assignment[result.medoids] != np.arange(k)):
        problems.append("a medoid is not assigned to its own cluster")
    recomputed = float(np.sum(np.sqrt(((X - X[result.medoids[result.assignment]]) ** 2).sum(axis=1))))
    if abs(recomputed - result.objective) > 1e-9 * max(1.0, abs(recomputed)):
        problems.append(f"objective {result.objective!r} != recomputed {recomputed!r}")
    if problems:
        raise InvariantViolation("; ".join(problems))


def label(cfg: ExperimentConfig, result, ds: NumericDataset):
    if cfg.labeling == "unsupervised":
        verdicts = label_clusters_unsupervised(result, cfg.alpha)
    else:
        verdicts = label_clusters_majority(result, ds.labels)
    return verdicts, classify_instances(verdicts, result, ds.row_ids)


def score(cfg: ExperimentConfig, method: str, ds: NumericDataset, verdicts, instances) -> MetricsReport:
    if ds.labels is None:
        raise DataError("evaluation needs ground-truth labels")
    labeling = {"mode": cfg.labeling, **verdicts.params}
    return evaluate(instances, ds.labels, method, labeling=labeling, config=cfg.echo())


# --- file writers --------------------------------------------------------------------

def write_clustering(path, cfg, result, std) -> None:
    write_json(path, result_to_dict(result, std.row_ids, config=cfg.echo(),
                                    dataset_hash=fingerprint(std)))


def read_clustering(path, ds: NumericDataset):
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
        return d.get("method", "new-medoid"), result_from_dict(d, ds.row_ids)
    except (OSError, KeyError, ValueError) as exc:
        raise DataError(f"cannot read clustering file {path}: {exc}") from None


def write_evaluation(out: Path, instances, report: MetricsReport, verdicts) -> dict:
    paths = {k: out / OUTPUT_FILES[k] for k in ("verdicts", "metrics", "plot")}
    instances.save_csv(paths["verdicts"])
    doc = report.to_dict()
    doc["clusters"] = verdicts.to_dict()["clusters"]
    doc["instance_counts"] = instances.counts()
    write_json(paths["metrics"], doc)
    atomic_write_text(paths["plot"], plot_csv([report]))
    return paths


def _versions() -> dict:
    return {"kmedoid_ids": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__}


# --- entry points --------------------------------------------------------------------

def run_pipeline(cfg: ExperimentConfig) -> dict[str, Path]:
    """Full run for ``cfg.method``; returns the written paths keyed by role."""
    t0 = time.perf_counter()
    out = cfg.out_dir
    ds = ingest(cfg)
    std, params = standardize(ds)
    result = run_method(cfg, std, cfg.method)
    verdicts, instances = label(cfg, result, ds)
    report = score(cfg, cfg.method, ds, verdicts, instances)

    paths = {"clustering": out / OUTPUT_FILES["clustering"]}
    write_clustering(paths["clustering"], cfg, result, std)
    paths.update(write_evaluation(out, instances, report, verdicts))
    paths["standardization"] = out / "standardization.json"
    params.save(paths["standardization"])

    manifest = {
        "config": cfg.echo(),
        "inputs": {
            "dataset_sha256": sha256_file(cfg.dataset_path),
            "taxonomy_sha256": sha256_file(cfg.taxonomy_path),
            "encoded_sha256": fingerprint(ds),
        },
        "versions": _versions(),
        "outputs": {k: sha256_file(p) for k, p in sorted(paths.items())},
        "wall_time_s": round(time.perf_counter() - t0, 6),
    }
    paths["manifest"] = out / OUTPUT_FILES["manifest"]
    write_json(paths["manifest"], manifest)
    return paths


def compare_methods(cfg: ExperimentConfig, methods=METHODS) -> dict[str, Path]:
    """Run each method on the same standardized data and write a side-by-side report."""
    methods = list(dict.fromkeys(methods))
    if not methods:
        raise ConfigError("select at least one method")
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; choose from {METHODS}")
    out = cfg.out_dir
    ds = ingest(cfg)
    std, _ = standardize(ds)
    reports = []
    for m in methods:
        result = run_method(cfg, std, m)
        verdicts, instances = label(cfg, result, ds)
        reports.append(score(cfg, m, ds, verdicts, instances))
    paths = {
        "json": out / "comparison.json",
        "csv": out / "comparison.csv",
        "table": out / "comparison.txt",
    }
    write_json(paths["json"], {
        "config": cfg.echo(),
        "measured": [{k: v for k, v in r.to_dict().items() if k != "reference"} for r in reports],
        "rows": [list(r) for r in plot_rows(reports)],
        "reference": reports[0].to_dict()["reference"],
    })
    atomic_write_text(paths["csv"], plot_csv(reports))
    atomic_write_text(paths["table"], comparison_table(reports))
    return paths


def load_or_ingest(cfg: ExperimentConfig, sidecar=None) -> NumericDataset:
    if sidecar is None:
        return ingest(cfg)
    sidecar = Path(sidecar)
    if not sidecar.is_file():
        raise DataError(f"dataset sidecar {sidecar} does not exist")
    return load_dataset(sidecar)


def save_ingested(cfg: ExperimentConfig, ds: NumericDataset) -> Path:
    return save_dataset(ds, cfg.out_dir / "dataset.csv")


def load_params(path) -> StandardizationParams:
    try:
        return StandardizationParams.load(path)
    except (OSError, KeyError, ValueError) as exc:
        raise DataError(f"cannot read standardization file {path}: {exc}") from None
