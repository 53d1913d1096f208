"""Cluster-level and instance-level normal/anomalous verdicts.

Two rules are available:

* ``small-cluster``: a cluster is anomalous when it holds fewer than
  ``alpha * n`` rows. Only cluster sizes are consulted.
* ``majority``: a cluster is anomalous when at least half of its members
  carry an attack label. This needs ground truth and exists to score
  clusterings the way supervised tables do; it is an evaluation aid.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from ._files import atomic_write_text
from .errors import ClusterMismatch, InvalidAlpha, MissingLabels

NORMAL = "normal"
ANOMALOUS = "anomalous"
DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class ClusterVerdicts:
    anomalous: np.ndarray  # bool per surviving cluster
    sizes: np.ndarray
    rule: str
    params: dict

    def __len__(self):
        return len(self.anomalous)

    def verdict(self, k: int) -> str:
        return ANOMALOUS if self.anomalous[k] else NORMAL

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "params": self.params,
            "clusters": [
                {"cluster": k, "size": int(s), "verdict": self.verdict(k)}
                for k, s in enumerate(self.sizes)
            ],
        }


@dataclass(frozen=True)
class InstanceVerdicts:
    row_ids: np.ndarray
    cluster: np.ndarray
    anomalous: np.ndarray  # bool per row

    def __len__(self):
        return len(self.row_ids)

    def counts(self) -> dict:
        k = int(self.anomalous.sum())
        return {ANOMALOUS: k, NORMAL: len(self) - k}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row_id", "cluster", "verdict"])
        for r, k, a in zip(self.row_ids, self.cluster, self.anomalous):
            w.writerow([int(r), int(k), ANOMALOUS if a else NORMAL])
        return buf.getvalue()

    def save_csv(self, path) -> None:
        atomic_write_text(path, self.to_csv())


def _sizes(result) -> np.ndarray:
    return np.asarray(result.cluster_sizes, dtype=np.int64)


def label_clusters_unsupervised(result, alpha: float = DEFAULT_ALPHA) -> ClusterVerdicts:
    if not 0 < alpha < 1:
        raise InvalidAlpha(f"alpha must lie strictly between 0 and 1, got {alpha!r}")
    sizes = _sizes(result)
    n = int(sizes.sum())
    threshold = alpha * n
    return ClusterVerdicts(sizes < threshold, sizes, "small-cluster",
                           {"alpha": alpha, "n": n, "threshold": threshold})


def label_clusters_majority(result, labels) -> ClusterVerdicts:
    assignment = np.asarray(result.assignment)
    if labels is None or len(labels) != len(assignment):
        raise MissingLabels("majority labeling needs one label per clustered row")
    attack = np.array([lab.is_attack for lab in labels], dtype=bool)
    sizes = _sizes(result)
    attacks = np.bincount(assignment, weights=attack, minlength=len(sizes))
    # exactly half counts as anomalous
    return ClusterVerdicts(2 * attacks >= sizes, sizes, "majority", {"tie": ANOMALOUS})


def classify_instances(verdicts: ClusterVerdicts, result, row_ids=None) -> InstanceVerdicts:
    assignment = np.asarray(result.assignment, dtype=np.int64)
    sizes = _sizes(result)
    if len(verdicts) != len(sizes) or not np.array_equal(verdicts.sizes, sizes):
        raise ClusterMismatch("verdicts were computed for a different clustering")
    if row_ids is None:
        row_ids = np.arange(len(assignment))
    return InstanceVerdicts(np.asarray(row_ids), assignment, verdicts.anomalous[assignment])
