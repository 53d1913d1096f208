"""Per-feature standardization with a mean-absolute-deviation scale.

Each feature ``f`` is centred on its mean and divided by the mean absolute
deviation around that mean::

    mean_f  = sum_i D[i, f] / n
    scale_f = sum_i |D[i, f] - mean_f| / n
    S[i, f] = (D[i, f] - mean_f) / scale_f

Constant features (``scale_f == 0``) standardize to 0. Sums run over rows in
ascending index order with plain left-to-right accumulation (``np.add.reduce``
along axis 0 of a C-ordered array visits rows in order per column).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ._files import write_json
from .dataset import NumericDataset
from .errors import DimensionMismatch, EmptyDataset


@dataclass(frozen=True)
class StandardizationParams:
    mean: np.ndarray
    scale: np.ndarray
    n_fit: int
    columns: tuple[str, ...] = ()

    @property
    def d(self) -> int:
        return len(self.mean)

    def to_dict(self) -> dict:
        names = self.columns or tuple(f"x{j}" for j in range(self.d))
        return {
            "n_fit": self.n_fit,
            "features": [
                {"name": name, "mean": float(m), "scale": float(s)}
                for name, m, s in zip(names, self.mean, self.scale)
            ],
        }

    @classmethod
    def from_dict(cls, d) -> "StandardizationParams":
        feats = d["features"]
        return cls(
            np.array([f["mean"] for f in feats], dtype=float),
            np.array([f["scale"] for f in feats], dtype=float),
            int(d["n_fit"]),
            tuple(f["name"] for f in feats),
        )

    def save(self, path) -> None:
        write_json(path, self.to_dict())

    @classmethod
    def load(cls, path) -> "StandardizationParams":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _column_sums(X: np.ndarray) -> np.ndarray:
    # sequential row accumulation; fixed order regardless of numpy's pairwise heuristics
    total = np.zeros(X.shape[1])
    for row in X:
        total += row
    return total


def fit_standardizer(dataset: NumericDataset | np.ndarray) -> StandardizationParams:
    X = dataset.rows if isinstance(dataset, NumericDataset) else np.atleast_2d(np.asarray(dataset, float))
    n = X.shape[0]
    if n == 0:
        raise EmptyDataset("cannot fit a standardizer on zero rows")
    mean = _column_sums(X) / n
    # n * v / n can round away from v; a constant column's mean is exactly v
    constant = np.all(X == X[0], axis=0)
    mean[constant] = X[0, constant]
    scale = _column_sums(np.abs(X - mean)) / n
    columns = tuple(dataset.columns) if isinstance(dataset, NumericDataset) else ()
    return StandardizationParams(mean, scale, n, columns)


def standardize_array(params: StandardizationParams, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != params.d:
        raise DimensionMismatch(f"params cover {params.d} features, data has {X.shape[1]}")
    live = params.scale > 0
    out = np.zeros_like(X)
    out[:, live] = (X[:, live] - params.mean[live]) / params.scale[live]
    return out


def apply_standardizer(params: StandardizationParams, dataset: NumericDataset) -> NumericDataset:
    rows = standardize_array(params, dataset.rows)
    return replace(dataset, rows=rows, standardized=True, provenance=dict(dataset.provenance))


def inverse_standardize(params: StandardizationParams, S: np.ndarray) -> np.ndarray:
    """Undo :func:`standardize_array`; constant features come back as their mean."""
    return np.asarray(S, dtype=float) * params.scale + params.mean
