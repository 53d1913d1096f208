"""KDD Cup 99 ingestion: parsing, label taxonomy, one-hot encoding, sampling.

Records are 41 comma-separated features followed by a label ending in a
period, e.g.::

    0,tcp,http,SF,181,5450,0,0,...,0.00,normal.

Columns 1-3 (protocol_type, service, flag) are symbolic and get one-hot
encoded; everything else is numeric.
"""

from __future__ import annotations

import csv
import gzip
import io
import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._files import atomic_write_text
from .errors import (
    CountExceedsPopulation,
    DataError,
    FieldCountMismatch,
    MissingLabels,
    NumericParseError,
    UnknownCategory,
    UnknownLabel,
)

NORMAL = "normal"
ATTACK_CATEGORIES = ("dos", "probe", "r2l", "u2r")
CATEGORIES = (NORMAL,) + ATTACK_CATEGORIES

KDD_FEATURES = (
    "duration", "protocol_type", "service", "flag", "src_bytes",
    "dst_bytes", "land", "wrong_fragment", "urgent", "hot",
    "num_failed_logins", "logged_in", "num_compromised", "root_shell",
    "su_attempted", "num_root", "num_file_creations", "num_shells",
    "num_access_files", "num_outbound_cmds", "is_host_login",
    "is_guest_login", "count", "srv_count", "serror_rate",
    "srv_serror_rate", "rerror_rate", "srv_rerror_rate", "same_srv_rate",
    "diff_srv_rate", "srv_diff_host_rate", "dst_host_count",
    "dst_host_srv_count", "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate", "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate", "dst_host_serror_rate",
    "dst_host_srv_serror_rate", "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
)
KDD_CATEGORICAL = ("protocol_type", "service", "flag")


@dataclass(frozen=True)
class RawRecord:
    features: tuple[str, ...]
    label: str

    def __post_init__(self):
        if not self.label.strip().rstrip("."):
            raise DataError("record label is empty")

    def to_line(self) -> str:
        return ",".join(self.features) + "," + self.label + "."


@dataclass(frozen=True)
class ClassLabel:
    category: str
    raw_name: str

    @property
    def is_attack(self) -> bool:
        return self.category != NORMAL


@dataclass(frozen=True)
class FeatureSchema:
    """Column names and kinds before encoding.

    ``vocabularies`` maps a categorical column name to its ordered tokens; a
    categorical column without an entry is fit from data by
    :func:`encode_features`.
    """

    names: tuple[str, ...]
    kinds: tuple[str, ...]
    vocabularies: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.names) != len(self.kinds):
            raise ValueError("names and kinds differ in length")
        for kind in self.kinds:
            if kind not in ("numeric", "categorical"):
                raise ValueError(f"unknown column kind {kind!r}")
        for name, vocab in self.vocabularies.items():
            if len(set(vocab)) != len(vocab):
                raise ValueError(f"duplicate tokens in vocabulary of {name!r}")

    def __len__(self):
        return len(self.names)

    @property
    def categorical(self) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k == "categorical"]

    def encoded_columns(self) -> list[str]:
        cols = []
        for name, kind in zip(self.names, self.kinds):
            if kind == "numeric":
                cols.append(name)
            else:
                cols.extend(f"{name}={tok}" for tok in self.vocabularies[name])
        return cols

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "kinds": list(self.kinds),
            "vocabularies": {k: list(v) for k, v in self.vocabularies.items()},
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "FeatureSchema":
        return cls(
            tuple(d["names"]),
            tuple(d["kinds"]),
            {k: tuple(v) for k, v in d.get("vocabularies", {}).items()},
        )


def kdd_schema(vocabularies: Mapping[str, Sequence[str]] | None = None) -> FeatureSchema:
    kinds = tuple("categorical" if n in KDD_CATEGORICAL else "numeric" for n in KDD_FEATURES)
    vocab = {k: tuple(v) for k, v in (vocabularies or {}).items()}
    return FeatureSchema(KDD_FEATURES, kinds, vocab)


@dataclass
class NumericDataset:
    rows: np.ndarray
    row_ids: np.ndarray
    columns: list[str]
    labels: list[ClassLabel] | None = None
    schema: FeatureSchema | None = None
    standardized: bool = False
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2:
            raise DataError(f"rows must be 2-D, got shape {self.rows.shape}")
        self.row_ids = np.asarray(self.row_ids, dtype=np.int64)
        n, d = self.rows.shape
        if len(self.row_ids) != n:
            raise DataError("row_ids length does not match row count")
        if len(np.unique(self.row_ids)) != n:
            raise DataError("row_ids are not unique")
        if len(self.columns) != d:
            raise DataError(f"{len(self.columns)} column names for {d} columns")
        if self.labels is not None and len(self.labels) != n:
            raise DataError("labels length does not match row count")
        if not np.all(np.isfinite(self.rows)):
            raise DataError("dataset contains NaN or infinite values")

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]

    def subset(self, idx) -> "NumericDataset":
        idx = np.asarray(idx, dtype=np.int64)
        labels = None if self.labels is None else [self.labels[i] for i in idx]
        return replace(self, rows=self.rows[idx], row_ids=self.row_ids[idx], labels=labels,
                       provenance=dict(self.provenance))

    @classmethod
    def from_array(cls, X, labels=None, row_ids=None) -> "NumericDataset":
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if row_ids is None:
            row_ids = np.arange(X.shape[0])
        cols = [f"x{j}" for j in range(X.shape[1])]
        return cls(X, row_ids, cols, labels=labels)


# --- parsing -----------------------------------------------------------------

def _is_number(token: str) -> bool:
    try:
        return math.isfinite(float(token))
    except ValueError:
        return False


def parse_kdd_record(line: str, schema: FeatureSchema | None = None,
                     line_no: int | None = None) -> RawRecord:
    schema = schema or kdd_schema()
    fields = [f.strip() for f in line.strip().split(",")]
    if len(fields) != len(schema) + 1:
        where = f"line {line_no}: " if line_no is not None else ""
        raise FieldCountMismatch(
            f"{where}expected {len(schema) + 1} fields, got {len(fields)}")
    features, label = fields[:-1], fields[-1]
    for j, kind in enumerate(schema.kinds):
        if kind == "numeric" and not _is_number(features[j]):
            raise NumericParseError(j, features[j], line_no)
    if label.endswith("."):
        label = label[:-1]
    if not label:
        raise DataError(f"empty label{f' on line {line_no}' if line_no is not None else ''}")
    return RawRecord(tuple(features), label)


def _open_text(path):
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"\x1f\x8b":
        return io.TextIOWrapper(gzip.open(path), encoding="utf-8")
    return open(path, encoding="utf-8")


def read_kdd_file(path, schema: FeatureSchema | None = None) -> list[RawRecord]:
    """Parse a plain or gzip-compressed KDD99 CSV file; blank lines are skipped."""
    schema = schema or kdd_schema()
    records = []
    with _open_text(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            if line.strip():
                records.append(parse_kdd_record(line, schema, line_no=line_no))
    return records


# --- labels ------------------------------------------------------------------

def default_taxonomy_path() -> Path:
    return Path(str(resources.files("kmedoid_ids") / "data" / "taxonomy.txt"))


def load_taxonomy(path=None) -> dict[str, str]:
    """Read ``attack_token<whitespace>category`` lines; ``#`` starts a comment."""
    path = default_taxonomy_path() if path is None else Path(path)
    taxonomy = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2 or parts[1].lower() not in CATEGORIES:
                raise DataError(f"{path}:{line_no}: malformed taxonomy line {line!r}")
            taxonomy[parts[0].lower().rstrip(".")] = parts[1].lower()
    return taxonomy


def map_label(raw_name: str, taxonomy: Mapping[str, str]) -> ClassLabel:
    key = raw_name.strip().rstrip(".").lower()
    if key == NORMAL:
        return ClassLabel(NORMAL, raw_name)
    try:
        return ClassLabel(taxonomy[key], raw_name)
    except KeyError:
        raise UnknownLabel(raw_name) from None


# --- encoding ----------------------------------------------------------------

def fit_vocabularies(records: Iterable[RawRecord], schema: FeatureSchema) -> FeatureSchema:
    """Fill in every missing categorical vocabulary with the sorted observed tokens."""
    missing = [j for j in schema.categorical if schema.names[j] not in schema.vocabularies]
    if not missing:
        return schema
    seen = {j: set() for j in missing}
    for rec in records:
        for j in missing:
            seen[j].add(rec.features[j])
    vocab = dict(schema.vocabularies)
    for j in missing:
        vocab[schema.names[j]] = tuple(sorted(seen[j]))
    return replace(schema, vocabularies=vocab)


def encode_features(records: Sequence[RawRecord], schema: FeatureSchema,
                    taxonomy: Mapping[str, str] | None = None,
                    row_ids=None) -> NumericDataset:
    """One-hot encode categorical columns and copy numeric ones.

    Vocabularies already present in ``schema`` are treated as fixed; any
    token outside them raises :class:`UnknownCategory`. When ``taxonomy``
    is given the labels are mapped and attached.
    """
    schema = fit_vocabularies(records, schema)
    index = {name: {tok: k for k, tok in enumerate(v)} for name, v in schema.vocabularies.items()}
    columns = schema.encoded_columns()
    X = np.zeros((len(records), len(columns)))
    for i, rec in enumerate(records):
        if len(rec.features) != len(schema):
            raise DataError(f"record {i} has {len(rec.features)} features, schema has {len(schema)}")
        pos = 0
        for j, (name, kind) in enumerate(zip(schema.names, schema.kinds)):
            tok = rec.features[j]
            if kind == "numeric":
                X[i, pos] = float(tok)
                pos += 1
            else:
                lookup = index[name]
                if tok not in lookup:
                    raise UnknownCategory(f"token {tok!r} not in vocabulary of column {name!r}")
                X[i, pos + lookup[tok]] = 1.0
                pos += len(lookup)
    labels = None
    if taxonomy is not None:
        labels = [map_label(rec.label, taxonomy) for rec in records]
    if row_ids is None:
        row_ids = np.arange(len(records))
    return NumericDataset(X, row_ids, columns, labels=labels, schema=schema)


# --- sampling ----------------------------------------------------------------

def _stratified_quotas(counts: Sequence[int], total: int) -> list[int]:
    # largest-remainder apportionment; ties go to the earlier stratum
    n = sum(counts)
    exact = [c * total / n for c in counts]
    quotas = [math.floor(e) for e in exact]
    order = sorted(range(len(counts)), key=lambda k: (-(exact[k] - quotas[k]), k))
    for k in order[: total - sum(quotas)]:
        quotas[k] += 1
    return quotas


def sample_dataset(dataset: NumericDataset, strategy: str, count: int, seed: int) -> NumericDataset:
    """Draw ``count`` rows without replacement; the result keeps input row order."""
    n = dataset.n
    if count < 1:
        raise CountExceedsPopulation(f"sample count must be positive, got {count}")
    if count > n:
        raise CountExceedsPopulation(f"sample count {count} exceeds population {n}")
    rng = np.random.default_rng(seed)
    if strategy == "uniform":
        idx = rng.choice(n, size=count, replace=False)
    elif strategy == "stratified":
        if dataset.labels is None:
            raise MissingLabels("stratified sampling needs labels")
        cats = np.array([lab.category for lab in dataset.labels])
        present = [c for c in CATEGORIES if np.any(cats == c)]
        members = [np.flatnonzero(cats == c) for c in present]
        quotas = _stratified_quotas([len(m) for m in members], count)
        idx = np.concatenate([rng.choice(m, size=q, replace=False) for m, q in zip(members, quotas)])
    else:
        raise ValueError(f"unknown sampling strategy {strategy!r}")
    out = dataset.subset(np.sort(idx))
    out.provenance["sample"] = {"strategy": strategy, "count": count, "seed": seed}
    return out


# --- serialization -------------------------------------------------------------

def save_dataset(dataset: NumericDataset, csv_path) -> Path:
    """Write ``<name>.csv`` plus a ``<name>.json`` sidecar describing its columns.

    The CSV holds ``row_id``, the encoded feature columns and, when labels are
    attached, ``category`` and ``raw_label``. Floats use ``repr`` so a reload
    is exact.
    """
    csv_path = Path(csv_path)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["row_id"] + list(dataset.columns)
    if dataset.labels is not None:
        header += ["category", "raw_label"]
    w.writerow(header)
    for i in range(dataset.n):
        row = [str(int(dataset.row_ids[i]))] + [repr(float(v)) for v in dataset.rows[i]]
        if dataset.labels is not None:
            row += [dataset.labels[i].category, dataset.labels[i].raw_name]
        w.writerow(row)
    sidecar = {
        "format": "kmedoid_ids.dataset/1",
        "csv": csv_path.name,
        "row_count": dataset.n,
        "columns": list(dataset.columns),
        "has_labels": dataset.labels is not None,
        "standardized": dataset.standardized,
        "schema": dataset.schema.to_dict() if dataset.schema else None,
        "provenance": dataset.provenance,
    }
    atomic_write_text(csv_path, buf.getvalue())
    atomic_write_text(csv_path.with_suffix(".json"), json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return csv_path.with_suffix(".json")


def load_dataset(sidecar_path) -> NumericDataset:
    sidecar_path = Path(sidecar_path)
    meta = json.loads(sidecar_path.read_text(encoding="utf-8"))
    d = len(meta["columns"])
    ids, rows, labels = [], [], []
    with open(sidecar_path.parent / meta["csv"], encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[1:1 + d] != meta["columns"]:
            raise DataError(f"{meta['csv']}: header does not match sidecar columns")
        for rec in reader:
            ids.append(int(rec[0]))
            rows.append([float(v) for v in rec[1:1 + d]])
            if meta["has_labels"]:
                labels.append(ClassLabel(rec[1 + d], rec[2 + d]))
    if len(ids) != meta["row_count"]:
        raise DataError(f"{meta['csv']}: expected {meta['row_count']} rows, found {len(ids)}")
    schema = FeatureSchema.from_dict(meta["schema"]) if meta.get("schema") else None
    return NumericDataset(
        np.array(rows, dtype=float).reshape(len(ids), d), ids, meta["columns"],
        labels=labels if meta["has_labels"] else None, schema=schema,
        standardized=meta.get("standardized", False), provenance=meta.get("provenance", {}),
    )
