"""Confusion counts, detection/false-alarm/accuracy rates and report rendering.

The positive class is "intrusion". A rate whose denominator is zero is
reported as ``None`` (serialized as ``null`` / ``undefined``) rather than
0, so a report never invents a number.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .dataset import ATTACK_CATEGORIES
from .errors import EmptyEvaluation, RowMismatch

# Published comparison values, in percent. Never recomputed.
PUBLISHED_METHODS = ("K-means", "FCM", "Y-means", "Proposed algorithm")
PUBLISHED_TABLE1 = {
    "detection_rate": (82.3, 84.6, 86.3, 91.2),
    "accuracy": (77.25, 82.13, 87.15, 96.38),
    "false_alarm_rate": (5.2, 4.2, 3.9, 3.2),
}
PUBLISHED_TABLE2 = {
    "dos": (79.83, 83.12, 89.15, 96.12),
    "r2l": (78.12, 82.45, 85.10, 90.10),
    "u2r": (52.10, 60.10, 65.12, 70.51),
    "probe": (62.45, 65.25, 68.12, 70.13),
}

METRICS = ("detection_rate", "accuracy", "false_alarm_rate")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn}


def _truth_flags(predictions, truth):
    if len(predictions.anomalous) != len(truth):
        raise RowMismatch(f"{len(predictions.anomalous)} predictions for {len(truth)} truth labels")
    return np.asarray(predictions.anomalous, dtype=bool), [lab.category for lab in truth]


def confusion(predictions, truth) -> ConfusionMatrix:
    pred, cats = _truth_flags(predictions, truth)
    attack = np.array([c != "normal" for c in cats], dtype=bool)
    return ConfusionMatrix(
        tp=int(np.sum(pred & attack)),
        tn=int(np.sum(~pred & ~attack)),
        fp=int(np.sum(pred & ~attack)),
        fn=int(np.sum(~pred & attack)),
    )


def detection_rate(cm: ConfusionMatrix) -> float | None:
    positives = cm.tp + cm.fn
    return cm.tp / positives if positives else None


def false_alarm_rate(cm: ConfusionMatrix) -> float | None:
    negatives = cm.fp + cm.tn
    return cm.fp / negatives if negatives else None


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise EmptyEvaluation("accuracy of an empty evaluation is undefined")
    return (cm.tp + cm.tn) / cm.total


def per_category_rates(predictions, truth) -> dict[str, float | None]:
    pred, cats = _truth_flags(predictions, truth)
    cats = np.array(cats)
    out = {}
    for cat in ATTACK_CATEGORIES:
        mask = cats == cat
        total = int(mask.sum())
        out[cat] = int(np.sum(pred & mask)) / total if total else None
    return out


@dataclass
class MetricsReport:
    method: str
    confusion: ConfusionMatrix
    detection_rate: float | None
    accuracy: float
    false_alarm_rate: float | None
    per_category: dict
    labeling: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "confusion": self.confusion.to_dict(),
            "detection_rate": self.detection_rate,
            "accuracy": self.accuracy,
            "false_alarm_rate": self.false_alarm_rate,
            "per_category": dict(self.per_category),
            "labeling": self.labeling,
            "config": self.config,
            "reference": reference_tables(),
        }


def evaluate(predictions, truth, method: str, labeling=None, config=None) -> MetricsReport:
    cm = confusion(predictions, truth)
    return MetricsReport(
        method=method,
        confusion=cm,
        detection_rate=detection_rate(cm),
        accuracy=accuracy(cm),
        false_alarm_rate=false_alarm_rate(cm),
        per_category=per_category_rates(predictions, truth),
        labeling=labeling or {},
        config=config or {},
    )


def reference_tables() -> dict:
    """The published Table 1/2 numbers (percent), keyed by method."""
    out = {}
    for i, method in enumerate(PUBLISHED_METHODS):
        row = {m: PUBLISHED_TABLE1[m][i] for m in METRICS}
        row["per_category"] = {cat: PUBLISHED_TABLE2[cat][i] for cat in ATTACK_CATEGORIES}
        out[method] = row
    return {"source": "published values (percent), not recomputed", "methods": out}


def _pct(v):
    return None if v is None else round(100.0 * v, 10)


def plot_rows(reports) -> list[tuple]:
    """``(method, metric, percent, source)`` rows; measured first, then reference."""
    rows = []
    for rep in reports:
        for m in METRICS:
            rows.append((rep.method, m, _pct(getattr(rep, m)), "measured"))
        for cat in ATTACK_CATEGORIES:
            rows.append((rep.method, f"dr_{cat}", _pct(rep.per_category.get(cat)), "measured"))
    for i, method in enumerate(PUBLISHED_METHODS):
        for m in METRICS:
            rows.append((method, m, PUBLISHED_TABLE1[m][i], "published"))
        for cat in ATTACK_CATEGORIES:
            rows.append((method, f"dr_{cat}", PUBLISHED_TABLE2[cat][i], "published"))
    return rows


def plot_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "metric", "percent", "source"])
    for method, metric, value, source in plot_rows(reports):
        w.writerow([method, metric, "undefined" if value is None else repr(float(value)), source])
    return buf.getvalue()


def comparison_table(reports) -> str:
    """Fixed-width text table: measured rows followed by the published rows."""
    cols = list(METRICS) + [f"dr_{c}" for c in ATTACK_CATEGORIES]
    header = ["method", "source"] + cols
    lines = []
    for rep in reports:
        vals = [_pct(getattr(rep, m)) for m in METRICS]
        vals += [_pct(rep.per_category.get(c)) for c in ATTACK_CATEGORIES]
        lines.append([rep.method, "measured"] + ["undefined" if v is None else f"{v:.2f}" for v in vals])
    for i, method in enumerate(PUBLISHED_METHODS):
        vals = [PUBLISHED_TABLE1[m][i] for m in METRICS] + [PUBLISHED_TABLE2[c][i] for c in ATTACK_CATEGORIES]
        lines.append([method, "published"] + [f"{v:.2f}" for v in vals])
    widths = [max(len(r[j]) for r in [header] + lines) for j in range(len(header))]
    fmt = lambda r: "  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip()  # noqa: E731
    return "\n".join([fmt(header), fmt(["-" * w for w in widths])] + [fmt(r) for r in lines]) + "\n"
