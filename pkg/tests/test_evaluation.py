import csv
import io
from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kmedoid_ids.dataset import ATTACK_CATEGORIES, ClassLabel
from kmedoid_ids.errors import EmptyEvaluation, RowMismatch
from kmedoid_ids.evaluation import (
    PUBLISHED_METHODS,
    PUBLISHED_TABLE1,
    PUBLISHED_TABLE2,
    ConfusionMatrix,
    accuracy,
    comparison_table,
    confusion,
    detection_rate,
    evaluate,
    false_alarm_rate,
    per_category_rates,
    plot_csv,
)


def preds(flags):
    return SimpleNamespace(anomalous=np.asarray(flags, dtype=bool))


def labels(cats):
    return [ClassLabel(c, c) for c in cats]


def test_perfect_classifier():
    truth = labels(["dos"] * 10 + ["normal"] * 90)
    cm = confusion(preds([True] * 10 + [False] * 90), truth)
    assert cm == ConfusionMatrix(tp=10, tn=90, fp=0, fn=0)
    assert accuracy(cm) == 1.0


def test_all_normal_predictor():
    truth = labels(["probe"] * 7 + ["normal"] * 13)
    cm = confusion(preds([False] * 20), truth)
    assert cm == ConfusionMatrix(tp=0, tn=13, fp=0, fn=7)
    assert accuracy(cm) == 13 / 20
    assert detection_rate(cm) == 0.0
    assert false_alarm_rate(cm) == 0.0


def test_counting_example():
    truth = labels(["dos"] * 50 + ["normal"] * 50)
    flags = [True] * 45 + [False] * 5 + [True] * 2 + [False] * 48
    cm = confusion(preds(flags), truth)
    assert cm == ConfusionMatrix(45, 48, 2, 5)
    assert detection_rate(cm) == 0.90
    assert accuracy(cm) == 0.93
    assert false_alarm_rate(cm) == 0.04


def test_undefined_rates():
    assert detection_rate(ConfusionMatrix(0, 5, 1, 0)) is None
    assert false_alarm_rate(ConfusionMatrix(3, 0, 0, 1)) is None
    with pytest.raises(EmptyEvaluation):
        accuracy(ConfusionMatrix(0, 0, 0, 0))


def test_row_mismatch():
    with pytest.raises(RowMismatch):
        confusion(preds([True]), labels(["dos", "normal"]))


def test_per_category():
    truth = labels(["dos"] * 10 + ["normal"] * 5 + ["r2l"] * 4)
    flags = [True] * 9 + [False] + [False] * 5 + [True, False, False, False]
    rates = per_category_rates(preds(flags), truth)
    assert rates["dos"] == 0.9
    assert rates["r2l"] == 0.25
    assert rates["u2r"] is None and rates["probe"] is None


cat_lists = st.lists(st.sampled_from(("normal",) + ATTACK_CATEGORIES), min_size=1, max_size=200)


@given(cat_lists, st.data())
def test_metric_identities(cats, data):
    flags = data.draw(st.lists(st.booleans(), min_size=len(cats), max_size=len(cats)))
    truth = labels(cats)
    cm = confusion(preds(flags), truth)
    assert cm.total == len(cats)
    dr = detection_rate(cm)
    if dr is None:
        assert all(c == "normal" for c in cats)
    else:
        # exact complement in rational arithmetic, and within 1e-12 in floats
        assert Fraction(cm.tp, cm.tp + cm.fn) + Fraction(cm.fn, cm.tp + cm.fn) == 1
        assert abs(dr + cm.fn / (cm.tp + cm.fn) - 1.0) <= 1e-12
        per = per_category_rates(preds(flags), truth)
        n_att = cm.tp + cm.fn
        recomposed = sum(cats.count(k) / n_att * per[k] for k in ATTACK_CATEGORIES if per[k] is not None)
        assert abs(recomposed - dr) <= 1e-12
    normal_share = cats.count("normal") / len(cats)
    assert accuracy(confusion(preds([False] * len(cats)), truth)) == normal_share
    for v in (dr, accuracy(cm), false_alarm_rate(cm)):
        assert v is None or 0.0 <= v <= 1.0


def test_published_reference_values():
    assert PUBLISHED_METHODS == ("K-means", "FCM", "Y-means", "Proposed algorithm")
    assert PUBLISHED_TABLE1["detection_rate"] == (82.3, 84.6, 86.3, 91.2)
    assert PUBLISHED_TABLE1["accuracy"] == (77.25, 82.13, 87.15, 96.38)
    assert PUBLISHED_TABLE1["false_alarm_rate"] == (5.2, 4.2, 3.9, 3.2)
    assert PUBLISHED_TABLE2["dos"] == (79.83, 83.12, 89.15, 96.12)
    assert PUBLISHED_TABLE2["r2l"] == (78.12, 82.45, 85.10, 90.10)
    assert PUBLISHED_TABLE2["u2r"] == (52.10, 60.10, 65.12, 70.51)
    assert PUBLISHED_TABLE2["probe"] == (62.45, 65.25, 68.12, 70.13)


def test_report_and_renderings():
    truth = labels(["dos"] * 50 + ["normal"] * 50)
    flags = [True] * 45 + [False] * 5 + [True] * 2 + [False] * 48
    rep = evaluate(preds(flags), truth, "new-medoid")
    d = rep.to_dict()
    assert d["confusion"] == {"tp": 45, "tn": 48, "fp": 2, "fn": 5}
    assert d["per_category"]["u2r"] is None
    assert d["reference"]["methods"]["Proposed algorithm"]["detection_rate"] == 91.2

    rows = list(csv.DictReader(io.StringIO(plot_csv([rep]))))
    measured = {r["metric"]: r["percent"] for r in rows if r["source"] == "measured"}
    assert float(measured["detection_rate"]) == 90.0
    assert measured["dr_u2r"] == "undefined"
    assert sum(r["source"] == "published" for r in rows) == 4 * 7

    table = comparison_table([rep])
    assert table.count("published") == 4 and table.count("measured") == 1
    assert "96.38" in table
