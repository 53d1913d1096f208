import gzip

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmedoid_ids.dataset import (
    ATTACK_CATEGORIES,
    KDD_FEATURES,
    ClassLabel,
    FeatureSchema,
    NumericDataset,
    RawRecord,
    encode_features,
    kdd_schema,
    load_dataset,
    load_taxonomy,
    map_label,
    parse_kdd_record,
    read_kdd_file,
    sample_dataset,
    save_dataset,
)
from kmedoid_ids.errors import (
    CountExceedsPopulation,
    DataError,
    FieldCountMismatch,
    MissingLabels,
    NumericParseError,
    UnknownCategory,
    UnknownLabel,
)


def test_kdd_schema_shape():
    schema = kdd_schema()
    assert len(schema) == len(KDD_FEATURES) == 41
    assert schema.categorical == [1, 2, 3]


def test_parse_normal_record(normal_line):
    rec = parse_kdd_record(normal_line)
    assert rec.label == "normal"
    assert len(rec.features) == 41
    assert rec.features[1:4] == ("tcp", "http", "SF")


def test_parse_wrong_field_count():
    with pytest.raises(FieldCountMismatch):
        parse_kdd_record(",".join(["0"] * 10))


def test_parse_non_numeric(normal_line):
    bad = "abc" + normal_line[1:]
    with pytest.raises(NumericParseError) as exc:
        parse_kdd_record(bad)
    assert exc.value.column == 0


def test_parse_rejects_empty_label(normal_line):
    with pytest.raises(DataError):
        parse_kdd_record(normal_line.rsplit(",", 1)[0] + ",.")


def _token(kind):
    if kind == "numeric":
        return st.one_of(st.integers(0, 10**6).map(str),
                         st.floats(0, 1, allow_nan=False).map(lambda v: f"{v:.2f}"))
    return st.sampled_from(["tcp", "udp", "icmp", "http", "SF", "S0", "REJ", "private"])


@st.composite
def raw_records(draw):
    schema = kdd_schema()
    feats = tuple(draw(_token(kind)) for kind in schema.kinds)
    label = draw(st.sampled_from(["normal", "smurf", "neptune", "rootkit", "guess_passwd"]))
    return RawRecord(feats, label)


@given(raw_records())
def test_render_parse_round_trip(rec):
    assert parse_kdd_record(rec.to_line()) == rec


def test_read_plain_and_gzip(tmp_path, normal_line):
    text = normal_line + "\n\n" + normal_line.replace("normal.", "smurf.") + "\n"
    plain = tmp_path / "a.csv"
    plain.write_text(text)
    zipped = tmp_path / "a.csv.gz"
    with gzip.open(zipped, "wt") as fh:
        fh.write(text)
    assert read_kdd_file(plain) == read_kdd_file(zipped)
    assert [r.label for r in read_kdd_file(plain)] == ["normal", "smurf"]


def test_read_reports_line_number(tmp_path, normal_line):
    path = tmp_path / "bad.csv"
    path.write_text(normal_line + "\n" + "1,2,3\n")
    with pytest.raises(FieldCountMismatch, match="line 2"):
        read_kdd_file(path)


# --- labels ---------------------------------------------------------------------

@pytest.fixture(scope="module")
def taxonomy():
    return load_taxonomy()


@pytest.mark.parametrize("raw, category", [
    ("normal", "normal"),
    ("normal.", "normal"),
    ("smurf", "dos"),
    ("rootkit", "u2r"),
    ("PortSweep", "probe"),
    ("guess_passwd.", "r2l"),
])
def test_map_label(taxonomy, raw, category):
    lab = map_label(raw, taxonomy)
    assert lab == ClassLabel(category, raw)


def test_map_label_unknown(taxonomy):
    with pytest.raises(UnknownLabel, match="zeroday"):
        map_label("zeroday", taxonomy)


def test_taxonomy_is_total_over_its_file(taxonomy_path, taxonomy):
    tokens = [line.split()[0] for line in taxonomy_path.read_text().splitlines()
              if line.strip() and not line.startswith("#")]
    assert len(tokens) == len(taxonomy) >= 22
    for tok in tokens:
        assert map_label(tok, taxonomy).category in ATTACK_CATEGORIES


def test_taxonomy_rejects_bad_category(tmp_path):
    path = tmp_path / "tax.txt"
    path.write_text("smurf dos\nfoo bogus\n")
    with pytest.raises(DataError, match=":2"):
        load_taxonomy(path)


# --- encoding -------------------------------------------------------------------

def small_schema(vocab=None):
    return FeatureSchema(("a", "proto", "b"), ("numeric", "categorical", "numeric"), vocab or {})


def test_one_hot_indicator():
    schema = small_schema({"proto": ("tcp", "udp", "icmp")})
    ds = encode_features([RawRecord(("1", "udp", "2"), "normal")], schema)
    assert ds.columns == ["a", "proto=tcp", "proto=udp", "proto=icmp", "b"]
    np.testing.assert_array_equal(ds.rows, [[1, 0, 1, 0, 2]])


def test_all_numeric_copied():
    schema = FeatureSchema(tuple(f"f{i}" for i in range(41)), ("numeric",) * 41)
    vals = tuple(str(i * 0.5) for i in range(41))
    ds = encode_features([RawRecord(vals, "normal")], schema)
    assert ds.d == 41
    np.testing.assert_array_equal(ds.rows[0], [float(v) for v in vals])


def test_encoded_width():
    schema = small_schema()
    recs = [RawRecord(("1", t, "2"), "normal") for t in ("a", "b", "a")]
    ds = encode_features(recs, schema)
    assert ds.d == 2 + 2
    assert ds.schema.vocabularies["proto"] == ("a", "b")


def test_fixed_vocabulary_rejects_new_token():
    with pytest.raises(UnknownCategory):
        encode_features([RawRecord(("1", "sctp", "2"), "normal")], small_schema({"proto": ("tcp",)}))


def test_one_hot_groups_sum_to_one(sample_path, taxonomy):
    ds = encode_features(read_kdd_file(sample_path), kdd_schema(), taxonomy)
    for name in ("protocol_type", "service", "flag"):
        group = [j for j, col in enumerate(ds.columns) if col.startswith(name + "=")]
        np.testing.assert_array_equal(ds.rows[:, group].sum(axis=1), 1.0)
    n_numeric = 41 - 3
    assert ds.d == n_numeric + sum(len(v) for v in ds.schema.vocabularies.values())
    assert ds.labels[0].category in ("normal",) + ATTACK_CATEGORIES


def test_dataset_rejects_non_finite():
    with pytest.raises(DataError):
        NumericDataset.from_array([[1.0, np.nan]])


def test_dataset_rejects_duplicate_ids():
    with pytest.raises(DataError):
        NumericDataset(np.zeros((2, 1)), [3, 3], ["x"])


# --- sampling -------------------------------------------------------------------

def labelled(n_normal, n_dos):
    labels = [ClassLabel("normal", "normal")] * n_normal + [ClassLabel("dos", "smurf")] * n_dos
    X = np.arange(len(labels), dtype=float)[:, None]
    return NumericDataset.from_array(X, labels=labels)


def test_sample_full_count_is_identity():
    ds = labelled(9, 1)
    out = sample_dataset(ds, "uniform", ds.n, seed=3)
    np.testing.assert_array_equal(out.row_ids, ds.row_ids)
    np.testing.assert_array_equal(out.rows, ds.rows)


@pytest.mark.parametrize("strategy", ["uniform", "stratified"])
def test_sample_is_deterministic(strategy):
    ds = labelled(300, 40)
    a = sample_dataset(ds, strategy, 50, seed=11)
    b = sample_dataset(ds, strategy, 50, seed=11)
    np.testing.assert_array_equal(a.row_ids, b.row_ids)
    assert a.provenance["sample"] == {"strategy": strategy, "count": 50, "seed": 11}


def test_stratified_proportions():
    ds = labelled(900, 100)
    out = sample_dataset(ds, "stratified", 100, seed=0)
    cats = [lab.category for lab in out.labels]
    assert abs(cats.count("normal") - 90) <= 1
    assert abs(cats.count("dos") - 10) <= 1


@given(st.integers(1, 400), st.integers(1, 400), st.integers(0, 2**31), st.data())
@settings(max_examples=50, deadline=None)
def test_stratified_within_one_per_category(n_normal, n_dos, seed, data):
    ds = labelled(n_normal, n_dos)
    count = data.draw(st.integers(1, ds.n))
    out = sample_dataset(ds, "stratified", count, seed)
    cats = [lab.category for lab in out.labels]
    assert len(cats) == count
    assert abs(cats.count("normal") - count * n_normal / ds.n) <= 1
    assert abs(cats.count("dos") - count * n_dos / ds.n) <= 1


def test_sample_errors():
    ds = labelled(5, 0)
    with pytest.raises(CountExceedsPopulation):
        sample_dataset(ds, "uniform", 6, 0)
    with pytest.raises(MissingLabels):
        sample_dataset(NumericDataset.from_array(np.zeros((4, 1))), "stratified", 2, 0)


def test_save_load_round_trip(tmp_path, sample_path, taxonomy):
    ds = encode_features(read_kdd_file(sample_path)[:50], kdd_schema(), taxonomy)
    ds = sample_dataset(ds, "uniform", 20, seed=1)
    sidecar = save_dataset(ds, tmp_path / "ds.csv")
    back = load_dataset(sidecar)
    np.testing.assert_array_equal(back.rows, ds.rows)
    np.testing.assert_array_equal(back.row_ids, ds.row_ids)
    assert back.labels == ds.labels
    assert back.columns == ds.columns
    assert back.schema == ds.schema
    assert back.provenance["sample"]["seed"] == 1
