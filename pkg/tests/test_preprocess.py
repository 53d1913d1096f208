import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kmedoid_ids.dataset import NumericDataset
from kmedoid_ids.errors import DimensionMismatch, EmptyDataset
from kmedoid_ids.preprocess import (
    StandardizationParams,
    apply_standardizer,
    fit_standardizer,
    inverse_standardize,
    standardize_array,
)

from oracles import mean_abs_dev


def ds(values):
    return NumericDataset.from_array(np.asarray(values, dtype=float))


def test_fit_two_four_six():
    params = fit_standardizer(ds([[2.0], [4.0], [6.0]]))
    mu, mad = mean_abs_dev([2, 4, 6])
    assert params.mean[0] == mu == 4.0
    assert params.scale[0] == pytest.approx(mad, abs=1e-15)
    assert params.scale[0] == pytest.approx(4 / 3, abs=1e-15)


def test_apply_two_four_six():
    data = ds([[2.0], [4.0], [6.0]])
    out = apply_standardizer(fit_standardizer(data), data)
    np.testing.assert_allclose(out.rows[:, 0], [-1.5, 0.0, 1.5], atol=1e-15)
    assert out.standardized


def test_constant_feature():
    data = ds([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]])
    params = fit_standardizer(data)
    assert params.mean[0] == 5.0 and params.scale[0] == 0.0
    np.testing.assert_array_equal(apply_standardizer(params, data).rows[:, 0], 0.0)


def test_single_row():
    params = fit_standardizer(ds([[3.0, -7.0]]))
    np.testing.assert_array_equal(params.mean, [3.0, -7.0])
    np.testing.assert_array_equal(params.scale, [0.0, 0.0])


def test_value_at_mean_maps_to_zero():
    params = StandardizationParams(np.array([2.0]), np.array([0.5]), 10)
    assert standardize_array(params, [[2.0]])[0, 0] == 0.0


def test_errors():
    with pytest.raises(EmptyDataset):
        fit_standardizer(np.zeros((0, 3)))
    params = fit_standardizer(ds([[1.0, 2.0], [3.0, 4.0]]))
    with pytest.raises(DimensionMismatch):
        standardize_array(params, np.zeros((2, 3)))


def test_params_json_round_trip(tmp_path):
    data = NumericDataset(np.array([[1.0, 2.0], [3.0, 5.0]]), [0, 1], ["alpha", "beta"])
    params = fit_standardizer(data)
    params.save(tmp_path / "p.json")
    back = StandardizationParams.load(tmp_path / "p.json")
    np.testing.assert_array_equal(back.mean, params.mean)
    np.testing.assert_array_equal(back.scale, params.scale)
    assert back.columns == ("alpha", "beta") and back.n_fit == 2


matrices = arrays(
    np.float64,
    st.tuples(st.integers(1, 40), st.integers(1, 6)),
    elements=st.floats(-1e4, 1e4, allow_nan=False, allow_infinity=False),
)


@given(matrices)
@settings(max_examples=200, deadline=None)
def test_standardized_moments(X):
    params = fit_standardizer(X)
    S = standardize_array(params, X)
    assert np.all(np.isfinite(S))
    for j in range(X.shape[1]):
        mu, mad = mean_abs_dev(list(X[:, j]))
        assert params.mean[j] == pytest.approx(mu, rel=1e-12, abs=1e-9)
        if params.scale[j] == 0:
            assert np.all(S[:, j] == 0)
            continue
        # relative spread too small to standardize meaningfully in float64
        if params.scale[j] < 1e-8 * max(1.0, abs(params.mean[j])):
            continue
        s_mu, s_mad = mean_abs_dev(list(S[:, j]))
        assert abs(s_mu) <= 1e-9
        assert abs(s_mad - 1.0) <= 1e-9


@given(matrices)
@settings(max_examples=100, deadline=None)
def test_inverse_recovers_input(X):
    params = fit_standardizer(X)
    back = inverse_standardize(params, standardize_array(params, X))
    live = params.scale > 0
    np.testing.assert_allclose(back[:, live], X[:, live], rtol=0, atol=1e-9 * max(1.0, np.abs(X).max()))


@given(matrices)
@settings(max_examples=100, deadline=None)
def test_restandardizing_is_stable(X):
    S = standardize_array(fit_standardizer(X), X)
    params2 = fit_standardizer(S)
    S2 = standardize_array(params2, S)
    live = params2.scale > 1e-6
    np.testing.assert_allclose(S2[:, live], S[:, live], atol=1e-9)


@pytest.mark.parametrize("value", [0.1, 1e-300, -7.3, 1e300])
def test_constant_column_has_exact_mean(value):
    X = np.full((3, 1), value)
    params = fit_standardizer(X)
    assert params.mean[0] == value and params.scale[0] == 0.0
    assert np.all(standardize_array(params, X) == 0.0)
