import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from sparsepath import (
    DataError,
    Dataset,
    FormatError,
    ParameterError,
    ParseError,
    generate_synthetic,
    load_csv,
    save_csv,
    standardize,
)


def test_dataset_validation():
    with pytest.raises(DataError):
        Dataset(x=np.ones((1, 3)), y=np.ones(1))  # n < 2
    with pytest.raises(DataError):
        Dataset(x=np.ones((3, 2)), y=np.ones(2))  # length mismatch
    with pytest.raises(DataError):
        Dataset(x=np.array([[1.0, np.inf], [0.0, 1.0]]), y=np.zeros(2))
    ds = Dataset(x=np.arange(6.0).reshape(3, 2), y=np.zeros(3))
    assert ds.x.flags.f_contiguous
    assert not ds.x.flags.writeable


def test_load_csv_basic(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("1,2,3\n4,5,6\n7,8,9\n")
    ds = load_csv(p, has_header=False, response_column=0)
    np.testing.assert_array_equal(ds.y, [1, 4, 7])
    np.testing.assert_array_equal(ds.x, [[2, 3], [5, 6], [8, 9]])
    assert ds.feature_names == ["col1", "col2"]


def test_load_csv_header_and_named_response(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("a,b,y\n1,2,3\n4,5,6\n")
    ds = load_csv(p, has_header=True, response_column="y")
    np.testing.assert_array_equal(ds.y, [3, 6])
    assert ds.feature_names == ["a", "b"]
    with pytest.raises(ParameterError):
        load_csv(p, has_header=True, response_column="nope")
    with pytest.raises(ParameterError):
        load_csv(p, has_header=False, response_column="y")


def test_load_csv_error_locations(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,2\n3,oops\n")
    with pytest.raises(ParseError) as exc:
        load_csv(p)
    assert exc.value.row == 2 and exc.value.column == 2
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1,2\n3\n")
    with pytest.raises(FormatError):
        load_csv(ragged)
    narrow = tmp_path / "narrow.csv"
    narrow.write_text("1\n2\n")
    with pytest.raises(FormatError):
        load_csv(narrow)


def test_csv_round_trip(tmp_path, rng):
    ds, _ = generate_synthetic(25, 7, 3, 0.4, seed=5)
    p = tmp_path / "rt.csv"
    save_csv(ds, p)
    back = load_csv(p, has_header=True, response_column="y")
    np.testing.assert_allclose(back.x, ds.x, atol=1e-12)
    np.testing.assert_allclose(back.y, ds.y, atol=1e-12)
    assert back.feature_names == ds.feature_names


def test_standardize_moments_and_idempotence(rng):
    x = rng.normal(loc=3.0, scale=2.5, size=(60, 8))
    ds = Dataset(x=x, y=rng.normal(size=60))
    std, rec = standardize(ds)
    np.testing.assert_allclose(std.x.mean(axis=0), 0.0, atol=1e-10)
    np.testing.assert_allclose(np.mean(std.x**2, axis=0), 1.0, atol=1e-8)
    again, rec2 = standardize(std)
    np.testing.assert_allclose(again.x, std.x, atol=1e-12)
    assert rec2.dropped.size == 0


def test_standardize_drops_constant_columns(rng):
    x = rng.normal(size=(30, 4))
    x[:, 2] = 1.0
    ds = Dataset(x=x, y=rng.normal(size=30))
    with pytest.warns(UserWarning, match="constant"):
        std, rec = standardize(ds)
    assert std.d == 3
    np.testing.assert_array_equal(rec.dropped, [2])
    np.testing.assert_array_equal(rec.kept, [0, 1, 3])


def test_unstandardize_reproduces_predictions(rng):
    x = rng.normal(loc=-1.0, scale=4.0, size=(40, 6))
    y = rng.normal(size=40)
    ds = Dataset(x=x, y=y)
    std, rec = standardize(ds)
    beta_std = rng.normal(size=std.d)
    b_std = 0.7
    pred_std = std.x @ beta_std + b_std
    beta, b = rec.unstandardize(beta_std, b_std)
    pred = ds.x @ beta + b
    np.testing.assert_allclose(pred, pred_std, atol=1e-10)


@given(arrays(np.float64, (12, 4), elements=st.floats(-50, 50)))
def test_standardize_idempotent_property(x):
    if np.any(np.sqrt(np.mean((x - x.mean(axis=0)) ** 2, axis=0)) <= 1e-10):
        return  # constant columns take the drop branch
    ds = Dataset(x=x, y=np.zeros(12) + np.arange(12.0))
    std, _ = standardize(ds)
    again, _ = standardize(std)
    np.testing.assert_allclose(again.x, std.x, atol=1e-10)


def test_generator_determinism_and_validity():
    a, beta_a = generate_synthetic(50, 20, 5, 0.5, seed=123)
    b, beta_b = generate_synthetic(50, 20, 5, 0.5, seed=123)
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.y, b.y)
    np.testing.assert_array_equal(beta_a, beta_b)
    c, _ = generate_synthetic(50, 20, 5, 0.5, seed=124)
    assert not np.array_equal(a.x, c.x)
    binom, _ = generate_synthetic(60, 10, 3, 0.2, family="binomial", seed=1)
    assert set(np.unique(binom.y)) <= {0.0, 1.0}
    poi, _ = generate_synthetic(60, 10, 3, 0.2, family="poisson", seed=1)
    assert np.all(poi.y >= 0) and np.allclose(poi.y, np.round(poi.y))


def test_generator_parameter_errors():
    with pytest.raises(ParameterError):
        generate_synthetic(20, 10, 3, 1.0, seed=0)
    with pytest.raises(ParameterError):
        generate_synthetic(20, 10, 11, 0.5, seed=0)
    with pytest.raises(ParameterError):
        generate_synthetic(20, 10, 3, 0.5, family="weird", seed=0)


def test_generator_uncorrelated_columns():
    ds, _ = generate_synthetic(5000, 10, 2, 0.0, seed=77)
    corr = np.corrcoef(ds.x, rowvar=False)
    off = corr[~np.eye(10, dtype=bool)]
    assert np.max(np.abs(off)) < 4.0 / np.sqrt(5000)


def test_generator_ar1_structure():
    ds, _ = generate_synthetic(20000, 6, 2, 0.6, seed=3)
    corr = np.corrcoef(ds.x, rowvar=False)
    for j, k in ((0, 1), (1, 2), (2, 4)):
        assert corr[j, k] == pytest.approx(0.6 ** abs(j - k), abs=0.03)


def test_generator_conditioning_knob():
    well, _ = generate_synthetic(400, 50, 5, 0.5, seed=11)
    ill, _ = generate_synthetic(400, 50, 5, 0.95, seed=11)
    cond_well = np.linalg.cond(well.x.T @ well.x / 400)
    cond_ill = np.linalg.cond(ill.x.T @ ill.x / 400)
    assert cond_ill > 10.0 * cond_well
