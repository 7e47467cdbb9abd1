from fractions import Fraction as Q

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from bttypes import BuildingClassifier
from bttypes.config import ConfigError, load_config
from bttypes.criteria import ATYPICAL_A, KINDS, TYPE_BEARING
from bttypes.estimator import FEATURES
from bttypes.validation import as_rational, as_vector, check_depths, check_query_array

from conftest import SP4

PARAMS = dict(
    label="C2",
    levels=[[(0, 2), (0, -2)]],
    depths=(3, 3),
    x=(0, 0),
    folds=[((1, -1), 0)],
    box=[(-1, 1), (-1, 1)],
)

X = np.array([[0, 0, 0], [0, 0, 0.5], [0, 0.5, 0.25]])


def test_params_and_clone():
    est = BuildingClassifier(**PARAMS)
    assert est.get_params()["depths"] == (3, 3)
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    twin.set_params(p=7)
    assert est.p == 5


def test_fit_predict_shapes():
    est = BuildingClassifier(**PARAMS).fit(X)
    pred = est.predict(X)
    assert pred.shape == (3,)
    assert list(pred) == [TYPE_BEARING, ATYPICAL_A, ATYPICAL_A]
    assert list(est.classes_) == list(KINDS)
    assert est.n_features_in_ == 3


def test_transform_features():
    est = BuildingClassifier(**PARAMS)
    F = est.fit_transform(X)
    assert F.shape == (3, len(FEATURES))
    assert list(est.get_feature_names_out()) == list(FEATURES)
    col = {n: i for i, n in enumerate(FEATURES)}
    assert F[0, col["fixed_by_J"]] == 1 and F[0, col["distance2_to_x"]] == 0
    assert F[0, col["shadow_surjective"]] == 1
    assert F[1, col["shadow_size"]] == 1
    assert F[1, col["projection_criterion"]] == 1
    assert F[1, col["distance2_to_x"]] == 0.25


def test_score():
    est = BuildingClassifier(**PARAMS).fit()
    assert est.score(X, [TYPE_BEARING, ATYPICAL_A, ATYPICAL_A]) == 1.0
    assert est.score(X, [TYPE_BEARING] * 3) == pytest.approx(1 / 3)


def test_from_config_matches_cli_path():
    cfg = load_config(str(SP4))
    est = BuildingClassifier.from_config(cfg).fit()
    rows = [[z.chart, *z.coords] for z in cfg.query_points(est.atlas_)]
    kinds = est.predict(np.array(rows, dtype=object))
    assert (kinds == ATYPICAL_A).sum() == 100


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        BuildingClassifier(**PARAMS).predict(X)


@pytest.mark.parametrize("change,exc", [
    (dict(depths=(3, 1)), ConfigError),
    (dict(p=6), ConfigError),
    (dict(x=(0, 0, 0)), ValueError),
    (dict(depths=()), ValueError),
    (dict(label="E8"), ValueError),
])
def test_bad_params(change, exc):
    with pytest.raises(exc):
        BuildingClassifier(**{**PARAMS, **change}).fit()


def test_bad_query_rows():
    est = BuildingClassifier(**PARAMS).fit()
    with pytest.raises(ValueError):
        est.predict([[0, 0]])
    with pytest.raises(ValueError):
        est.predict([[0.5, 0, 0]])
    with pytest.raises(ValueError):
        est.predict(None)


def test_as_rational():
    assert as_rational(0.25) == Q(1, 4)
    assert as_rational(0.1) == Q(1, 10)
    assert as_rational("3/2") == Q(3, 2)
    assert as_rational(np.int64(4)) == 4
    for bad in (float("nan"), float("inf")):
        with pytest.raises(ValueError):
            as_rational(bad)
    with pytest.raises(TypeError):
        as_rational(True)
    with pytest.raises(TypeError):
        as_rational(object())
    with pytest.raises(ValueError):
        as_rational("1/0")


def test_vector_and_rows():
    assert as_vector([1, "1/2"], 2) == (Q(1), Q(1, 2))
    with pytest.raises(ValueError):
        as_vector([1], 2)
    assert check_query_array(np.array([[1, 0.5, 0]]), 2) == [(1, (Q(1, 2), Q(0)))]
    with pytest.raises(ValueError):
        check_query_array([[-1, 0, 0]], 2)
    assert check_depths([1, "3/2"]) == (Q(1), Q(3, 2))
