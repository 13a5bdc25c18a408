import math

import numpy as np
import pytest

import msnm


@pytest.fixture(scope="module")
def fitted():
    calib, test = msnm.generate_synthetic(seed=1)
    scaler = msnm.fit_scaler(calib["values"], calib["features"])
    model = msnm.fit_model(scaler.transform(calib["values"]), 1)
    return scaler, model, test


def test_chi2_thresholds():
    assert abs(msnm.chi2_threshold(2, 0.95) - 5.99) < 0.01
    assert abs(msnm.chi2_threshold(2, 0.99) - 9.21) < 0.01
    assert math.isclose(msnm.chi2_quantile(0.5, 2), 2 * math.log(2), rel_tol=1e-12)


def test_eig_two_by_two():
    vals, vecs = msnm.eig_symmetric(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(vals, [3.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(vecs[:, 0], [2**-0.5, 2**-0.5], atol=1e-14)


def test_model_shape(fitted):
    scaler, model, _ = fitted
    assert (model.m, model.p) == (2, 1)
    assert model.sigma2_ml == model.eigenvalues[1]
    assert scaler.retained_names == ["x1", "x2"]


def test_equivalent_scorers_rank_identically(fitted):
    scaler, model, test = fitted
    x = scaler.transform(test["values"])
    exact = msnm.score(model, x, msnm.default_scoring(model, msnm.Scorer.ppca_exact))["combined"]
    falpha = msnm.score(model, x, msnm.default_scoring(model, msnm.Scorer.msnm_falpha))["combined"]
    np.testing.assert_allclose(exact, falpha, rtol=1e-9)
    positive = [label != "normal" for label in test["labels"]]
    auc_exact, _, _ = msnm.roc_auc(list(exact), positive)
    auc_falpha, fpr, tpr = msnm.roc_auc(list(falpha), positive)
    assert abs(auc_exact - auc_falpha) < 1e-6
    assert fpr[0] == 0.0 and tpr[-1] == 1.0


def test_f_alpha_symmetry(fitted):
    _, model, test = fitted
    x = np.asarray(test["values"][1100])
    alpha = 0.5 * model.lambda_p
    f0, _, _ = msnm.f_alpha(model, x, alpha, 0.0)
    fa, _, _ = msnm.f_alpha(model, x, alpha, alpha)
    fm, _, _ = msnm.f_alpha(model, x, alpha, alpha / 2)
    assert math.isclose(f0, fa, rel_tol=1e-9)
    assert fm <= f0


def test_woodbury_matches_dense(fitted):
    _, model, _ = fitted
    s2 = model.sigma2_ml
    w = model.loadings(s2)
    c = w @ w.T + s2 * np.eye(model.m)
    x = np.array([0.3, -1.7])
    np.testing.assert_allclose(msnm.ppca_precision_apply(model, x), np.linalg.solve(c, x), rtol=1e-10)


def test_calibration_and_roundtrip(fitted, tmp_path):
    scaler, model, _ = fitted
    calib, _ = msnm.generate_synthetic(seed=1)
    x = scaler.transform(calib["values"])
    cfg = msnm.default_scoring(model)
    t = msnm.calibrate(model, x, cfg, 0.99, 0.99)
    flagged = sum(t.is_flagged(s) for s in msnm.score(model, x, cfg)["combined"])
    assert 8 <= flagged <= 12

    bundle = msnm.ModelBundle(model, scaler, cfg, t)
    path = tmp_path / "model.json"
    msnm.save_model(path, bundle)
    back = msnm.load_model(path)
    a = msnm.score(model, x, cfg)["combined"]
    b = msnm.score(back.model, x, back.scoring)["combined"]
    assert np.array_equal(a, b)
    assert msnm.serialize_model(back) == path.read_text()


def test_validation_errors_are_value_errors(fitted):
    _, model, _ = fitted
    with pytest.raises(ValueError, match="delta outside"):
        model.loadings(model.lambda_p)
    with pytest.raises(msnm.ValidationError, match="unsupported model version"):
        msnm.deserialize_model('{"version": "v99"}')
    with pytest.raises(ValueError, match="degenerate evaluation"):
        msnm.roc_auc([1.0, 2.0], [True, True])
