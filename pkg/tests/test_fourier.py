import numpy as np
import pytest

from modlearn import dataset, fourier
from modlearn.fourier import FourierRegressionClassifier

STANDARD_FRACTION = 25000 / 30000


def _standard_fit(p, seed=8, **kwargs):
    d = dataset.generate(seed, 30000, p)
    train, test = dataset.split(d, STANDARD_FRACTION)
    model = FourierRegressionClassifier(p=p, **kwargs).fit(train.xs, train.ys)
    return model, train, test


def test_pair_counts():
    assert fourier.pair_count(3) == 1
    assert fourier.pair_count(7) == 3
    assert fourier.pair_count(2) == 1
    assert fourier.pair_count(12) == 6
    assert fourier.basis_features(1, 7).shape == (6,)


def test_basis_features_at_zero():
    v = fourier.basis_features(0, 7)
    assert v == pytest.approx([0, 1, 0, 1, 0, 1])


def test_basis_features_full_period():
    assert fourier.basis_features(3, 3) == pytest.approx([0.0, 1.0], abs=1e-15)


def test_basis_features_periodic_at_domain_edge():
    # 2**32 mod 7 == 4; exact integer reduction makes the features identical
    far = fourier.basis_features(2**32, 7)
    near = fourier.basis_features(4, 7)
    assert np.max(np.abs(far - near)) <= 1e-12


def test_closed_form_mod3():
    intercept, sine, cosine = fourier.closed_form_coefficients(3)
    assert intercept == pytest.approx(1.0)
    assert sine[0] == pytest.approx(-1.0 / np.sqrt(3.0))
    assert sine[0] == pytest.approx(-0.57735, abs=5e-6)
    assert cosine[0] == pytest.approx(-1.0)


def test_closed_form_mod7():
    intercept, sine, cosine = fourier.closed_form_coefficients(7)
    assert intercept == pytest.approx(3.0)
    assert sine == pytest.approx([-2.076521, -0.797473, -0.228243], abs=5e-7)
    assert cosine == pytest.approx([-1.0, -1.0, -1.0])


def test_closed_form_mod2():
    intercept, sine, cosine = fourier.closed_form_coefficients(2)
    assert intercept == pytest.approx(0.5)
    assert sine[0] == 0.0
    assert cosine[0] == pytest.approx(-0.5)


@pytest.mark.parametrize("p", range(2, 51))
def test_closed_form_interpolates_exactly(p):
    model = FourierRegressionClassifier.closed_form(p)
    xs = np.arange(0, 10 * p + 1, dtype=np.uint64)
    raw = model.predict_raw(xs)
    labels = xs.astype(np.int64) % p
    assert np.max(np.abs(raw - labels)) <= 1e-8
    assert np.array_equal(model.predict(xs), labels)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_ols_recovers_closed_form(p):
    d = dataset.generate(8, 2000, p)
    model = FourierRegressionClassifier(p=p).fit(d.xs, d.ys)
    intercept, sine, cosine = fourier.closed_form_coefficients(p)
    assert model.intercept_ == pytest.approx(intercept, abs=1e-6)
    assert model.cosine_coefficients_ == pytest.approx(cosine, abs=1e-6)
    if p == 2:
        # the sine column vanishes at integers; its coefficient is unidentifiable
        assert model.diagnostics_.rank_warning
    else:
        assert model.sine_coefficients_ == pytest.approx(sine, abs=1e-6)
        assert not model.diagnostics_.rank_warning


def test_fit_mod3_standard_protocol():
    model, _, test = _standard_fit(3)
    assert model.intercept_ == pytest.approx(1.0, abs=1e-3)
    assert model.sine_coefficients_[0] == pytest.approx(-0.57735, abs=1e-3)
    assert model.cosine_coefficients_[0] == pytest.approx(-1.0, abs=1e-3)
    assert model.diagnostics_.r_squared == pytest.approx(1.0, abs=1e-10)
    assert fourier.evaluate_accuracy(model, test) == 1.0


def test_fit_mod2_tiny_training_set():
    model = FourierRegressionClassifier(p=2).fit([0, 1, 2, 3], [0, 1, 0, 1])
    assert model.intercept_ == pytest.approx(0.5, abs=1e-9)
    assert model.cosine_coefficients_[0] == pytest.approx(-0.5, abs=1e-9)
    assert abs(model.sine_coefficients_[0]) < 1e-6
    assert model.diagnostics_.rank_warning


def test_fit_requires_every_residue_class():
    xs = np.array([0, 1, 3, 4, 6, 7], dtype=np.uint64)  # residues mod 3 miss class 2
    with pytest.raises(ValueError, match=r"\[2\]"):
        FourierRegressionClassifier(p=3).fit(xs, xs.astype(np.int64) % 3)


def test_predict_residue_mod3():
    model, _, _ = _standard_fit(3)
    pred = model.predict_residue(5)
    assert pred.label == 2
    assert pred.confident
    assert pred.raw_value == pytest.approx(2.0, abs=1e-6)
    assert pred.raw_value == pytest.approx(1.9999997655855757, abs=1e-3)


def test_predict_residue_mod7_and_periodicity():
    model, _, _ = _standard_fit(7)
    pred13 = model.predict_residue(13)
    assert pred13.label == 6
    assert pred13.confident
    assert pred13.raw_value == pytest.approx(5.99999910773427, abs=1e-3)
    raw0 = model.predict_residue(0).raw_value
    raw7 = model.predict_residue(7).raw_value
    raw14 = model.predict_residue(14).raw_value
    assert model.predict_residue(14).label == 0
    assert abs(raw14 - raw7) <= 1e-12
    assert abs(raw14 - raw0) <= 1e-12


@pytest.mark.parametrize("p", [3, 7, 12])
def test_prediction_periodicity(p):
    model = FourierRegressionClassifier.closed_form(p)
    rng = np.random.default_rng(42)
    xs = rng.integers(0, 2**32, size=500, endpoint=True).astype(np.uint64)
    raw = model.predict_raw(xs)
    folded = model.predict_raw(xs % np.uint64(p))
    assert np.max(np.abs(raw - folded)) <= 1e-12


def test_sine_only_ablation_standard_split():
    model, _, test = _standard_fit(3, sine_only=True)
    assert model.diagnostics_.r_squared == pytest.approx(0.2546, abs=0.03)
    assert fourier.evaluate_accuracy(model, test) == pytest.approx(0.3406, abs=0.03)
    assert np.all(model.cosine_coefficients_ == 0.0)


def test_extended_basis_flags_multicollinearity():
    model, _, test = _standard_fit(7, pair_count=6)
    assert model.diagnostics_.rank_warning
    assert fourier.evaluate_accuracy(model, test) == 1.0


def test_evaluate_accuracy_modulus_mismatch():
    model = FourierRegressionClassifier.closed_form(3)
    d = dataset.generate(1, 10, 5)
    with pytest.raises(ValueError, match="modulus mismatch"):
        fourier.evaluate_accuracy(model, d)


def test_training_set_accuracy_is_one():
    model, train, _ = _standard_fit(3)
    assert fourier.evaluate_accuracy(model, train) == 1.0


def _sawtooth_oracle(x, p):
    # direct evaluation of the two branches after shifting into [0, p)
    local = x % p
    if local <= p - 1:
        return local
    return (1 - p) * local + (p - 1) * p


def test_sawtooth_integer_branch():
    for k in range(7):
        assert fourier.sawtooth(k, 7) == k


def test_sawtooth_descending_branch():
    assert _sawtooth_oracle(6.5, 7) == pytest.approx(3.0)
    assert fourier.sawtooth(6.5, 7) == pytest.approx(3.0)
    assert fourier.sawtooth(6.25, 7) == pytest.approx(_sawtooth_oracle(6.25, 7))


def test_sawtooth_periodic_shift():
    assert fourier.sawtooth(10, 7) == fourier.sawtooth(3, 7) == 3.0
    xs = np.linspace(0, 7, 29)
    assert fourier.sawtooth(xs + 7, 7) == pytest.approx(fourier.sawtooth(xs, 7))


def test_sawtooth_is_continuous_at_the_corner():
    p = 7
    assert fourier.sawtooth(p - 1, p) == p - 1
    assert fourier.sawtooth(p - 1 + 1e-9, p) == pytest.approx(p - 1, abs=1e-6)
    assert fourier.sawtooth(p - 1e-9, p) == pytest.approx(0.0, abs=1e-6)


def test_model_text_roundtrip():
    model, _, test = _standard_fit(3)
    restored = FourierRegressionClassifier.from_text(model.to_text())
    xs = test.xs[:100]
    assert np.array_equal(restored.predict(xs), model.predict(xs))
    assert restored.intercept_ == model.intercept_
    assert restored.diagnostics_.r_squared == model.diagnostics_.r_squared

    closed = FourierRegressionClassifier.closed_form(5)
    restored = FourierRegressionClassifier.from_text(closed.to_text())
    assert restored.diagnostics_ is None
    assert np.array_equal(restored.predict(np.arange(50, dtype=np.uint64)),
                          np.arange(50) % 5)


def test_curve_matches_predictions_at_small_integers():
    model, _, _ = _standard_fit(3)
    grid = model.curve(np.arange(10.0))
    raw = model.predict_raw(np.arange(10, dtype=np.uint64))
    assert grid == pytest.approx(raw, abs=1e-9)
