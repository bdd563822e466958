import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from aremos.artime import (
    ARModel,
    ErrorSeries,
    ar_modified_forecast,
    fit_aic_batch,
    fit_ar_aic,
    fit_yule_walker,
    levinson_durbin,
    process_variance,
    psi_weights,
    psi_weights_batch,
    sample_autocovariance,
    select_order_aic,
)
from aremos.errors import DegenerateSeriesError, EstimationError, InsufficientHistoryError
from oracles import simulate_ar, yule_walker_solve

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def test_autocovariance_alternating():
    np.testing.assert_allclose(sample_autocovariance([1, -1, 1, -1], 1), [1.0, -0.75])


def test_autocovariance_uses_divisor_n():
    z = np.array([1.0, 2.0, 4.0])
    d = z - z.mean()
    np.testing.assert_allclose(sample_autocovariance(z, 2), [d @ d / 3, d[1:] @ d[:2] / 3, d[2] * d[0] / 3])


def test_autocovariance_rejects_bad_lag():
    with pytest.raises(ValueError):
        sample_autocovariance([1.0, 2.0, 3.0], 3)
    with pytest.raises(EstimationError):
        sample_autocovariance([1.0], 0)


def test_error_series_rejects_nan():
    with pytest.raises(ValueError):
        ErrorSeries([1.0, np.nan])


def test_psi_weights_ar2():
    model = ARModel(0.0, (0.5, 0.2), 1.0)
    np.testing.assert_allclose(psi_weights(model, 3), [0.5, 0.45, 0.325], atol=1e-15)


def test_psi_weights_ar1_are_powers():
    model = ARModel(0.0, (0.5,), 1.0)
    np.testing.assert_allclose(psi_weights(model, 10), 0.5 ** np.arange(1, 11), rtol=0, atol=1e-12)


def test_psi_weights_ar0_vanish():
    np.testing.assert_array_equal(psi_weights(ARModel(1.0, (), 2.0), 4), np.zeros(4))
    assert process_variance(ARModel(1.0, (), 2.0)) == 2.0


def test_process_variance_ar1_truncated():
    model = ARModel(0.0, (0.5,), 1.0)
    assert process_variance(model, 10) == pytest.approx((1 - 0.25**11) / 0.75, abs=1e-9)


def test_ar_modified_forecast_examples():
    model = ARModel(0.2, (0.6,), 1.0)
    assert ar_modified_forecast(model, [1.0], 10.0) == pytest.approx(10.68, abs=1e-12)
    assert ar_modified_forecast(ARModel(-0.3, (), 1.0), [], 5.0) == pytest.approx(4.7, abs=1e-12)


def test_ar_modified_forecast_most_recent_first():
    model = ARModel(0.0, (0.5, 0.25), 1.0)
    # Z(t-1) = 2, Z(t-2) = 4
    assert ar_modified_forecast(model, [2.0, 4.0], 0.0) == pytest.approx(0.5 * 2 + 0.25 * 4)


def test_ar_modified_forecast_needs_history():
    with pytest.raises(InsufficientHistoryError):
        ar_modified_forecast(ARModel(0.0, (0.5, 0.1), 1.0), [1.0], 0.0)


def test_yule_walker_matches_toeplitz_solve(rng):
    z = simulate_ar(rng, (0.5, -0.3), 400)
    for p in (1, 2, 5):
        model = fit_yule_walker(z, p)
        a, s2 = yule_walker_solve(z, p)
        np.testing.assert_allclose(model.coefficients, a, atol=1e-10)
        assert model.innovation_variance == pytest.approx(s2, rel=1e-10)
        assert model.mean == pytest.approx(z.mean())


def test_yule_walker_order_zero():
    model = fit_yule_walker([1.0, 2.0, 3.0], 0)
    assert model.order == 0
    assert model.innovation_variance == pytest.approx(2 / 3)


def test_yule_walker_constant_series_raises():
    with pytest.raises(DegenerateSeriesError):
        fit_yule_walker(np.full(30, 1.7), 2)
    with pytest.raises(DegenerateSeriesError):
        select_order_aic(np.full(30, -2.0), 3)


def test_yule_walker_too_short():
    with pytest.raises(EstimationError):
        fit_yule_walker([1.0, 2.0, 3.0], 2)


def test_aic_matches_brute_force(rng):
    z = simulate_ar(rng, (0.6,), 200)
    n = z.size
    best = min(range(0, 16), key=lambda p: (n * np.log(yule_walker_solve(z, p)[1] if p else np.var(z)) + 2 * p, p))
    model = fit_ar_aic(z, 15)
    assert model.order == best
    assert len(model.aic) == 16


def test_max_order_capped_by_length(rng):
    z = rng.standard_normal(45)
    model = fit_ar_aic(z, 15)
    assert len(model.aic) == 45 // 10 + 1


def test_batch_matches_single_fits(rng):
    windows = np.stack([simulate_ar(rng, (0.7, -0.2), 90) + k for k in range(12)])
    windows[3] = 0.25  # constant window
    fit = fit_aic_batch(windows, 15)
    assert fit.degenerate.tolist() == [k == 3 for k in range(12)]
    for k in range(12):
        if k == 3:
            assert fit.order[k] == 0 and fit.innovation_variance[k] == 0.0
            continue
        single = fit_ar_aic(windows[k], 15)
        batch = fit.model(k)
        assert batch.order == single.order
        np.testing.assert_allclose(batch.coefficients, single.coefficients, atol=1e-12)
        assert batch.innovation_variance == pytest.approx(single.innovation_variance, rel=1e-12)
        assert batch.mean == pytest.approx(single.mean, rel=1e-12)


def test_levinson_durbin_reflection_is_pacf(rng):
    z = simulate_ar(rng, (0.5,), 300)
    acov = sample_autocovariance(z, 4)
    coefs, _, reflection = levinson_durbin(acov)
    np.testing.assert_allclose(reflection, [coefs[p, p] for p in range(4)])


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.integers(12, 80), elements=finite), st.integers(0, 5))
def test_yule_walker_fit_is_stationary(values, order):
    z = np.asarray(values)
    if order >= z.size - 1:
        order = 0
    try:
        model = fit_yule_walker(z, order)
    except DegenerateSeriesError:
        return
    assert model.innovation_variance >= 0
    assert model.is_stationary()


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.integers(20, 120), elements=finite))
def test_aic_selection_within_bounds(values):
    z = np.asarray(values)
    try:
        model = fit_ar_aic(z, 15)
    except DegenerateSeriesError:
        return
    assert 0 <= model.order <= min(15, z.size // 10)
    aic = np.asarray(model.aic)
    assert aic[model.order] == aic.min()
    assert np.all(aic[: model.order] > aic.min())


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-0.9, 0.9), min_size=0, max_size=4),
    st.floats(0.01, 5.0),
    st.integers(1, 12),
)
def test_process_variance_at_least_innovation(coefs, sigma2, count):
    model = ARModel(0.0, coefs, sigma2)
    assert process_variance(model, count) >= sigma2
    np.testing.assert_allclose(
        psi_weights_batch(np.array([coefs + [0.0]]), count)[0], psi_weights(model, count), atol=1e-12
    )


@settings(max_examples=60, deadline=None)
@given(finite, st.floats(-0.95, 0.95), finite, finite)
def test_ar_modified_forecast_shift(mean, alpha, z1, eta):
    model = ARModel(mean, (alpha,), 1.0)
    base = ar_modified_forecast(model, [z1], eta)
    assert ar_modified_forecast(model, [z1], eta + 1.0) == pytest.approx(base + 1.0, abs=1e-9)
    # zero coefficients reduce to a bias correction
    assert ar_modified_forecast(ARModel(mean, (0.0,), 1.0), [z1], eta) == pytest.approx(eta + mean)


def test_aic_selects_zero_on_white_noise():
    # the population rate is close to 0.71, so 1000 replicates are needed to resolve it
    rng = np.random.default_rng(77)
    rate = np.mean([select_order_aic(rng.standard_normal(500), 15) == 0 for _ in range(1000)])
    assert 0.68 <= rate <= 0.76


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-0.9, 0.9), min_size=1, max_size=4), st.integers(1, 15))
def test_process_variance_monotone_in_count(coefs, count):
    model = ARModel(0.0, coefs, 1.3)
    assert process_variance(model, count + 1) >= process_variance(model, count)


@settings(max_examples=60, deadline=None)
@given(finite, st.lists(st.floats(-0.9, 0.9), min_size=1, max_size=4), finite)
def test_correction_vanishes_at_the_mean(mean, coefs, eta):
    model = ARModel(mean, coefs, 1.0)
    assert ar_modified_forecast(model, [mean] * len(coefs), eta) == pytest.approx(eta + mean, abs=1e-9)
