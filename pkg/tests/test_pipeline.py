import json

import numpy as np
import pandas as pd
import pytest

from aremos.errors import InsufficientHistoryError, ValidationError
from aremos.pipeline import (
    DETERMINISTIC_METHODS,
    PREDICTIVE_METHODS,
    RunConfig,
    SyntheticSpec,
    emit_report,
    empty_report,
    forecast_station,
    generate_synthetic,
    ingest,
    read_forecasts,
    run_experiment,
    sweep_training_length,
    verify_forecasts,
    write_dataset,
)
from aremos.pooling import grid_search_slp
from aremos.verification import ljung_box, observation_ranks
from oracles import make_station

FAST = dict(ar_training_length=40, emos_training_length=10, max_ar_order=3, seed=5)


def _write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_round_trip(tmp_path, small_dataset):
    path = tmp_path / "d.csv"
    write_dataset(small_dataset, path)
    result = ingest(path)
    assert not result.rejected
    for a, b in zip(small_dataset, result.stations):
        assert a.station_id == b.station_id and a.dates == b.dates
        np.testing.assert_array_equal(a.members, b.members)
        np.testing.assert_array_equal(a.observations, b.observations)


def test_ingest_rejects_gap_and_duplicate(tmp_path):
    text = (
        "station_id,date,obs,m1,m2\n"
        "A,2020-01-01,1,1,2\n"
        "A,2020-01-03,1,1,2\n"
        "B,2020-01-01,1,1,2\n"
        "B,2020-01-01,1,1,2\n"
        "C,2020-01-02,1,1,2\n"
        "C,2020-01-01,1,1,2\n"
    )
    result = ingest(_write(tmp_path, text))
    assert set(result.rejected) == {"A", "B"}
    assert "missing" in result.rejected["A"] and "duplicate" in result.rejected["B"]
    assert [s.station_id for s in result.stations] == ["C"]
    assert result.stations[0].dates[0].isoformat() == "2020-01-01"


def test_ingest_rejects_nan_station(tmp_path):
    text = "station_id,date,obs,m1,m2\nA,2020-01-01,nan,1,2\nB,2020-01-01,1,1,2\n"
    result = ingest(_write(tmp_path, text))
    assert "A" in result.rejected and [s.station_id for s in result.stations] == ["B"]


def test_ingest_reports_line_numbers(tmp_path):
    with pytest.raises(ValidationError, match="line 3"):
        ingest(_write(tmp_path, "station_id,date,obs,m1,m2\nA,2020-01-01,1,1,2\nA,2020-01-02,1,1\n"))
    with pytest.raises(ValidationError, match="line 2"):
        ingest(_write(tmp_path, "station_id,date,obs,m1,m2\nA,2020-13-01,1,1,2\n"))
    with pytest.raises(ValidationError, match="line 1"):
        ingest(_write(tmp_path, "station,date,obs,m1,m2\n"))
    with pytest.raises(ValidationError, match="line 1"):
        ingest(_write(tmp_path, "station_id,date,obs,m1\n"))


def test_run_config_validation():
    with pytest.raises(ValidationError):
        RunConfig(ar_training_length=10)
    with pytest.raises(ValidationError):
        RunConfig(slp_weight=0.5)
    with pytest.raises(ValidationError):
        RunConfig(objective="MSE")
    assert RunConfig().warmup == 115


def test_synthetic_is_deterministic():
    spec = SyntheticSpec(n_stations=2, n_days=30, n_members=3)
    a, b = generate_synthetic(spec, 1), generate_synthetic(spec, 1)
    np.testing.assert_array_equal(a[1].members, b[1].members)
    assert not np.array_equal(a[0].members, generate_synthetic(spec, 2)[0].members)


def test_report_structure(small_dataset):
    config = RunConfig(**FAST)
    report = run_experiment(small_dataset, config)
    T2 = 160 - config.warmup
    assert list(report.summary["method"]) == list(PREDICTIVE_METHODS + DETERMINISTIC_METHODS)
    for method in PREDICTIVE_METHODS:
        part = report.method_scores(method)
        assert len(part) == 2 * T2
        assert np.all(part["variance"] > 0)
        assert np.all((part["pit"] >= 0) & (part["pit"] <= 1))
    assert report.slp_weight in config.slp_weights and report.slp_spread in config.slp_spreads
    assert report.grid.score == pytest.approx(report.summary_row("SLP")["crps"])
    assert sum(report.histograms["rank"]) == 2 * T2
    assert len(report.histograms["rank"]) == small_dataset[0].n_members + 1
    assert sum(report.histograms["ar_order_frequency"]["ensemble_mean"].get(str(p), 0) for p in range(4)) == 2 * T2


def test_first_forecast_day_and_emos_window(small_dataset):
    config = RunConfig(**FAST)
    s = small_dataset[0]
    sf = forecast_station(s, config)
    assert sf.dates[0] == s.dates[config.warmup]
    assert len(sf.dates) == len(s) - config.warmup


def test_no_temporal_leakage(small_dataset):
    config = RunConfig(**FAST)
    s = small_dataset[0]
    cut = 90
    obs = s.observations.copy()
    members = s.members.copy()
    obs[cut:] = 1e6
    members[cut + 1 :] = -1e6
    poisoned = make_station(obs, members, s.station_id, s.dates[0].isoformat())
    a, b = forecast_station(s, config), forecast_station(poisoned, config)
    k = cut - config.warmup + 1
    for name in ("emos_mean", "emos_variance", "ar_emos_mean", "ar_emos_variance", "mean_orders"):
        np.testing.assert_array_equal(getattr(a, name)[:k], getattr(b, name)[:k])
    for method in DETERMINISTIC_METHODS:
        np.testing.assert_array_equal(a.deterministic[method][:k], b.deterministic[method][:k])


def test_too_short_station_raises():
    s = make_station(np.arange(20.0), np.column_stack([np.arange(20.0), np.arange(20.0) + 1]))
    with pytest.raises(InsufficientHistoryError):
        forecast_station(s, RunConfig(**FAST))


def test_station_rng_ignores_other_stations(small_dataset):
    config = RunConfig(**FAST)
    both = run_experiment(small_dataset, config)
    one = run_experiment(small_dataset[1:], config)
    sid = small_dataset[1].station_id
    a = forecast_station(small_dataset[1], config).ranks
    assert np.array_equal(a, forecast_station(small_dataset[1], config).ranks)
    pd.testing.assert_frame_equal(
        both.method_scores("EMOS").query("station_id == @sid").reset_index(drop=True),
        one.method_scores("EMOS").reset_index(drop=True),
    )


def test_fixed_pool_parameters(small_dataset):
    report = run_experiment(small_dataset, RunConfig(**FAST, slp_weight=0.3, slp_spread=0.9))
    assert report.grid is None and (report.slp_weight, report.slp_spread) == (0.3, 0.9)


def test_emitted_reports_are_byte_identical(tmp_path, small_dataset):
    config = RunConfig(**FAST)
    a = emit_report(run_experiment(small_dataset, config), tmp_path / "a")
    b = emit_report(run_experiment(small_dataset, config), tmp_path / "b")
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes(), pa.name
    tests = json.loads((tmp_path / "a" / "tests.json").read_text())
    assert tests["slp"]["selected_by"] == "grid"
    assert set(tests["ljung_box"]["stations"]) == {s.station_id for s in small_dataset}


def test_parallel_matches_serial(small_dataset):
    serial = run_experiment(small_dataset, RunConfig(**FAST))
    parallel = run_experiment(small_dataset, RunConfig(**FAST, n_jobs=2))
    pd.testing.assert_frame_equal(serial.scores, parallel.scores)


def test_empty_report(tmp_path):
    report = empty_report(RunConfig(**FAST), n_members=3)
    assert report.empty and report.histograms["empty"] and report.tests["empty"]
    paths = emit_report(report, tmp_path / "e")
    assert all(p.exists() for p in paths)


def test_station_filter(small_dataset):
    config = RunConfig(**FAST, stations=(small_dataset[0].station_id,))
    report = run_experiment(small_dataset, config)
    assert set(report.scores["station_id"]) == {small_dataset[0].station_id}
    with pytest.raises(ValidationError):
        run_experiment(small_dataset, RunConfig(**FAST, stations=("nope",)))


def test_sweep_training_length(small_dataset):
    table = sweep_training_length(small_dataset, (30, 60), max_order=3)
    assert table["t1"].tolist() == [30, 60]
    assert table["n_days"].tolist() == [130, 100]
    assert np.all(table["mae"] > 0)


def test_verify_forecasts(tmp_path):
    rows = []
    rng = np.random.default_rng(0)
    for k in range(30):
        y = rng.normal()
        rows.append(("S", f"2020-01-{k + 1:02d}", "A", y, 0.0, 1.0))
        rows.append(("S", f"2020-01-{k + 1:02d}", "B", y, 0.5, 2.0))
    path = tmp_path / "f.csv"
    pd.DataFrame(rows, columns=["station_id", "date", "method", "obs", "mean", "variance"]).to_csv(path, index=False)
    scores, summary, hist, tests = verify_forecasts(read_forecasts(path))
    assert summary["method"].tolist() == ["A", "B"]
    assert sum(hist["pit"]["A"]) == 30
    assert tests["diebold_mariano"]["results"][0]["compare"] == ["A", "B"]


def test_read_forecasts_rejects_bad_variance(tmp_path):
    path = _write(tmp_path, "station_id,date,method,obs,mean,variance\nS,2020-01-01,A,1,1,0\n", "f.csv")
    with pytest.raises(ValidationError, match="line 2"):
        read_forecasts(path)


def test_degenerate_pool_equals_emos(small_dataset):
    report = run_experiment(small_dataset, RunConfig(**FAST, slp_weight=1.0, slp_spread=1.0))
    emos, slp = report.method_scores("EMOS"), report.method_scores("SLP")
    for column in ("mean", "variance", "crps", "dss", "pit"):
        np.testing.assert_array_equal(slp[column].to_numpy(), emos[column].to_numpy())


def test_empty_report_has_header_only_csvs(tmp_path):
    emit_report(empty_report(RunConfig(**FAST), n_members=3), tmp_path)
    assert (tmp_path / "scores.csv").read_text().strip().count("\n") == 0
    assert (tmp_path / "summary.csv").read_text().startswith("table,method,n,")
    assert json.loads((tmp_path / "histograms.json").read_text())["empty"] is True


def test_synthetic_under_dispersion_gives_u_shaped_ranks():
    spec = SyntheticSpec(n_stations=3, n_days=300, n_members=10, dispersion=0.4)
    counts = np.zeros(11)
    rng = np.random.default_rng(0)
    for s in generate_synthetic(spec, 3):
        counts += np.bincount(observation_ranks(s.members, s.observations, rng), minlength=12)[1:]
    assert min(counts[0], counts[-1]) > 2 * counts[1:-1].mean()


def test_synthetic_white_errors_pass_ljung_box():
    spec = SyntheticSpec(n_stations=40, n_days=300, n_members=4, error_ar=(0.0,), predictability_sd=0.0)
    pvalues = [ljung_box(s.observations - s.members.mean(axis=1)).p_value for s in generate_synthetic(spec, 8)]
    assert np.mean(np.array(pvalues) < 0.05) <= 0.15


def test_held_out_grid_uses_first_half_of_dates(small_dataset):
    report = run_experiment(small_dataset, RunConfig(**FAST, grid_selection="held-out"))
    emos, ar = report.method_scores("EMOS"), report.method_scores("AR-EMOS")
    dates = sorted(set(emos["date"]))
    first = emos["date"].isin(dates[: (len(dates) + 1) // 2]).to_numpy()
    means = np.column_stack([emos["mean"], ar["mean"]])[first]
    variances = np.column_stack([emos["variance"], ar["variance"]])[first]
    expected = grid_search_slp((means, variances), emos["obs"].to_numpy()[first])
    np.testing.assert_allclose(report.grid.table, expected.table, rtol=1e-12)
    with pytest.raises(ValidationError):
        RunConfig(grid_selection="cross")
