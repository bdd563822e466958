"""Rolling-window experiment: AR modification, AR-EMOS, EMOS and their pool.

The verification period of a station with ``T`` days starts after the AR
warm-up and the EMOS window, so it covers ``T - T1 - emos_training_length``
days.  Every forecast for day ``t`` is computed from days before ``t``.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd
from scipy.special import ndtr

from .artime import DEFAULT_MAX_ORDER, DEFAULT_PSI_COUNT
from .emos import DEFAULT_TRAINING_LENGTH, VARIANCE_FLOOR, crps_normal, fit_emos_arrays, predict_arrays
from .ensemble import StationSeries, rolling_modification
from .errors import InsufficientHistoryError, ValidationError
from .pooling import (
    DEFAULT_SPREADS,
    DEFAULT_WEIGHTS,
    SlpSearchGrid,
    dss_normal,
    grid_search_slp,
    two_component_scores,
)
from .verification import (
    PIT_BINS,
    diebold_mariano,
    ljung_box,
    observation_ranks,
    order_frequency_table,
    pit_histogram,
    pit_variance,
    rmv,
)

logger = logging.getLogger(__name__)

PREDICTIVE_METHODS = ("EMOS", "AR-EMOS", "SLP")
DETERMINISTIC_METHODS = ("raw_mean", "ar_mean", "mean_of_ar", "raw_median", "ar_median", "median_of_ar")
FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True)
class RunConfig:
    ar_training_length: int = 90
    emos_training_length: int = DEFAULT_TRAINING_LENGTH
    max_ar_order: int = DEFAULT_MAX_ORDER
    psi_count: int = DEFAULT_PSI_COUNT
    slp_weights: tuple = DEFAULT_WEIGHTS
    slp_spreads: tuple = DEFAULT_SPREADS
    objective: str = "CRPS"
    # fixed pool parameters; both None means grid search
    slp_weight: float | None = None
    slp_spread: float | None = None
    exchangeable: bool = True
    seed: int | None = None
    stations: tuple | None = None
    pit_bins: int = PIT_BINS
    ljung_box_lag: int = 1
    dm_lags: tuple = (1,)
    n_jobs: int = 1
    # "in-sample" scores the pool grid on every verification day; "held-out"
    # only on the first half of the verification dates
    grid_selection: str = "in-sample"

    def __post_init__(self):
        for name in ("slp_weights", "slp_spreads", "dm_lags"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.stations is not None:
            object.__setattr__(self, "stations", tuple(str(s) for s in self.stations))
        if self.ar_training_length < self.max_ar_order + 2:
            raise ValidationError("ar_training_length must be at least max_ar_order + 2")
        if self.emos_training_length < 5:
            raise ValidationError("emos_training_length must be at least 5")
        if (self.slp_weight is None) != (self.slp_spread is None):
            raise ValidationError("fix both slp_weight and slp_spread or neither")
        if self.slp_weight is not None and not 0.0 <= self.slp_weight <= 1.0:
            raise ValidationError("slp_weight must lie in [0, 1]")
        if self.slp_spread is not None and not self.slp_spread > 0:
            raise ValidationError("slp_spread must be positive")
        if self.grid_selection not in ("in-sample", "held-out"):
            raise ValidationError(f"unknown grid_selection {self.grid_selection!r}")
        if self.psi_count < 1:
            raise ValidationError("psi_count must be at least 1")
        self.grid()  # validates weights, spreads and objective

    @property
    def warmup(self) -> int:
        return self.ar_training_length + self.emos_training_length

    def grid(self) -> SlpSearchGrid:
        try:
            return SlpSearchGrid(self.slp_weights, self.slp_spreads, self.objective)
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc


# -----------------------------
# Synthetic data
# -----------------------------


@dataclass(frozen=True)
class SyntheticSpec:
    """Stand-in dataset: seasonal truth, AR forecast errors, biased ensemble.

    ``observation = signal + e(t)`` with ``e`` an AR process, and member
    ``i = signal + bias + dispersion * member_noise_sd * noise_i(t)``.
    ``dispersion < 1`` gives an under-dispersed ensemble.  A daily
    log-normal predictability factor with log-sd ``predictability_sd`` scales
    both the error innovations and the member noise (spread-skill relation).
    """

    n_stations: int = 40
    n_days: int = 453
    n_members: int = 50
    start_date: dt.date = dt.date(2010, 2, 2)
    base_mean: float = 9.0
    base_spread: float = 2.0
    seasonal_amplitude: float = 8.0
    anomaly_sd: float = 3.0
    anomaly_ar: float = 0.7
    error_ar: tuple = (0.35,)
    error_sd: float = 1.0
    bias: float = -0.3
    member_noise_sd: float = 1.8
    dispersion: float = 0.5
    predictability_sd: float = 0.8

    def __post_init__(self):
        object.__setattr__(self, "error_ar", tuple(float(a) for a in self.error_ar))
        if self.n_stations < 1 or self.n_days < 1 or self.n_members < 2:
            raise ValidationError("need at least one station, one day and two members")
        if self.error_sd < 0 or self.member_noise_sd < 0 or self.dispersion < 0:
            raise ValidationError("scales must be non-negative")


def _simulate_ar(rng, coefficients, sd, n, burn=200, scale=None):
    p = len(coefficients)
    eps = rng.normal(0.0, sd, n + burn)
    if scale is not None:
        eps[burn:] *= scale
    x = np.zeros(n + burn)
    for t in range(n + burn):
        for j in range(1, min(p, t) + 1):
            x[t] += coefficients[j - 1] * x[t - j]
        x[t] += eps[t]
    return x[burn:]


def generate_synthetic(spec: SyntheticSpec, seed: int) -> list[StationSeries]:
    """Deterministic synthetic stations; station ``k`` uses the ``k``-th spawned seed."""
    children = np.random.SeedSequence(seed).spawn(spec.n_stations)
    dates = tuple(spec.start_date + dt.timedelta(days=k) for k in range(spec.n_days))
    day_of_year = np.array([d.timetuple().tm_yday for d in dates], dtype=float)
    width = max(3, len(str(spec.n_stations)))
    stations = []
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        level = spec.base_mean + spec.base_spread * rng.standard_normal()
        phase = rng.normal(0.0, 0.1)
        seasonal = level - spec.seasonal_amplitude * np.cos(2 * np.pi * (day_of_year - 15) / 365.25 + phase)
        anomaly = _simulate_ar(rng, (spec.anomaly_ar,), spec.anomaly_sd * math.sqrt(1 - spec.anomaly_ar**2), spec.n_days)
        signal = seasonal + anomaly
        predictability = np.exp(spec.predictability_sd * rng.standard_normal(spec.n_days))
        error = _simulate_ar(rng, spec.error_ar, spec.error_sd, spec.n_days, scale=predictability)
        noise = rng.standard_normal((spec.n_days, spec.n_members)) * predictability[:, None]
        members = signal[:, None] + spec.bias + spec.dispersion * spec.member_noise_sd * noise
        stations.append(StationSeries(f"S{k + 1:0{width}d}", dates, signal + error, members))
    return stations


# -----------------------------
# CSV ingestion
# -----------------------------


@dataclass(frozen=True)
class IngestResult:
    stations: list
    rejected: dict = field(default_factory=dict)


def _member_columns(header):
    members = header[3:]
    expected = [f"m{i}" for i in range(1, len(members) + 1)]
    if header[:3] != ["station_id", "date", "obs"] or members != expected or len(members) < 2:
        raise ValidationError(
            "line 1: header must be station_id,date,obs,m1..mK with K >= 2, got " + ",".join(header)
        )
    return len(members)


def ingest(path, format: str = "csv") -> IngestResult:
    """Read and validate a dataset; stations with gaps or bad values are rejected."""
    if format != "csv":
        raise ValidationError(f"unsupported format {format!r}")
    rows: dict[str, list] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValidationError("line 1: empty file, header is mandatory") from None
        m = _member_columns(header)
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != m + 3:
                raise ValidationError(
                    f"line {line}: expected {m} member values, found {len(row) - 3}"
                )
            try:
                date = dt.date.fromisoformat(row[1].strip())
                values = [float(v) for v in row[2:]]
            except ValueError as exc:
                raise ValidationError(f"line {line}: parse error: {exc}") from None
            rows.setdefault(row[0].strip(), []).append((date, values, line))

    stations, rejected = [], {}
    for sid in sorted(rows):
        records = sorted(rows[sid], key=lambda r: r[0])
        dates = [r[0] for r in records]
        problems = []
        for prev, cur in zip(dates, dates[1:]):
            if cur == prev:
                problems.append(f"duplicate date {cur}")
            elif cur - prev != dt.timedelta(days=1):
                missing = (cur - prev).days - 1
                problems.append(f"{missing} missing day(s) after {prev}")
        values = np.array([r[1] for r in records])
        bad = [r[2] for r in records if not np.all(np.isfinite(r[1]))]
        if bad:
            problems.append("non-finite values on line(s) " + ",".join(map(str, bad)))
        if problems:
            rejected[sid] = "; ".join(problems)
            logger.warning("rejected station %s: %s", sid, rejected[sid])
            continue
        stations.append(StationSeries(sid, tuple(dates), values[:, 0], values[:, 1:]))
    return IngestResult(stations, rejected)


def write_dataset(stations: Sequence[StationSeries], path) -> None:
    m = stations[0].n_members if stations else 2
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["station_id", "date", "obs"] + [f"m{i}" for i in range(1, m + 1)])
        for s in stations:
            for t, date in enumerate(s.dates):
                writer.writerow(
                    [s.station_id, date.isoformat(), FLOAT_FORMAT % s.observations[t]]
                    + [FLOAT_FORMAT % x for x in s.members[t]]
                )


# -----------------------------
# Rolling experiment
# -----------------------------


@dataclass(frozen=True)
class StationForecasts:
    """Everything one station contributes to the report, per verification day."""

    station_id: str
    dates: tuple
    obs: np.ndarray
    deterministic: dict
    emos_mean: np.ndarray
    emos_variance: np.ndarray
    ar_emos_mean: np.ndarray
    ar_emos_variance: np.ndarray
    ranks: np.ndarray
    mean_orders: np.ndarray
    member_orders: np.ndarray
    ljung_box: tuple


def _station_rng(seed, station_id: str) -> np.random.Generator | None:
    if seed is None:
        return None
    # keyed by station id so removing a station leaves the others untouched
    return np.random.default_rng([seed, zlib.crc32(station_id.encode("utf-8"))])


def forecast_station(series: StationSeries, config: RunConfig) -> StationForecasts:
    T = len(series)
    T1, L = config.ar_training_length, config.emos_training_length
    if T < config.warmup + 1:
        raise InsufficientHistoryError(
            f"station {series.station_id}: {T} days, need at least {config.warmup + 1}"
        )
    mod = rolling_modification(series, T1, config.max_ar_order, config.psi_count, start=config.warmup)
    days = mod.days
    obs = series.observations[days]

    emos_mean = np.empty(days.size)
    emos_var = np.empty(days.size)
    for i, t in enumerate(days):
        params = fit_emos_arrays(
            series.members[t - L : t], series.observations[t - L : t], config.exchangeable
        )
        mean, var = predict_arrays(params, series.members[t])
        emos_mean[i], emos_var[i] = mean[0], var[0]

    raw = series.members[days]
    deterministic = {
        "raw_mean": raw.mean(axis=1),
        "ar_mean": mod.mean_path,
        "mean_of_ar": mod.mean_of_modified,
        "raw_median": np.median(raw, axis=1),
        "ar_median": mod.median_path,
        "median_of_ar": mod.median_of_modified,
    }
    rng = _station_rng(config.seed, series.station_id)
    ranks = observation_ranks(raw, obs, rng) if rng is not None else np.zeros(days.size, dtype=int)
    errors = series.observations - series.members.mean(axis=1)
    lb = ljung_box(errors, config.ljung_box_lag)
    return StationForecasts(
        station_id=series.station_id,
        dates=tuple(series.dates[t] for t in days),
        obs=obs,
        deterministic=deterministic,
        emos_mean=emos_mean,
        emos_variance=emos_var,
        ar_emos_mean=mod.mean_of_modified,
        ar_emos_variance=np.maximum(mod.ar_emos_variance, VARIANCE_FLOOR),
        ranks=ranks,
        mean_orders=mod.mean_orders,
        member_orders=mod.member_orders,
        ljung_box=(lb.statistic, lb.p_value),
    )


def _forecast_one(args):
    return forecast_station(*args)


@dataclass
class VerificationReport:
    config: RunConfig
    scores: pd.DataFrame
    summary: pd.DataFrame
    grid: object | None
    slp_weight: float | None
    slp_spread: float | None
    histograms: dict
    tests: dict
    n_members: int = 0

    @property
    def empty(self) -> bool:
        return self.scores.empty

    def method_scores(self, method: str) -> pd.DataFrame:
        return self.scores[self.scores["method"] == method]

    def summary_row(self, method: str) -> pd.Series:
        return self.summary.set_index("method").loc[method]


SCORE_COLUMNS = ["station_id", "date", "method", "obs", "mean", "variance", "abs_error", "crps", "dss", "pit"]
SUMMARY_COLUMNS = ["table", "method", "n", "mae", "crps", "dss", "pit_variance", "rmv"]


def _predictive_frame(sf: StationForecasts, method, mean, variance, crps, dss, pit):
    return pd.DataFrame(
        {
            "station_id": sf.station_id,
            "date": [d.isoformat() for d in sf.dates],
            "method": method,
            "obs": sf.obs,
            "mean": mean,
            "variance": variance,
            "abs_error": np.abs(sf.obs - mean),
            "crps": crps,
            "dss": dss,
            "pit": pit,
        },
        columns=SCORE_COLUMNS,
    )


def _gaussian_scores(mean, variance, y):
    std = np.sqrt(variance)
    return crps_normal(mean, std, y), dss_normal(mean, variance, y), ndtr((y - mean) / std)


def select_stations(stations: Iterable[StationSeries], config: RunConfig) -> list[StationSeries]:
    stations = sorted(stations, key=lambda s: s.station_id)
    if config.stations is not None:
        wanted = set(config.stations)
        stations = [s for s in stations if s.station_id in wanted]
    if not stations:
        raise ValidationError("no stations left to process")
    sizes = {s.n_members for s in stations}
    if len(sizes) != 1:
        raise ValidationError(f"member count differs across stations: {sorted(sizes)}")
    return stations


def run_experiment(data: Iterable[StationSeries], config: RunConfig) -> VerificationReport:
    stations = select_stations(data, config)
    if config.n_jobs > 1:
        with ProcessPoolExecutor(config.n_jobs) as pool:
            per_station = list(pool.map(_forecast_one, [(s, config) for s in stations]))
    else:
        per_station = [forecast_station(s, config) for s in stations]
    return assemble_report(per_station, config, stations[0].n_members)


def _grid_rows(per_station, selection):
    dates = np.concatenate([np.array([d.toordinal() for d in sf.dates], dtype=np.int64) for sf in per_station])
    if selection == "in-sample":
        return np.ones(dates.size, dtype=bool)
    unique = np.unique(dates)
    return dates < unique[(unique.size + 1) // 2]


def assemble_report(per_station: Sequence[StationForecasts], config: RunConfig, n_members: int) -> VerificationReport:
    def stack(name):
        return np.concatenate([getattr(sf, name) for sf in per_station]) if per_station else np.zeros(0)

    obs = stack("obs")
    comp_mean = np.column_stack([stack("emos_mean"), stack("ar_emos_mean")])
    comp_var = np.column_stack([stack("emos_variance"), stack("ar_emos_variance")])
    grid_result = None
    if config.slp_weight is None:
        if obs.size:
            rows = _grid_rows(per_station, config.grid_selection)
            grid_result = grid_search_slp((comp_mean[rows], comp_var[rows]), obs[rows], config.grid())
            weight, spread = grid_result.weight, grid_result.spread
        else:
            weight = spread = None
    else:
        weight, spread = float(config.slp_weight), float(config.slp_spread)

    frames = []
    offset = 0
    for sf in per_station:
        n = sf.obs.size
        sl = slice(offset, offset + n)
        offset += n
        frames.append(
            _predictive_frame(sf, "EMOS", sf.emos_mean, sf.emos_variance, *_gaussian_scores(sf.emos_mean, sf.emos_variance, sf.obs))
        )
        frames.append(
            _predictive_frame(
                sf, "AR-EMOS", sf.ar_emos_mean, sf.ar_emos_variance,
                *_gaussian_scores(sf.ar_emos_mean, sf.ar_emos_variance, sf.obs),
            )
        )
        if n:
            crps, dss, pit = two_component_scores(weight, spread, comp_mean[sl], comp_var[sl], sf.obs)
            w = np.array([weight, 1.0 - weight])
            mix_mean = comp_mean[sl] @ w
            mix_var = (spread**2 * comp_var[sl]) @ w + w[0] * w[1] * (comp_mean[sl, 0] - comp_mean[sl, 1]) ** 2
            frames.append(_predictive_frame(sf, "SLP", mix_mean, mix_var, crps, dss, pit))
        for method in DETERMINISTIC_METHODS:
            forecast = sf.deterministic[method]
            nan = np.full(n, np.nan)
            frames.append(_predictive_frame(sf, method, forecast, nan, nan, nan, nan))
    scores = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=SCORE_COLUMNS)
    method_order = {m: k for k, m in enumerate(PREDICTIVE_METHODS + DETERMINISTIC_METHODS)}
    scores = (
        scores.assign(_order=scores["method"].map(method_order))
        .sort_values(["_order", "station_id", "date"], kind="stable")
        .drop(columns="_order")
        .reset_index(drop=True)
    )

    summary = _summarize(scores)
    histograms = _histograms(per_station, scores, config, n_members)
    tests = _tests(per_station, scores, config)
    return VerificationReport(config, scores, summary, grid_result, weight, spread, histograms, tests, n_members)


def _summarize(scores: pd.DataFrame) -> pd.DataFrame:
    rows = []
    for method in PREDICTIVE_METHODS:
        part = scores[scores["method"] == method]
        if part.empty:
            continue
        rows.append(
            {
                "table": "predictive",
                "method": method,
                "n": len(part),
                "mae": part["abs_error"].mean(),
                "crps": part["crps"].mean(),
                "dss": part["dss"].mean(),
                "pit_variance": pit_variance(part["pit"]) if len(part) > 1 else np.nan,
                "rmv": rmv(part["variance"]),
            }
        )
    for method in DETERMINISTIC_METHODS:
        part = scores[scores["method"] == method]
        if part.empty:
            continue
        rows.append({"table": "deterministic", "method": method, "n": len(part), "mae": part["abs_error"].mean()})
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def _histograms(per_station, scores, config, n_members) -> dict:
    out: dict = {"empty": scores.empty}
    ranks = np.concatenate([sf.ranks for sf in per_station]) if per_station else np.zeros(0, dtype=int)
    if config.seed is not None:
        out["rank"] = np.bincount(ranks - 1, minlength=n_members + 1).tolist() if ranks.size else [0] * (n_members + 1)
    else:
        out["rank"] = None
    out["pit"] = {
        method: pit_histogram(scores.loc[scores["method"] == method, "pit"].to_numpy(float), config.pit_bins).counts.tolist()
        for method in PREDICTIVE_METHODS
    }
    mean_orders = np.concatenate([sf.mean_orders for sf in per_station]) if per_station else []
    member_orders = np.concatenate([sf.member_orders.ravel() for sf in per_station]) if per_station else []
    out["ar_order_frequency"] = {
        "ensemble_mean": {str(k): v for k, v in order_frequency_table(mean_orders).items()},
        "members": {str(k): v for k, v in order_frequency_table(member_orders).items()},
    }
    return out


def daily_station_mean(scores: pd.DataFrame, method: str, column: str = "crps") -> pd.Series:
    part = scores[scores["method"] == method]
    return part.groupby("date", sort=True)[column].mean()


def _tests(per_station, scores, config) -> dict:
    out: dict = {"empty": scores.empty}
    out["ljung_box"] = {
        "lag": config.ljung_box_lag,
        "stations": {sf.station_id: {"statistic": sf.ljung_box[0], "p_value": sf.ljung_box[1]} for sf in per_station},
    }
    dm = []
    if not scores.empty:
        g1 = daily_station_mean(scores, "EMOS")
        g2 = daily_station_mean(scores, "SLP")
        for h in config.dm_lags:
            try:
                res = diebold_mariano(g1.to_numpy(), g2.to_numpy(), h)
                dm.append({"h": h, "statistic": res.statistic, "p_value": res.p_value})
            except ValueError as exc:
                dm.append({"h": h, "statistic": None, "p_value": None, "error": str(exc)})
    out["diebold_mariano"] = {"compare": ["EMOS", "SLP"], "score": "crps", "results": dm}
    return out


def empty_report(config: RunConfig, n_members: int = 2) -> VerificationReport:
    """Report for a verification period with no days."""
    return assemble_report([], config, n_members)


# -----------------------------
# Output
# -----------------------------


def _json_default(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (dt.date,)):
        return value.isoformat()
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _write_json(path: Path, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")


def _write_frame(path: Path, frame: pd.DataFrame) -> None:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def grid_frame(report: VerificationReport) -> pd.DataFrame:
    if report.grid is None:
        return pd.DataFrame(columns=["weight", "spread", "score"])
    return pd.DataFrame(list(report.grid.rows()), columns=["weight", "spread", "score"])


def emit_report(report: VerificationReport, out_dir) -> list[Path]:
    """Write scores.csv, summary.csv, gridtable.csv, histograms.json, tests.json, config.json."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = [out / name for name in ("scores.csv", "summary.csv", "gridtable.csv", "histograms.json", "tests.json", "config.json")]
        _write_frame(paths[0], report.scores)
        _write_frame(paths[1], report.summary)
        _write_frame(paths[2], grid_frame(report))
        _write_json(paths[3], report.histograms)
        tests = dict(report.tests)
        tests["slp"] = {
            "weight": report.slp_weight,
            "spread": report.slp_spread,
            "selected_by": "grid" if report.grid is not None else "config",
        }
        _write_json(paths[4], tests)
        _write_json(paths[5], asdict(report.config))
    except OSError as exc:
        raise OSError(f"{out}: {exc}") from exc
    return paths


# -----------------------------
# Auxiliary studies
# -----------------------------


def sweep_training_length(
    data: Iterable[StationSeries],
    t1_values: Sequence[int] = (30, 60, 90, 120, 150, 180, 210),
    max_order: int = DEFAULT_MAX_ORDER,
) -> pd.DataFrame:
    """Station-averaged MAE of the AR-modified ensemble mean for each training length.

    Each length ``T1`` is verified on the ``T - T1`` days after its warm-up.
    """
    stations = sorted(data, key=lambda s: s.station_id)
    rows = []
    for t1 in t1_values:
        if t1 < max_order + 2:
            raise ValidationError(f"T1={t1} is shorter than max_order + 2")
        maes = []
        for s in stations:
            if len(s) <= t1:
                raise InsufficientHistoryError(f"station {s.station_id}: {len(s)} days, T1={t1}")
            mod = rolling_modification(s, t1, max_order)
            maes.append(np.mean(np.abs(s.observations[mod.days] - mod.mean_path)))
        rows.append({"t1": t1, "n_days": len(stations[0]) - t1 if stations else 0, "mae": float(np.mean(maes))})
    return pd.DataFrame(rows, columns=["t1", "n_days", "mae"])


def read_forecasts(path) -> pd.DataFrame:
    """Precomputed Gaussian forecasts: station_id,date,method,obs,mean,variance."""
    frame = pd.read_csv(path, dtype={"station_id": str, "date": str, "method": str})
    required = ["station_id", "date", "method", "obs", "mean", "variance"]
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise ValidationError(f"forecast file lacks columns: {', '.join(missing)}")
    values = frame[["obs", "mean", "variance"]]
    bad = ~np.isfinite(values.to_numpy(float)).all(axis=1) | (frame["variance"] <= 0)
    if bad.any():
        line = int(np.flatnonzero(bad.to_numpy())[0]) + 2
        raise ValidationError(f"line {line}: non-finite value or non-positive variance")
    return frame[required]


def verify_forecasts(frame: pd.DataFrame, pit_bins: int = PIT_BINS, dm_lags=(1,)) -> tuple:
    """Score precomputed Gaussian forecasts; returns ``(scores, summary, histograms, tests)``."""
    y = frame["obs"].to_numpy(float)
    mean = frame["mean"].to_numpy(float)
    var = frame["variance"].to_numpy(float)
    crps, dss, pit = _gaussian_scores(mean, var, y)
    scores = frame.assign(abs_error=np.abs(y - mean), crps=crps, dss=dss, pit=pit)[SCORE_COLUMNS]
    methods = list(dict.fromkeys(frame["method"]))
    rows, hist = [], {"empty": scores.empty, "pit": {}}
    for method in methods:
        part = scores[scores["method"] == method]
        rows.append(
            {
                "table": "predictive",
                "method": method,
                "n": len(part),
                "mae": part["abs_error"].mean(),
                "crps": part["crps"].mean(),
                "dss": part["dss"].mean(),
                "pit_variance": pit_variance(part["pit"]) if len(part) > 1 else np.nan,
                "rmv": rmv(part["variance"]),
            }
        )
        hist["pit"][method] = pit_histogram(part["pit"].to_numpy(float), pit_bins).counts.tolist()
    dm = []
    if methods:
        g1 = daily_station_mean(scores, methods[0])
        for other in methods[1:]:
            g2 = daily_station_mean(scores, other)
            common = g1.index.intersection(g2.index)
            for h in dm_lags:
                try:
                    res = diebold_mariano(g1[common].to_numpy(), g2[common].to_numpy(), h)
                    dm.append({"compare": [methods[0], other], "h": h, "statistic": res.statistic, "p_value": res.p_value})
                except ValueError as exc:
                    dm.append({"compare": [methods[0], other], "h": h, "statistic": None, "p_value": None, "error": str(exc)})
    tests = {"empty": scores.empty, "diebold_mariano": {"score": "crps", "results": dm}}
    return scores, pd.DataFrame(rows, columns=SUMMARY_COLUMNS), hist, tests
