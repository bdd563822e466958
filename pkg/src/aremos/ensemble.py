"""Station-indexed ensemble data and the member-wise AR modification."""

from __future__ import annotations

import datetime as dt
import logging
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .artime import (
    DEFAULT_MAX_ORDER,
    DEFAULT_PSI_COUNT,
    ARModel,
    ErrorSeries,
    ar_modified_forecast,
    fit_aic_batch,
    psi_weights_batch,
)
from .errors import InsufficientHistoryError, ValidationError

logger = logging.getLogger(__name__)

Selector = Union[int, str]


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class EnsembleForecast:
    station_id: str
    date: dt.date
    members: np.ndarray

    def __post_init__(self):
        members = _frozen(self.members)
        if members.ndim != 1 or members.size < 2:
            raise ValidationError("an ensemble needs at least two members")
        if not np.all(np.isfinite(members)):
            raise ValidationError("ensemble members must be finite")
        object.__setattr__(self, "members", members)

    @property
    def size(self) -> int:
        return self.members.size


@dataclass(frozen=True)
class StationSeries:
    """Gap-free daily observations and ensemble forecasts at one station.

    ``members`` has shape ``(T, m)`` and row ``t`` is the forecast valid on
    ``dates[t]``.
    """

    station_id: str
    dates: tuple
    observations: np.ndarray
    members: np.ndarray

    def __post_init__(self):
        obs = _frozen(self.observations)
        members = _frozen(self.members)
        dates = tuple(self.dates)
        if obs.ndim != 1 or members.ndim != 2:
            raise ValidationError("observations must be 1-d and members 2-d")
        if not (len(dates) == obs.size == members.shape[0]):
            raise ValidationError("dates, observations and forecasts must align 1:1")
        if members.shape[1] < 2:
            raise ValidationError("an ensemble needs at least two members")
        if not (np.all(np.isfinite(obs)) and np.all(np.isfinite(members))):
            raise ValidationError(f"station {self.station_id}: non-finite values")
        one_day = dt.timedelta(days=1)
        for prev, cur in zip(dates, dates[1:]):
            if cur - prev != one_day:
                raise ValidationError(
                    f"station {self.station_id}: dates not consecutive at {prev} -> {cur}"
                )
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "dates", dates)

    def __len__(self):
        return self.observations.size

    @property
    def n_members(self) -> int:
        return self.members.shape[1]

    def forecast(self, t: int) -> EnsembleForecast:
        return EnsembleForecast(self.station_id, self.dates[t], self.members[t])

    def subset(self, start: int, stop: int) -> "StationSeries":
        return StationSeries(
            self.station_id,
            self.dates[start:stop],
            self.observations[start:stop],
            self.members[start:stop],
        )


@dataclass(frozen=True)
class ARModifiedEnsemble:
    date: dt.date
    members: np.ndarray
    member_models: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", _frozen(self.members))
        object.__setattr__(self, "member_models", tuple(self.member_models))
        if len(self.member_models) != self.members.size:
            raise ValidationError("one fitted model per modified member is required")


def summarize(ensemble, kind: str = "mean") -> float:
    """Mean or median of the member values (even m: midpoint of the central pair)."""
    members = ensemble.members if hasattr(ensemble, "members") else np.asarray(ensemble)
    if kind == "mean":
        return float(np.mean(members))
    if kind == "median":
        return float(np.median(members))
    raise ValueError(f"unknown summary {kind!r}")


def deterministic_forecasts(series: StationSeries, summary: Selector) -> np.ndarray:
    """Per-day deterministic-style forecast: one member, the mean or the median."""
    if summary == "mean":
        return series.members.mean(axis=1)
    if summary == "median":
        return np.median(series.members, axis=1)
    if isinstance(summary, (int, np.integer)) and not isinstance(summary, bool):
        return series.members[:, summary]
    raise ValueError(f"unknown summary selector {summary!r}")


def error_series(series: StationSeries, summary: Selector = "mean", window=None) -> ErrorSeries:
    """Errors ``obs - eta`` over ``window`` (a slice or ``(start, stop)``; default: all days)."""
    if window is None:
        window = slice(0, len(series))
    elif not isinstance(window, slice):
        window = slice(*window)
    start, stop, step = window.indices(len(series))
    if step != 1:
        raise ValueError("error windows must be contiguous")
    if stop <= start:
        raise ValueError("empty error window")
    eta = deterministic_forecasts(series, summary)[start:stop]
    return ErrorSeries(series.observations[start:stop] - eta, start_index=start)


@dataclass(frozen=True)
class RollingModification:
    """AR modification for every day ``t`` in ``days`` of one station.

    Member arrays have shape ``(n_days, m)``.  ``mean_path``/``median_path``
    hold the AR modification applied to the raw mean and median.
    """

    days: np.ndarray
    members: np.ndarray
    member_orders: np.ndarray
    member_variances: np.ndarray
    member_degenerate: np.ndarray
    mean_path: np.ndarray
    median_path: np.ndarray
    mean_orders: np.ndarray
    median_orders: np.ndarray

    @property
    def mean_of_modified(self) -> np.ndarray:
        return self.members.mean(axis=1)

    @property
    def median_of_modified(self) -> np.ndarray:
        return np.median(self.members, axis=1)

    @property
    def ar_emos_variance(self) -> np.ndarray:
        return self.member_variances.mean(axis=1)


def rolling_modification(
    series: StationSeries,
    training_length: int,
    max_order: int = DEFAULT_MAX_ORDER,
    psi_count: int = DEFAULT_PSI_COUNT,
    start: int | None = None,
) -> RollingModification:
    """Refit the member, mean and median AR models daily on the preceding window.

    Day ``t`` only ever sees errors from days ``t - training_length .. t - 1``.
    """
    T = len(series)
    start = training_length if start is None else start
    if start < training_length:
        raise InsufficientHistoryError(
            f"day {start} has fewer than {training_length} preceding days"
        )
    days = np.arange(start, T)
    m = series.n_members
    # columns: members, then mean, then median
    forecasts = np.column_stack(
        [series.members, series.members.mean(axis=1), np.median(series.members, axis=1)]
    )
    errors = series.observations[:, None] - forecasts
    if days.size == 0:
        empty = np.zeros((0, m))
        none = np.zeros(0)
        return RollingModification(
            days, empty, empty.astype(int), empty, empty.astype(bool),
            none, none, none.astype(int), none.astype(int),
        )
    # windows[i, k, :] are the errors of forecaster k on days t_i - T1 .. t_i - 1
    sliding = np.lib.stride_tricks.sliding_window_view(errors, training_length, axis=0)
    windows = sliding[days - training_length]
    fit = fit_aic_batch(windows, max_order)
    K = fit.coefficients.shape[-1]
    recent = windows[..., ::-1][..., :K]
    correction = np.sum(fit.coefficients * (recent - fit.mean[..., None]), axis=-1)
    modified = forecasts[days] + fit.mean + correction
    variances = fit.innovation_variance * (
        1.0 + np.sum(psi_weights_batch(fit.coefficients, psi_count) ** 2, axis=-1)
    )
    n_degenerate = int(fit.degenerate[:, :m].sum())
    if n_degenerate:
        logger.warning(
            "station %s: %d member windows had constant errors; used bias correction",
            series.station_id,
            n_degenerate,
        )
    return RollingModification(
        days=days,
        members=modified[:, :m],
        member_orders=fit.order[:, :m],
        member_variances=variances[:, :m],
        member_degenerate=fit.degenerate[:, :m],
        mean_path=modified[:, m],
        median_path=modified[:, m + 1],
        mean_orders=fit.order[:, m],
        median_orders=fit.order[:, m + 1],
    )


def modify_ensemble(
    series: StationSeries,
    date_index: int,
    training_length: int,
    max_order: int = DEFAULT_MAX_ORDER,
) -> ARModifiedEnsemble:
    """AR-modified ensemble for one day, each member fitted on its own error series."""
    if date_index - training_length < 0 or date_index >= len(series):
        raise InsufficientHistoryError(
            f"day {date_index} lacks a full {training_length}-day training window"
        )
    window = slice(date_index - training_length, date_index)
    z = series.observations[window, None] - series.members[window]
    fit = fit_aic_batch(z.T, max_order)
    if fit.degenerate.any():
        logger.warning(
            "station %s day %d: %d members with constant errors; used bias correction",
            series.station_id,
            date_index,
            int(fit.degenerate.sum()),
        )
    models = [fit.model(i) for i in range(series.n_members)]
    eta = series.members[date_index]
    recent = z[::-1]
    modified = [ar_modified_forecast(mdl, recent[:, i], eta[i]) for i, mdl in enumerate(models)]
    return ARModifiedEnsemble(series.dates[date_index], modified, models)
