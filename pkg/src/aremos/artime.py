"""Autoregressive models for scalar forecast-error series.

Yule-Walker estimation runs through the Levinson-Durbin recursion on the
biased sample autocovariances, which yields every order up to the search
ceiling in one pass and guarantees a stationary fit.  The batch routine
:func:`fit_aic_batch` applies the same recursion to a stack of series at
once; the ensemble module relies on it for the member-wise fits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateSeriesError, EstimationError, InsufficientHistoryError

DEFAULT_MAX_ORDER = 15
DEFAULT_PSI_COUNT = 10

# gamma(0) at or below (tol * scale)**2 is treated as a constant series
_DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class ErrorSeries:
    """Forecast errors ``Z(t) = Y(t) - eta(t)`` on consecutive days."""

    values: np.ndarray
    start_index: int = 0

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("error series must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(values)):
            raise ValueError("error series contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size


SeriesLike = Union[ErrorSeries, Sequence[float], np.ndarray]


def _values(series: SeriesLike) -> np.ndarray:
    if isinstance(series, ErrorSeries):
        return series.values
    return ErrorSeries(series).values


@dataclass(frozen=True)
class ARModel:
    """Fitted AR(p): ``Z(t) - mean = sum_j coef_j (Z(t-j) - mean) + eps(t)``."""

    mean: float
    coefficients: tuple = ()
    innovation_variance: float = 0.0
    # orders selected by AIC carry their criterion values for inspection
    aic: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(
            self, "coefficients", tuple(float(a) for a in self.coefficients)
        )
        if not self.innovation_variance >= 0:
            raise ValueError("innovation variance must be non-negative")
        object.__setattr__(self, "innovation_variance", float(self.innovation_variance))

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def companion_eigenvalues(self) -> np.ndarray:
        p = self.order
        if p == 0:
            return np.zeros(0)
        companion = np.zeros((p, p))
        companion[0, :] = self.coefficients
        companion[1:, :-1] = np.eye(p - 1)
        return np.linalg.eigvals(companion)

    def is_stationary(self) -> bool:
        """True when all roots of ``1 - a_1 z - ... - a_p z^p`` lie outside the unit circle."""
        return bool(np.all(np.abs(self.companion_eigenvalues()) < 1.0))


def sample_autocovariance(series: SeriesLike, max_lag: int) -> np.ndarray:
    """Biased sample autocovariances ``gamma(0..max_lag)`` (divisor n)."""
    z = _values(series)
    n = z.size
    if n < 2:
        raise EstimationError("autocovariance needs at least 2 observations")
    if not 0 <= max_lag < n:
        raise ValueError(f"max_lag must lie in [0, {n - 1}], got {max_lag}")
    d = z - z.mean()
    return np.array([d[tau:] @ d[: n - tau] for tau in range(max_lag + 1)]) / n


def _is_degenerate(gamma0, scale):
    return gamma0 <= (_DEGENERATE_RTOL * np.maximum(scale, 1.0)) ** 2


def levinson_durbin(acov: np.ndarray):
    """Solve the Yule-Walker systems of orders 1..K by Levinson-Durbin.

    ``acov`` has shape ``(..., K + 1)``.  Returns ``(coefs, sigma2, reflection)``
    where ``coefs[..., p - 1, :p]`` are the AR(p) coefficients, ``sigma2[..., p]``
    the innovation variance of order p (``sigma2[..., 0] = gamma(0)``), and
    ``reflection[..., p - 1]`` the partial autocorrelation at lag p.  Entries
    with ``gamma(0) == 0`` come back as NaN.
    """
    acov = np.asarray(acov, dtype=float)
    K = acov.shape[-1] - 1
    batch = acov.shape[:-1]
    coefs = np.zeros(batch + (K, K))
    sigma2 = np.empty(batch + (K + 1,))
    reflection = np.empty(batch + (K,))
    sigma2[..., 0] = acov[..., 0]
    prev = np.zeros(batch + (0,))
    with np.errstate(divide="ignore", invalid="ignore"):
        for p in range(1, K + 1):
            # acov[p-1], ..., acov[1] paired with prev[0], ..., prev[p-2]
            lagged = acov[..., p - 1 : 0 : -1] if p > 1 else np.zeros(batch + (0,))
            k = (acov[..., p] - np.sum(prev * lagged, axis=-1)) / sigma2[..., p - 1]
            cur = np.empty(batch + (p,))
            cur[..., : p - 1] = prev - k[..., None] * prev[..., ::-1]
            cur[..., p - 1] = k
            coefs[..., p - 1, :p] = cur
            reflection[..., p - 1] = k
            sigma2[..., p] = sigma2[..., p - 1] * (1.0 - k * k)
            prev = cur
    return coefs, sigma2, reflection


def fit_yule_walker(series: SeriesLike, order: int) -> ARModel:
    """Yule-Walker fit of a fixed-order AR model; the mean is the sample mean."""
    z = _values(series)
    n = z.size
    if order < 0:
        raise ValueError("order must be non-negative")
    if n <= order + 1:
        raise EstimationError(f"need more than {order + 1} values for AR({order}), got {n}")
    acov = sample_autocovariance(z, order)
    if order == 0:
        return ARModel(z.mean(), (), acov[0])
    if _is_degenerate(acov[0], np.max(np.abs(z))):
        raise DegenerateSeriesError("series has zero variance")
    coefs, sigma2, _ = levinson_durbin(acov)
    model = ARModel(z.mean(), coefs[order - 1, :order], max(sigma2[order], 0.0))
    assert model.is_stationary(), "Yule-Walker fit must be stationary"
    return model


def _effective_max_order(n: int, max_order: int) -> int:
    # the search ceiling is also capped at n // 10 for short series
    return min(max_order, n // 10)


def aic_values(sigma2: np.ndarray, n: int) -> np.ndarray:
    """``n * log(sigma2(p)) + 2p`` along the last axis."""
    p = np.arange(sigma2.shape[-1])
    with np.errstate(divide="ignore"):
        return n * np.log(np.maximum(sigma2, 0.0)) + 2.0 * p


def select_order_aic(series: SeriesLike, max_order: int = DEFAULT_MAX_ORDER) -> int:
    """Order in ``0..max_order`` minimizing the Yule-Walker AIC.

    The ceiling is additionally capped at ``n // 10``.  Ties go to the
    smaller order.
    """
    return fit_ar_aic(series, max_order).order


def fit_ar_aic(series: SeriesLike, max_order: int = DEFAULT_MAX_ORDER) -> ARModel:
    """AIC order selection followed by the Yule-Walker fit at that order."""
    z = _values(series)
    n = z.size
    if not 0 <= max_order < n - 1:
        raise ValueError(f"max_order must lie in [0, {n - 2}], got {max_order}")
    K = _effective_max_order(n, max_order)
    acov = sample_autocovariance(z, K)
    if _is_degenerate(acov[0], np.max(np.abs(z))):
        raise DegenerateSeriesError("series has zero variance")
    coefs, sigma2, _ = levinson_durbin(acov)
    aic = aic_values(sigma2, n)
    p = int(np.argmin(aic))
    model = ARModel(
        z.mean(),
        coefs[p - 1, :p] if p else (),
        max(sigma2[p], 0.0),
        aic=tuple(aic),
    )
    assert model.is_stationary(), "Yule-Walker fit must be stationary"
    return model


@dataclass(frozen=True)
class BatchFit:
    """Member-wise AR fits for a stack of equally long series.

    Arrays are indexed by the leading batch shape; ``coefficients`` is padded
    with zeros beyond each series' selected order.
    """

    mean: np.ndarray
    order: np.ndarray
    coefficients: np.ndarray
    innovation_variance: np.ndarray
    degenerate: np.ndarray

    def model(self, index) -> ARModel:
        p = int(self.order[index])
        return ARModel(
            self.mean[index],
            self.coefficients[index][:p],
            self.innovation_variance[index],
        )


def fit_aic_batch(windows: np.ndarray, max_order: int = DEFAULT_MAX_ORDER) -> BatchFit:
    """AIC-selected Yule-Walker fits of every series along the last axis.

    Constant series cannot be fitted; they fall back to AR(0) with zero
    innovation variance and are flagged in ``degenerate``.
    """
    windows = np.asarray(windows, dtype=float)
    n = windows.shape[-1]
    if not 0 <= max_order < n - 1:
        raise ValueError(f"max_order must lie in [0, {n - 2}], got {max_order}")
    K = _effective_max_order(n, max_order)
    mean = windows.mean(axis=-1)
    d = windows - mean[..., None]
    acov = np.stack(
        [np.sum(d[..., tau:] * d[..., : n - tau], axis=-1) for tau in range(K + 1)],
        axis=-1,
    ) / n
    degenerate = _is_degenerate(acov[..., 0], np.max(np.abs(windows), axis=-1))
    # keep the recursion finite on constant series; results are masked below
    acov = np.where(degenerate[..., None], np.eye(1, K + 1)[0], acov)
    coefs, sigma2, reflection = levinson_durbin(acov)
    assert np.all(np.abs(reflection) < 1.0), "Yule-Walker fit must be stationary"
    order = np.argmin(aic_values(sigma2, n), axis=-1)
    order = np.where(degenerate, 0, order)
    padded = np.zeros(windows.shape[:-1] + (K,))
    if K:
        chosen = np.take_along_axis(
            coefs, np.maximum(order - 1, 0)[..., None, None], axis=-2
        )[..., 0, :]
        padded = np.where(np.arange(K) < order[..., None], chosen, 0.0)
    innovation = np.take_along_axis(sigma2, order[..., None], axis=-1)[..., 0]
    innovation = np.where(degenerate, 0.0, np.maximum(innovation, 0.0))
    return BatchFit(mean, order, padded, innovation, degenerate)


def psi_weights(model: ARModel, count: int = DEFAULT_PSI_COUNT) -> np.ndarray:
    """First ``count`` weights of the moving-average representation (psi_0 = 1 omitted)."""
    if count < 1:
        raise ValueError("count must be at least 1")
    alpha = model.coefficients
    psi = np.zeros(count + 1)
    psi[0] = 1.0
    for j in range(1, count + 1):
        for i in range(1, min(j, len(alpha)) + 1):
            psi[j] += alpha[i - 1] * psi[j - i]
    return psi[1:]


def psi_weights_batch(coefficients: np.ndarray, count: int = DEFAULT_PSI_COUNT) -> np.ndarray:
    """:func:`psi_weights` for zero-padded coefficient rows of shape ``(..., K)``."""
    coefficients = np.asarray(coefficients, dtype=float)
    K = coefficients.shape[-1]
    psi = np.zeros(coefficients.shape[:-1] + (count + 1,))
    psi[..., 0] = 1.0
    for j in range(1, count + 1):
        for i in range(1, min(j, K) + 1):
            psi[..., j] += coefficients[..., i - 1] * psi[..., j - i]
    return psi[..., 1:]


def process_variance(model: ARModel, count: int = DEFAULT_PSI_COUNT) -> float:
    """Truncated process variance ``sigma_eps^2 * (1 + sum psi_j^2)``."""
    psi = psi_weights(model, count)
    return model.innovation_variance * (1.0 + float(psi @ psi))


def ar_modified_forecast(model: ARModel, recent_errors, eta: float) -> float:
    """AR-corrected forecast ``eta + mean + sum_j a_j (Z(t-j) - mean)``.

    ``recent_errors`` lists the most recent error first: ``Z(t-1), Z(t-2), ...``.
    """
    p = model.order
    recent = np.asarray(recent_errors, dtype=float).ravel()
    if recent.size < p:
        raise InsufficientHistoryError(
            f"AR({p}) correction needs {p} recent errors, got {recent.size}"
        )
    correction = float(np.dot(model.coefficients, recent[:p] - model.mean)) if p else 0.0
    return float(eta) + model.mean + correction
