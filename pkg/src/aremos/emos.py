"""Local Gaussian EMOS fitted by minimum CRPS."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import ndtr

from .errors import ConvergenceError, EstimationError

VARIANCE_FLOOR = 1e-6
DEFAULT_TRAINING_LENGTH = 25
MIN_TRAINING_LENGTH = 5

_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class GaussianPredictive:
    mean: float
    variance: float

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError(f"predictive variance must be positive, got {self.variance}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def cdf(self, y):
        return ndtr((np.asarray(y, dtype=float) - self.mean) / self.std)


@dataclass(frozen=True)
class EmosParams:
    """``mean = a + b . members`` (or ``a + b * ensemble mean``), ``variance = c + d S^2``."""

    intercept: float
    weights: tuple
    var_intercept: float
    var_slope: float

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(b) for b in np.atleast_1d(self.weights)))
        if self.var_intercept < 0 or self.var_slope < 0:
            raise ValueError("variance coefficients must be non-negative")
        if not all(math.isfinite(b) for b in self.weights):
            raise ValueError("member weights must be finite")

    @property
    def exchangeable(self) -> bool:
        return len(self.weights) == 1


def ensemble_stats(ensemble) -> tuple[float, float]:
    """Ensemble mean and variance with divisor m - 1."""
    members = np.asarray(getattr(ensemble, "members", ensemble), dtype=float)
    if members.size < 2:
        raise ValueError("ensemble variance needs at least two members")
    return float(members.mean()), float(members.var(ddof=1))


def crps_normal(mean, std, y):
    """Closed-form CRPS of ``N(mean, std^2)`` at ``y``; broadcasts."""
    z = (y - mean) / std
    return std * (z * (2.0 * ndtr(z) - 1.0) + 2.0 * _INV_SQRT_2PI * np.exp(-0.5 * z * z) - _INV_SQRT_PI)


def gaussian_crps(dist: GaussianPredictive, y_obs) -> float:
    if not dist.variance > 0:
        raise ValueError("CRPS needs a positive variance")
    return crps_normal(dist.mean, dist.std, y_obs)


def predict_arrays(params: EmosParams, members: np.ndarray):
    """Predictive means and variances for a stack of ensembles of shape ``(n, m)``."""
    members = np.atleast_2d(np.asarray(members, dtype=float))
    s2 = members.var(axis=1, ddof=1)
    if params.exchangeable:
        mean = params.intercept + params.weights[0] * members.mean(axis=1)
    else:
        mean = params.intercept + members @ np.asarray(params.weights)
    variance = np.maximum(params.var_intercept + params.var_slope * s2, VARIANCE_FLOOR)
    return mean, variance


def emos_predict(params: EmosParams, ensemble) -> GaussianPredictive:
    mean, variance = predict_arrays(params, np.asarray(getattr(ensemble, "members", ensemble))[None, :])
    return GaussianPredictive(float(mean[0]), float(variance[0]))


class _Objective:
    """Mean training CRPS as a function of ``(a', b..., sqrt c, sqrt d)``.

    The regressors are centered on their training means, so ``a'`` is the
    intercept at the centre; :meth:`unpack` maps back to the raw intercept.
    """

    def __init__(self, members, obs, exchangeable, fit_slope):
        self.obs = obs
        self.s2 = members.var(axis=1, ddof=1)
        self.exchangeable = exchangeable
        self.fit_slope = fit_slope
        raw = members.mean(axis=1) if exchangeable else members
        self.center = raw.mean(axis=0)
        self.regressors = raw - self.center

    def unpack(self, theta):
        nb = 1 if self.exchangeable else self.regressors.shape[1]
        b = theta[1 : 1 + nb]
        a = theta[0] - float(np.dot(b, np.atleast_1d(self.center)))
        c = theta[1 + nb] ** 2
        d = theta[2 + nb] ** 2 if self.fit_slope else 0.0
        return a, b, c, d

    def pack(self, a, b, c, d):
        a_centered = a + float(np.dot(b, np.atleast_1d(self.center)))
        slope = [math.sqrt(d)] if self.fit_slope else []
        return np.array([a_centered, *b, math.sqrt(c), *slope])

    def __call__(self, theta):
        nb = 1 if self.exchangeable else self.regressors.shape[1]
        b = theta[1 : 1 + nb]
        mean = theta[0] + (b[0] * self.regressors if self.exchangeable else self.regressors @ b)
        c = theta[1 + nb] ** 2
        d = theta[2 + nb] ** 2 if self.fit_slope else 0.0
        std = np.sqrt(np.maximum(c + d * self.s2, VARIANCE_FLOOR))
        return float(crps_normal(mean, std, self.obs).sum()) / self.obs.size


def _simplex(fun, x0, maxfev, rtol):
    f0 = fun(x0)
    res = minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={
            "maxfev": maxfev,
            "maxiter": maxfev,
            "xatol": 1e-4,
            "fatol": rtol * max(abs(f0), 1e-12),
        },
    )
    return res


def fit_emos_arrays(
    members: np.ndarray,
    obs: np.ndarray,
    exchangeable: bool = True,
    rtol: float = 1e-8,
) -> EmosParams:
    """Minimum-CRPS EMOS fit on training arrays ``members (n, m)`` and ``obs (n,)``."""
    members = np.asarray(members, dtype=float)
    obs = np.asarray(obs, dtype=float)
    n, m = members.shape
    if n < MIN_TRAINING_LENGTH:
        raise EstimationError(f"EMOS needs at least {MIN_TRAINING_LENGTH} training days, got {n}")
    if obs.shape != (n,):
        raise ValueError("observations and ensembles must align")
    fit_slope = bool(np.any(members.var(axis=1, ddof=1) > 0))
    objective = _Objective(members, obs, exchangeable, fit_slope)

    c0 = float(np.var(obs - members.mean(axis=1), ddof=1))
    b0 = [1.0] if exchangeable else [1.0 / m] * m
    x0 = objective.pack(0.0, b0, c0, 1.0)
    maxfev = 500 * x0.size

    res = _simplex(objective, x0, maxfev, rtol)
    if not res.success:
        raise ConvergenceError(
            f"EMOS fit did not converge within {maxfev} evaluations",
            last_iterate=res.x,
            objective=res.fun,
        )
    a, b, c, d = objective.unpack(res.x)
    return EmosParams(float(a), tuple(b), float(c), float(d))


def fit_emos(window: Sequence, exchangeable: bool = True) -> EmosParams:
    """Fit EMOS to a training window of ``(EnsembleForecast, observation)`` pairs."""
    if len(window) < MIN_TRAINING_LENGTH:
        raise EstimationError(f"EMOS needs at least {MIN_TRAINING_LENGTH} training days")
    sizes = {np.asarray(getattr(e, "members", e)).size for e, _ in window}
    if len(sizes) != 1:
        raise ValueError("all ensembles in a window must have the same size")
    members = np.array([np.asarray(getattr(e, "members", e), dtype=float) for e, _ in window])
    obs = np.array([y for _, y in window], dtype=float)
    return fit_emos_arrays(members, obs, exchangeable)


def mean_crps(params: EmosParams, members: np.ndarray, obs: np.ndarray) -> float:
    mean, variance = predict_arrays(params, members)
    return float(np.mean(crps_normal(mean, np.sqrt(variance), np.asarray(obs, dtype=float))))
