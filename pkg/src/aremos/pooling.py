"""AR-EMOS predictive distribution and the spread-adjusted linear pool (SLP)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .artime import DEFAULT_PSI_COUNT, process_variance
from .emos import VARIANCE_FLOOR, GaussianPredictive, crps_normal

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

DEFAULT_WEIGHTS = tuple(round(0.1 * i, 1) for i in range(11))
DEFAULT_SPREADS = tuple(round(0.6 + 0.1 * i, 1) for i in range(9))


def ar_emos_predict(modified, psi_count: int = DEFAULT_PSI_COUNT) -> GaussianPredictive:
    """Gaussian with the modified-ensemble mean and the average member process variance."""
    variances = [process_variance(model, psi_count) for model in modified.member_models]
    variance = max(float(np.mean(variances)), VARIANCE_FLOOR)
    return GaussianPredictive(float(np.mean(modified.members)), variance)


@dataclass(frozen=True)
class SlpMixture:
    """Gaussian components ``N(mean_l, (spread * scale_l)^2)`` with weights ``w_l``."""

    weights: np.ndarray
    means: np.ndarray
    scales: np.ndarray
    spread: float = 1.0

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        mu = np.array(self.means, dtype=float)
        s = np.array(self.scales, dtype=float)
        if not (w.ndim == mu.ndim == s.ndim == 1 and w.size == mu.size == s.size > 0):
            raise ValueError("weights, means and scales must be equal-length 1-d sequences")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be non-negative and sum to one")
        if np.any(s <= 0) or not self.spread > 0:
            raise ValueError("scales and spread must be strictly positive")
        for name, value in (("weights", w), ("means", mu), ("scales", s)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "spread", float(self.spread))

    @classmethod
    def from_gaussians(cls, components, weights, spread: float = 1.0) -> "SlpMixture":
        return cls(
            weights,
            [g.mean for g in components],
            [math.sqrt(g.variance) for g in components],
            spread,
        )

    def cdf(self, y):
        return slp_cdf(self, y)

    def pdf(self, y):
        y = np.asarray(y, dtype=float)[..., None]
        s = self.spread * self.scales
        z = (y - self.means) / s
        return np.sum(self.weights * _INV_SQRT_2PI * np.exp(-0.5 * z * z) / s, axis=-1)

    def moments(self):
        return slp_moments(self)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        component = rng.choice(self.weights.size, size=size, p=self.weights)
        return rng.normal(self.means[component], self.spread * self.scales[component])


def slp_cdf(mix: SlpMixture, y):
    y = np.asarray(y, dtype=float)[..., None]
    return np.sum(mix.weights * ndtr((y - mix.means) / (mix.scales * mix.spread)), axis=-1)


def slp_moments(mix: SlpMixture) -> tuple[float, float]:
    """Mixture mean and variance."""
    mean = float(mix.weights @ mix.means)
    second = float(mix.weights @ (mix.means**2 + (mix.spread * mix.scales) ** 2))
    return mean, second - mean * mean


def dss_normal(mean, variance, y):
    """Dawid-Sebastiani score ``(y - mean)^2 / var + log var``; broadcasts."""
    return (y - mean) ** 2 / variance + np.log(variance)


def dss(mix: SlpMixture, y_obs) -> float:
    mean, variance = slp_moments(mix)
    return dss_normal(mean, variance, y_obs)


def abs_normal_mean(mu, variance):
    """``E|X|`` for ``X ~ N(mu, variance)``; ``|mu|`` when the variance is zero."""
    mu = np.asarray(mu, dtype=float)
    sigma = np.sqrt(np.asarray(variance, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = mu / sigma
        value = 2.0 * sigma * _INV_SQRT_2PI * np.exp(-0.5 * z * z) + mu * (2.0 * ndtr(z) - 1.0)
    return np.where(sigma > 0, value, np.abs(mu))


def slp_crps(mix: SlpMixture, y_obs) -> float:
    """Closed-form CRPS of the pooled Gaussian mixture."""
    c2 = mix.spread**2
    var = mix.scales**2
    w = mix.weights
    first = np.sum(w * abs_normal_mean(y_obs - mix.means, c2 * var))
    pair = abs_normal_mean(mix.means[:, None] - mix.means[None, :], c2 * (var[:, None] + var[None, :]))
    return float(first - 0.5 * (w @ pair @ w))


def two_component_scores(weight, spread, means, variances, y):
    """CRPS, DSS and PIT of two-component pools for arrays of days.

    ``means`` and ``variances`` have shape ``(n, 2)``; ``weight`` is the
    first component's weight.  Returns three arrays of shape ``(n,)``.
    """
    means = np.asarray(means, dtype=float)
    variances = np.asarray(variances, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.array([weight, 1.0 - weight])
    c2 = spread * spread
    sd = spread * np.sqrt(variances)
    # per-component CRPS plus the mixing correction; a zero weight leaves
    # exactly the other component's Gaussian score
    own = crps_normal(means, sd, y[:, None])
    cross = abs_normal_mean(means[:, 0] - means[:, 1], c2 * variances.sum(axis=1))
    crps = own @ w + (sd @ (w * (1.0 - w))) / math.sqrt(math.pi) - w[0] * w[1] * cross
    mix_mean = means @ w
    mix_var = (c2 * variances) @ w + w[0] * w[1] * (means[:, 0] - means[:, 1]) ** 2
    dss = dss_normal(mix_mean, mix_var, y)
    pit = ndtr((y[:, None] - means) / sd) @ w
    return crps, dss, pit


@dataclass(frozen=True)
class SlpSearchGrid:
    weight_values: tuple = DEFAULT_WEIGHTS
    spread_values: tuple = DEFAULT_SPREADS
    objective: str = "CRPS"

    def __post_init__(self):
        object.__setattr__(self, "weight_values", tuple(float(w) for w in self.weight_values))
        object.__setattr__(self, "spread_values", tuple(float(c) for c in self.spread_values))
        object.__setattr__(self, "objective", self.objective.upper())
        if not self.weight_values or not self.spread_values:
            raise ValueError("search grid must not be empty")
        if any(not 0.0 <= w <= 1.0 for w in self.weight_values):
            raise ValueError("weights must lie in [0, 1]")
        if any(c <= 0 for c in self.spread_values):
            raise ValueError("spreads must be positive")
        if self.objective not in ("CRPS", "DSS"):
            raise ValueError(f"unknown objective {self.objective!r}")


@dataclass(frozen=True)
class GridSearchResult:
    weight: float
    spread: float
    score: float
    table: np.ndarray = field(repr=False)
    grid: SlpSearchGrid = field(repr=False)

    def rows(self):
        """``(weight, spread, mean score)`` for every cell, weights outermost."""
        for i, w in enumerate(self.grid.weight_values):
            for j, c in enumerate(self.grid.spread_values):
                yield w, c, float(self.table[i, j])


def _as_component_arrays(component_forecasts):
    if isinstance(component_forecasts, tuple) and len(component_forecasts) == 2:
        means, variances = (np.asarray(a, dtype=float) for a in component_forecasts)
        return means, variances
    pairs = list(component_forecasts)
    means = np.array([[g.mean for g in pair] for pair in pairs], dtype=float)
    variances = np.array([[g.variance for g in pair] for pair in pairs], dtype=float)
    return means, variances


def grid_search_slp(component_forecasts, observations, grid: SlpSearchGrid | None = None) -> GridSearchResult:
    """Evaluate the mean score of every ``(w1, c)`` cell and pick the best.

    ``component_forecasts`` is either a sequence of Gaussian pairs, one per
    case, or a ``(means, variances)`` tuple of ``(n, 2)`` arrays.  Ties go to
    the weight closest to 0.5, then the spread closest to 1.
    """
    grid = grid or SlpSearchGrid()
    means, variances = _as_component_arrays(component_forecasts)
    y = np.asarray(observations, dtype=float)
    if y.size == 0 or means.shape != (y.size, 2) or variances.shape != means.shape:
        raise ValueError("need non-empty, aligned two-component forecasts and observations")
    pick = 0 if grid.objective == "CRPS" else 1
    table = np.empty((len(grid.weight_values), len(grid.spread_values)))
    for i, w in enumerate(grid.weight_values):
        for j, c in enumerate(grid.spread_values):
            table[i, j] = float(np.mean(two_component_scores(w, c, means, variances, y)[pick]))
    best = table.min()
    tol = 1e-12 * max(1.0, abs(best))
    candidates = [
        (abs(w - 0.5), abs(c - 1.0), i, j)
        for i, w in enumerate(grid.weight_values)
        for j, c in enumerate(grid.spread_values)
        if table[i, j] <= best + tol
    ]
    _, _, i, j = min(candidates)
    return GridSearchResult(grid.weight_values[i], grid.spread_values[j], float(table[i, j]), table, grid)
