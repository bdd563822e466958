"""Scores, calibration diagnostics and hypothesis tests for forecast verification."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .artime import ErrorSeries, _is_degenerate, _values
from .errors import DegenerateDifferentialError, DegenerateSeriesError, EstimationError

PIT_BINS = 20
ORDER_BUCKET_START = 5


@dataclass(frozen=True)
class Histogram:
    """Bin counts over ``edges`` (``len(edges) == len(counts) + 1``)."""

    counts: np.ndarray
    edges: np.ndarray

    @property
    def bin_count(self) -> int:
        return self.counts.size

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float


def mae(forecasts, observations) -> float:
    f = np.asarray(forecasts, dtype=float)
    y = np.asarray(observations, dtype=float)
    if f.shape != y.shape:
        raise ValueError(f"length mismatch: {f.shape} vs {y.shape}")
    if f.size == 0:
        raise ValueError("MAE needs at least one case")
    return float(np.mean(np.abs(y - f)))


def pit_value(cdf, y_obs):
    """PIT ``F(y_obs)`` for any callable CDF or object with a ``cdf`` method."""
    evaluate = getattr(cdf, "cdf", cdf)
    return evaluate(y_obs)


def pit_variance(pits) -> float:
    pits = np.asarray(pits, dtype=float)
    if pits.size < 2:
        raise ValueError("PIT variance needs at least two values")
    return float(np.var(pits, ddof=1))


def pit_histogram(pits, bins: int = PIT_BINS) -> Histogram:
    edges = np.linspace(0.0, 1.0, bins + 1)
    counts, _ = np.histogram(np.clip(pits, 0.0, 1.0), bins=edges)
    return Histogram(counts, edges)


def observation_ranks(members, observations, rng: np.random.Generator) -> np.ndarray:
    """Rank ``1..m+1`` of each observation among its ensemble; ties drawn uniformly."""
    if rng is None:
        raise ValueError("rank ties are randomized: pass a seeded Generator")
    members = np.atleast_2d(np.asarray(members, dtype=float))
    y = np.asarray(observations, dtype=float).reshape(-1, 1)
    below = np.sum(members < y, axis=1)
    ties = np.sum(members == y, axis=1)
    return below + 1 + rng.integers(0, ties + 1)


def rank_histogram(ensembles, observations, rng: np.random.Generator) -> Histogram:
    members = np.array([np.asarray(getattr(e, "members", e), dtype=float) for e in ensembles])
    if members.size == 0:
        return Histogram(np.zeros(0, dtype=int), np.zeros(1))
    m = members.shape[1]
    ranks = observation_ranks(members, observations, rng)
    counts = np.bincount(ranks - 1, minlength=m + 1)
    return Histogram(counts, np.arange(0.5, m + 2.5))


def rmv(variances) -> float:
    """Root mean variance (sharpness)."""
    v = np.asarray(variances, dtype=float)
    if v.size == 0 or np.any(v < 0):
        raise ValueError("RMV needs at least one non-negative variance")
    return float(np.sqrt(v.mean()))


def ljung_box(series, lag: int = 1) -> TestResult:
    """Ljung-Box portmanteau test against chi-square with ``lag`` degrees of freedom."""
    z = _values(series) if isinstance(series, ErrorSeries) else np.asarray(series, dtype=float)
    n = z.size
    if lag < 1 or n <= lag + 1:
        raise EstimationError(f"Ljung-Box with lag {lag} needs more than {lag + 1} values, got {n}")
    d = z - z.mean()
    gamma0 = d @ d
    if _is_degenerate(gamma0 / n, np.max(np.abs(z))):
        raise DegenerateSeriesError("series has zero variance")
    taus = np.arange(1, lag + 1)
    rho = np.array([d[tau:] @ d[: n - tau] for tau in taus]) / gamma0
    q = n * (n + 2) * np.sum(rho**2 / (n - taus))
    return TestResult(float(q), float(stats.chi2.sf(q, lag)))


def diebold_mariano(g1, g2, h: int = 1, alternative: str = "two-sided") -> TestResult:
    """Diebold-Mariano statistic for the differential ``g1 - g2``.

    Negative values favour ``g1`` for negatively oriented scores.  The
    ``alternative`` is ``"two-sided"``, ``"less"`` or ``"greater"``.
    """
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    if g1.shape != g2.shape or g1.ndim != 1:
        raise ValueError("score series must be 1-d and of equal length")
    T = g1.size
    if h < 1 or T <= 2 * h:
        raise EstimationError(f"need more than {2 * h} cases for h={h}, got {T}")
    d = g1 - g2
    if np.all(d == 0):
        raise DegenerateDifferentialError("score series are identical")
    dc = d - d.mean()
    gamma = np.array([dc[tau:] @ dc[: T - tau] for tau in range(h)]) / T
    long_run = gamma[0] + 2.0 * gamma[1:].sum()
    if not long_run > 0:
        raise DegenerateDifferentialError("differential has non-positive long-run variance")
    s = float(np.sqrt(T) * d.mean() / np.sqrt(long_run))
    if alternative == "two-sided":
        p = 2.0 * stats.norm.sf(abs(s))
    elif alternative == "less":
        p = stats.norm.cdf(s)
    elif alternative == "greater":
        p = stats.norm.sf(s)
    else:
        raise ValueError(f"unknown alternative {alternative!r}")
    return TestResult(s, float(p))


def order_frequency_table(fitted_orders, bucket_start: int = ORDER_BUCKET_START) -> dict:
    """Counts per selected AR order plus a grouped ``"5+"`` bucket.

    The bucket key is only present when some order reaches ``bucket_start``.
    """
    counts = Counter(int(p) for p in fitted_orders)
    table: dict = {p: counts[p] for p in sorted(counts)}
    tail = sum(c for p, c in counts.items() if p >= bucket_start)
    if tail:
        table[f"{bucket_start}+"] = tail
    return table


def chi_square_uniformity(counts) -> TestResult:
    """Pearson chi-square test of equal bin probabilities."""
    res = stats.chisquare(np.asarray(counts, dtype=float))
    return TestResult(float(res.statistic), float(res.pvalue))
