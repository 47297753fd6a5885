"""Timeseries smoothing and the trend / group-difference tests used on lexical measures."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

__all__ = [
    "TimeseriesPoint",
    "TrendTestResult",
    "DegenerateInputError",
    "moving_average_ci",
    "combine_categories",
    "annual_aggregate",
    "mann_kendall",
    "kpss_level",
    "pearson",
    "anova_oneway",
    "kde_scott",
    "KPSS_CRITICAL_VALUES",
]

Z_95 = 1.96
# (p-value, critical value) for the level-stationarity KPSS statistic.
KPSS_CRITICAL_VALUES = ((0.10, 0.347), (0.05, 0.463), (0.025, 0.574), (0.01, 0.739))


class DegenerateInputError(ValueError):
    """The statistic is undefined for this input (e.g. zero variance)."""


@dataclass(frozen=True)
class TimeseriesPoint:
    year: int
    mean: float
    std_error: float
    n: int

    @property
    def ci_halfwidth(self) -> float:
        return Z_95 * self.std_error


@dataclass(frozen=True)
class TrendTestResult:
    test: str
    statistic: float
    p_value: float
    reject_at_5pct: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "test": self.test,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "reject_at_5pct": self.reject_at_5pct,
            "detail": self.detail,
        }


def moving_average_ci(points: Iterable[tuple[int, float]], window: int = 5, min_points: int = 10) -> list[TimeseriesPoint]:
    """Centered moving average over ``year +/- window`` with its standard error.

    Every integer year between the first and last observed year is a
    candidate; years with fewer than ``min_points`` values in the window are
    omitted.
    """
    by_year: dict[int, list[float]] = defaultdict(list)
    for year, value in points:
        if not math.isfinite(value):
            raise ValueError(f"non-finite value for year {year}")
        by_year[int(year)].append(float(value))
    if not by_year:
        return []
    out = []
    for year in range(min(by_year), max(by_year) + 1):
        vals = [v for y in range(year - window, year + window + 1) for v in by_year.get(y, ())]
        n = len(vals)
        if n < min_points or n == 0:
            continue
        arr = np.asarray(vals)
        se = float(arr.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        out.append(TimeseriesPoint(year, float(arr.mean()), se, n))
    return out


def combine_categories(per_category: Sequence[Sequence[TimeseriesPoint]]) -> list[TimeseriesPoint]:
    """Average category series year by year; SE is sqrt(sum SE_i^2) / n over the categories present."""
    by_year: dict[int, list[TimeseriesPoint]] = defaultdict(list)
    for series in per_category:
        for p in series:
            by_year[p.year].append(p)
    out = []
    for year in sorted(by_year):
        pts = by_year[year]
        n = len(pts)
        mean = math.fsum(p.mean for p in pts) / n
        se = math.sqrt(math.fsum(p.std_error**2 for p in pts)) / n
        out.append(TimeseriesPoint(year, mean, se, n))
    return out


def annual_aggregate(points: Iterable[tuple[int, float]], how: str = "median") -> tuple[list[int], list[float]]:
    """Bin values by year and reduce each bin with the median (default) or mean."""
    reducer = {"median": np.median, "mean": np.mean}[how]
    by_year: dict[int, list[float]] = defaultdict(list)
    for year, value in points:
        by_year[int(year)].append(float(value))
    years = sorted(by_year)
    return years, [float(reducer(by_year[y])) for y in years]


def mann_kendall(series: Sequence[float]) -> TrendTestResult:
    """Two-sided Mann-Kendall trend test, normal approximation with tie correction."""
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < 4:
        raise ValueError("Mann-Kendall needs at least 4 values")
    i, j = np.triu_indices(n, k=1)
    s = int(np.sign(x[j] - x[i]).sum())
    _, tie_counts = np.unique(x, return_counts=True)
    ties = tie_counts[tie_counts > 1].astype(float)
    var_s = (n * (n - 1) * (2 * n + 5) - np.sum(ties * (ties - 1) * (2 * ties + 5))) / 18.0
    if s > 0:
        z = (s - 1) / math.sqrt(var_s)
    elif s < 0:
        z = (s + 1) / math.sqrt(var_s)
    else:
        z = 0.0
    p = float(min(1.0, 2.0 * stats.norm.sf(abs(z))))
    return TrendTestResult("mann_kendall", float(z), p, p < 0.05, {"S": s, "var_S": float(var_s), "n": n})


def _kpss_pvalue(eta: float) -> float:
    pvals = [p for p, _ in KPSS_CRITICAL_VALUES]
    crit = [c for _, c in KPSS_CRITICAL_VALUES]
    return float(np.interp(eta, crit, pvals))  # clamps to [0.01, 0.1] outside the table


def kpss_level(series: Sequence[float], nlags: int | None = None) -> TrendTestResult:
    """KPSS test of level stationarity.

    Long-run variance uses Newey-West with Bartlett weights and lag
    truncation floor(12 (n/100)^(1/4)). P-values are linearly interpolated
    in the critical-value table and therefore clamped to [0.01, 0.1].
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < 10:
        raise ValueError("KPSS needs at least 10 values")
    e = x - x.mean()
    if np.ptp(x) == 0:
        raise DegenerateInputError("KPSS statistic undefined for a constant series")
    if nlags is None:
        nlags = int(math.floor(12.0 * (n / 100.0) ** 0.25))
    nlags = min(nlags, n - 1)
    partial = np.cumsum(e)
    lrv = float(np.dot(e, e))
    for s in range(1, nlags + 1):
        lrv += 2.0 * (1.0 - s / (nlags + 1.0)) * float(np.dot(e[s:], e[:-s]))
    lrv /= n
    eta = float(np.dot(partial, partial) / (n**2 * lrv))
    p = _kpss_pvalue(eta)
    return TrendTestResult("kpss", eta, p, p < 0.05, {"lags": nlags, "long_run_variance": lrv, "n": n})


def pearson(x: Sequence[float], y: Sequence[float]) -> TrendTestResult:
    """Pearson correlation with a two-sided Student-t p-value (n - 2 dof)."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("x and y must be 1-d and of equal length")
    n = a.size
    if n < 3:
        raise ValueError("Pearson correlation needs at least 3 pairs")
    da, db = a - a.mean(), b - b.mean()
    sxx, syy = float(np.dot(da, da)), float(np.dot(db, db))
    if sxx == 0 or syy == 0:
        raise ValueError("Pearson correlation undefined for a zero-variance input")
    r = float(np.dot(da, db) / math.sqrt(sxx * syy))
    r = max(-1.0, min(1.0, r))
    dof = n - 2
    if abs(r) >= 1.0:
        t, p = None, 0.0  # t is unbounded for a perfect fit
    else:
        t = r * math.sqrt(dof / (1.0 - r * r))
        p = float(min(1.0, 2.0 * stats.t.sf(abs(t), dof)))
    return TrendTestResult("pearson", r, p, p < 0.05, {"t": t, "dof": dof, "n": n})


def anova_oneway(groups: Sequence[Sequence[float]]) -> TrendTestResult:
    """One-way ANOVA F test across groups."""
    arrs = [np.asarray(g, dtype=float) for g in groups]
    k = len(arrs)
    if k < 2:
        raise ValueError("ANOVA needs at least 2 groups")
    if any(a.size < 2 for a in arrs):
        raise ValueError("every ANOVA group needs at least 2 values")
    total_n = sum(a.size for a in arrs)
    grand = np.concatenate(arrs).mean()
    ss_between = math.fsum(a.size * (a.mean() - grand) ** 2 for a in arrs)
    ss_within = math.fsum(float(np.sum((a - a.mean()) ** 2)) for a in arrs)
    df_b, df_w = k - 1, total_n - k
    if ss_within == 0:
        raise DegenerateInputError("ANOVA undefined: every group has zero variance")
    f = (ss_between / df_b) / (ss_within / df_w)
    p = float(stats.f.sf(f, df_b, df_w)) if f > 0 else 1.0
    return TrendTestResult("anova", float(f), p, p < 0.05,
                           {"df_between": df_b, "df_within": df_w, "ss_between": ss_between, "ss_within": ss_within})


def kde_scott(values: Sequence[float], n_points: int = 256) -> list[tuple[float, float]]:
    """Gaussian KDE with Scott's bandwidth, evaluated on the data range only."""
    v = np.asarray(values, dtype=float)
    if v.size < 2 or np.ptp(v) == 0:
        raise ValueError("KDE needs at least 2 distinct values")
    h = v.std(ddof=1) * v.size ** (-0.2)
    grid = np.linspace(v.min(), v.max(), n_points)
    z = (grid[:, None] - v[None, :]) / h
    dens = np.exp(-0.5 * z**2).sum(axis=1) / (v.size * h * math.sqrt(2.0 * math.pi))
    return list(zip(grid.tolist(), dens.tolist()))
