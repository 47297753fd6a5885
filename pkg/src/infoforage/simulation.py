"""Synthetic experiments on the foraging model: the diet-selectivity sweep and
the minimum-viable-item-size frontier."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .foraging import InfoItem, diet_rate, greedy_diet, min_item_size

RNG_NAME = "numpy.PCG64(SeedSequence([seed, grid_index]))"


@dataclass(frozen=True)
class DietSweepConfig:
    prevalence_grid: tuple[float, ...] = tuple(np.geomspace(50.0, 5000.0, 10).tolist())
    items_per_unit_prevalence: float = 10.0
    rate_low: float = 20.0
    rate_high: float = 30.0
    removal_prob: float = 0.8
    handling_time: float = 1.0
    base_encounter_rate: float = 0.01
    seed: int = 0

    def __post_init__(self):
        grid = tuple(float(v) for v in self.prevalence_grid)
        object.__setattr__(self, "prevalence_grid", grid)
        if not grid:
            raise ValueError("prevalence_grid is empty")
        if any(v <= 0 for v in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("prevalence_grid must be positive and strictly increasing")
        if not self.rate_low < self.rate_high:
            raise ValueError("rate_low must be below rate_high")
        if not 0 <= self.removal_prob <= 1:
            raise ValueError("removal_prob must lie in [0, 1]")
        if not (self.handling_time > 0 and self.items_per_unit_prevalence > 0 and self.base_encounter_rate > 0):
            raise ValueError("handling_time, items_per_unit_prevalence and base_encounter_rate must be > 0")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SweepPoint:
    prevalence: float
    consumed: tuple[float, ...]
    survived_ignored: tuple[float, ...]
    diet_rate: float
    diet_min_profitability: float

    @property
    def mean_consumed(self) -> float:
        return float(np.mean(self.consumed)) if self.consumed else math.nan


def point_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one grid point, so serial and parallel runs agree."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(index)])))


def sweep_point(config: DietSweepConfig, index: int) -> SweepPoint:
    prevalence = config.prevalence_grid[index]
    rng = point_rng(config.seed, index)
    count = int(round(config.items_per_unit_prevalence * prevalence))
    if count == 0:
        return SweepPoint(prevalence, (), (), 0.0, math.nan)
    rates = rng.uniform(config.rate_low, config.rate_high, size=count)
    keep_ignored = rng.random(count) >= config.removal_prob
    t = np.full(count, config.handling_time)
    lam = np.full(count, config.base_encounter_rate)
    included, _, _ = greedy_diet(lam, rates * t, t)
    in_diet = np.zeros(count, dtype=bool)
    in_diet[included] = True
    consumed = tuple(float(r) for r in rates[in_diet])
    ignored = tuple(float(r) for r in rates[~in_diet & keep_ignored])
    rate = math.fsum(lam[in_diet] * rates[in_diet] * t[in_diet]) / (1.0 + math.fsum(lam[in_diet] * t[in_diet]))
    return SweepPoint(
        prevalence=prevalence,
        consumed=consumed,
        survived_ignored=ignored,
        diet_rate=rate,
        diet_min_profitability=min(consumed) if consumed else math.nan,
    )


def diet_sweep(config: DietSweepConfig) -> list[SweepPoint]:
    """Draw items at each prevalence level and record which the optimal diet keeps.

    The item count at each level is ``items_per_unit_prevalence * prevalence``
    and every item has the same encounter rate, so total prevalence grows with
    the count. Ignored items survive with probability ``1 - removal_prob``.
    """
    return [sweep_point(config, i) for i in range(len(config.prevalence_grid))]


def recompute_rate(point: SweepPoint, config: DietSweepConfig) -> float:
    """Diet rate rebuilt from a point's consumed profitabilities."""
    t = config.handling_time
    items = [InfoItem(config.base_encounter_rate, r * t, t) for r in point.consumed]
    return diet_rate(items, range(len(items)))


@dataclass(frozen=True)
class Frontier:
    merged_rates: tuple[float, ...]
    mean_item_rates: tuple[float, ...]
    env_rate: float
    u_min: np.ndarray = field(repr=False)  # shape (len(merged_rates), len(mean_item_rates)); NaN = infeasible

    @property
    def feasible(self) -> np.ndarray:
        return ~np.isnan(self.u_min)

    def rows(self):
        """Yield ``(merged_rate, mean_item_rate, u_min or None)``."""
        for i, lam in enumerate(self.merged_rates):
            for j, rbar in enumerate(self.mean_item_rates):
                v = self.u_min[i, j]
                yield lam, rbar, (None if math.isnan(v) else float(v))


DEFAULT_MERGED_RATES = tuple(np.geomspace(1.0, 1000.0, 13).tolist())
DEFAULT_MEAN_ITEM_RATES = (0.25, 0.5, 0.75, 1.0, 2.0, 5.0, 10.0, 100.0, 1e9)
DEFAULT_ENV_RATE = 0.5


def viability_frontier(
    merged_rate_grid: Sequence[float] = DEFAULT_MERGED_RATES,
    mean_item_rate_grid: Sequence[float] = DEFAULT_MEAN_ITEM_RATES,
    env_rate: float = DEFAULT_ENV_RATE,
) -> Frontier:
    """Minimum mean item utility for platform inclusion over a (prevalence, item-rate) grid."""
    lams = tuple(float(v) for v in merged_rate_grid)
    rbars = tuple(float(v) for v in mean_item_rate_grid)
    if any(v <= 0 for v in lams + rbars) or not env_rate > 0:
        raise ValueError("grids and env_rate must be positive")
    out = np.full((len(lams), len(rbars)), np.nan)
    for i, lam in enumerate(lams):
        for j, rbar in enumerate(rbars):
            u = min_item_size(lam, rbar, env_rate)
            if u is not None:
                out[i, j] = u
    return Frontier(lams, rbars, float(env_rate), out)
