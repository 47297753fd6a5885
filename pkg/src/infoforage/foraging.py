"""Optimal information-foraging models.

Diet choice (which item types to consume), media-platform choice via the
merged Poisson reduction and Holling's disc equation, and the marginal value
theorem for platforms whose gain saturates with residence time.

All quantities are unit-agnostic: rescaling every utility and every time by
common factors rescales the rates and leaves the chosen diets unchanged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "InfoItem",
    "DietSolution",
    "PlatformParams",
    "ExponentialSaturating",
    "PowerDiminishing",
    "PatchType",
    "ResidenceSolution",
    "diet_rate",
    "generalized_rate",
    "optimal_diet",
    "greedy_diet",
    "rate_gradient_wrt_prevalence",
    "merge_platform",
    "holling_rate",
    "platform_included",
    "min_item_size",
    "mvt_solve",
    "patch_rate",
    "patches_as_prey",
]

# Relative slack used when comparing rates that are equal in exact arithmetic.
_EQ_RTOL = 1e-12


@dataclass(frozen=True)
class InfoItem:
    """An information type encountered at ``encounter_rate`` while searching."""

    encounter_rate: float
    utility: float
    handling_time: float

    def __post_init__(self):
        for name in ("encounter_rate", "utility", "handling_time"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.encounter_rate < 0:
            raise ValueError("encounter_rate must be >= 0")
        if self.utility < 0:
            raise ValueError("utility must be >= 0")
        if self.handling_time <= 0:
            raise ValueError("handling_time must be > 0")

    @property
    def profitability(self) -> float:
        return self.utility / self.handling_time


@dataclass(frozen=True)
class DietSolution:
    included: tuple[int, ...]
    rate: float
    threshold_trace: tuple[tuple[int, float], ...] = ()


@dataclass(frozen=True)
class PlatformParams:
    merged_rate: float
    mean_utility: float
    mean_handling: float

    def __post_init__(self):
        if self.merged_rate < 0 or self.mean_utility < 0:
            raise ValueError("merged_rate and mean_utility must be >= 0")
        if not self.mean_handling > 0:
            raise ValueError("mean_handling must be > 0")

    @property
    def mean_item_rate(self) -> float:
        return self.mean_utility / self.mean_handling


def _check_diet(items: Sequence[InfoItem], diet: Iterable[int]) -> list[int]:
    idx = sorted(set(int(i) for i in diet))
    for i in idx:
        if i < 0 or i >= len(items):
            raise IndexError(f"diet index {i} out of range for {len(items)} items")
    return idx


def diet_rate(items: Sequence[InfoItem], diet: Iterable[int]) -> float:
    """Expected utility per unit time when consuming exactly the types in ``diet``."""
    idx = _check_diet(items, diet)
    gain = math.fsum(items[i].encounter_rate * items[i].utility for i in idx)
    time = math.fsum(items[i].encounter_rate * items[i].handling_time for i in idx)
    return gain / (1.0 + time)


def generalized_rate(items: Sequence[InfoItem], probabilities) -> float:
    """Rate when type ``i`` is consumed with probability ``probabilities[i]`` on encounter."""
    p = np.asarray(probabilities, dtype=float)
    if p.shape != (len(items),):
        raise ValueError(f"expected {len(items)} probabilities, got shape {p.shape}")
    if np.any(p < 0) or np.any(p > 1) or np.any(np.isnan(p)):
        raise ValueError("probabilities must lie in [0, 1]")
    lam = np.array([it.encounter_rate for it in items])
    u = np.array([it.utility for it in items])
    t = np.array([it.handling_time for it in items])
    return float(np.dot(p * lam, u) / (1.0 + np.dot(p * lam, t)))


def greedy_diet(encounter_rates, utilities, handling_times) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Array form of :func:`optimal_diet`.

    Returns ``(included, order, rate_before)``: sorted included indices, the
    profitability ranking, and the rate of the diet built before each ranked
    candidate was considered.
    """
    lam = np.asarray(encounter_rates, dtype=float)
    u = np.asarray(utilities, dtype=float)
    t = np.asarray(handling_times, dtype=float)
    r = u / t
    order = np.argsort(-r, kind="stable")
    gain = np.cumsum((lam * u)[order])
    time = np.cumsum((lam * t)[order])
    before = np.concatenate(([0.0], gain[:-1] / (1.0 + time[:-1])))
    r_sorted = r[order]
    fails = (r_sorted <= 0) | (r_sorted < before)
    k = int(np.argmax(fails)) if fails.any() else r.size
    return np.sort(order[:k]), order, before


def optimal_diet(items: Sequence[InfoItem]) -> DietSolution:
    """Greedy prey-model diet.

    Types are ranked by profitability and added one at a time while the
    candidate's profitability is at least the rate of the diet built so far.
    Equal profitabilities keep input order. Zero-profitability types never
    raise the rate and are left out, so all-zero utilities give the empty diet.
    """
    if len(items) == 0:
        raise ValueError("optimal_diet needs at least one item")
    included, order, before = greedy_diet(
        [it.encounter_rate for it in items],
        [it.utility for it in items],
        [it.handling_time for it in items],
    )
    inc = [int(i) for i in included]
    trace = tuple((int(order[j]), float(before[j])) for j in range(min(len(inc) + 1, len(items))))
    return DietSolution(tuple(inc), diet_rate(items, inc), trace)


def rate_gradient_wrt_prevalence(items: Sequence[InfoItem], diet: Iterable[int], index: int) -> float:
    """Analytic derivative of :func:`diet_rate` with respect to ``items[index].encounter_rate``."""
    idx = _check_diet(items, diet)
    if index not in idx:
        raise ValueError(f"item {index} is not in the diet")
    gain = math.fsum(items[i].encounter_rate * items[i].utility for i in idx)
    denom = 1.0 + math.fsum(items[i].encounter_rate * items[i].handling_time for i in idx)
    it = items[index]
    return (it.utility * denom - it.handling_time * gain) / denom**2


def merge_platform(items: Sequence[InfoItem], diet: Iterable[int]) -> PlatformParams:
    """Collapse the diet's independent encounter processes into one merged process."""
    idx = _check_diet(items, diet)
    if not idx:
        raise ValueError("cannot merge an empty diet")
    lam = math.fsum(items[i].encounter_rate for i in idx)
    if lam == 0:
        raise ValueError("diet has zero total encounter rate; means are undefined")
    u_bar = math.fsum(items[i].encounter_rate * items[i].utility for i in idx) / lam
    t_bar = math.fsum(items[i].encounter_rate * items[i].handling_time for i in idx) / lam
    return PlatformParams(lam, u_bar, t_bar)


def holling_rate(p: PlatformParams) -> float:
    return p.merged_rate * p.mean_utility / (1.0 + p.merged_rate * p.mean_handling)


def platform_included(p: PlatformParams, env_rate: float) -> bool:
    """True when the platform's rate is at least ``env_rate`` (ties included).

    Uses the reciprocal form 1/(lambda*u) + 1/r <= 1/R_env, with a 1e-12
    relative slack so that exact-arithmetic equality survives rounding.
    """
    if not env_rate > 0:
        raise ValueError("env_rate must be > 0")
    size_rate = p.merged_rate * p.mean_utility
    if size_rate == 0 or p.mean_item_rate == 0:
        return False
    lhs = 1.0 / size_rate + 1.0 / p.mean_item_rate
    return lhs <= (1.0 / env_rate) * (1.0 + _EQ_RTOL)


def min_item_size(merged_rate: float, mean_item_rate: float, env_rate: float) -> float | None:
    """Smallest mean item utility that gets a platform into the diet.

    Returns ``None`` when ``mean_item_rate <= env_rate``: no item size is
    large enough. As ``mean_item_rate`` grows the result falls towards
    ``env_rate / merged_rate``.
    """
    for name, v in (("merged_rate", merged_rate), ("mean_item_rate", mean_item_rate), ("env_rate", env_rate)):
        if not v > 0:
            raise ValueError(f"{name} must be > 0, got {v!r}")
    slack = 1.0 / env_rate - 1.0 / mean_item_rate
    if slack <= 0:
        return None
    return 1.0 / (merged_rate * slack)


# --------------------------------------------------------------------------
# Platforms with diminishing returns


@dataclass(frozen=True)
class ExponentialSaturating:
    """g(t) = total_utility * (1 - exp(-t / timescale))."""

    total_utility: float
    timescale: float

    def __post_init__(self):
        if self.total_utility < 0 or not self.timescale > 0:
            raise ValueError("need total_utility >= 0 and timescale > 0")

    def gain(self, t: float) -> float:
        return self.total_utility * -math.expm1(-t / self.timescale)

    def marginal(self, t: float) -> float:
        return self.total_utility / self.timescale * math.exp(-t / self.timescale)

    def initial_marginal(self) -> float:
        return self.total_utility / self.timescale

    def inverse_marginal(self, rate: float) -> float:
        top = self.initial_marginal()
        if rate >= top:
            return 0.0
        return self.timescale * math.log(top / rate)

    def typical_time(self) -> float:
        return self.timescale


@dataclass(frozen=True)
class PowerDiminishing:
    """g(t) = coefficient * t**exponent with 0 < exponent < 1."""

    coefficient: float
    exponent: float

    def __post_init__(self):
        if not self.coefficient > 0:
            raise ValueError("coefficient must be > 0")
        if not 0 < self.exponent < 1:
            raise ValueError("exponent must lie in (0, 1)")

    def gain(self, t: float) -> float:
        return self.coefficient * t**self.exponent if t > 0 else 0.0

    def marginal(self, t: float) -> float:
        if t <= 0:
            return math.inf
        return self.coefficient * self.exponent * t ** (self.exponent - 1.0)

    def initial_marginal(self) -> float:
        return math.inf

    def inverse_marginal(self, rate: float) -> float:
        return (rate / (self.coefficient * self.exponent)) ** (1.0 / (self.exponent - 1.0))

    def typical_time(self) -> float:
        return 1.0


Gain = Union[ExponentialSaturating, PowerDiminishing]


@dataclass(frozen=True)
class PatchType:
    encounter_rate: float
    gain: Gain

    def __post_init__(self):
        if not (self.encounter_rate >= 0 and math.isfinite(self.encounter_rate)):
            raise ValueError("encounter_rate must be finite and >= 0")

    @property
    def max_profitability(self) -> float:
        """sup over t of g(t)/t; for concave gains this is the limit g'(0+)."""
        return self.gain.initial_marginal()


@dataclass(frozen=True)
class ResidenceSolution:
    residence_times: tuple[float, ...]
    env_rate: float
    iterations: int
    converged: bool
    residuals: tuple[float, ...] = field(default=())


def patch_rate(patches: Sequence[PatchType], residence_times) -> float:
    """Long-run rate when patch ``k`` is exploited for ``residence_times[k]``."""
    gain = math.fsum(p.encounter_rate * p.gain.gain(t) for p, t in zip(patches, residence_times))
    time = math.fsum(p.encounter_rate * t for p, t in zip(patches, residence_times))
    return gain / (1.0 + time)


def _leave_times(patches: Sequence[PatchType], rate: float) -> list[float]:
    return [p.gain.inverse_marginal(rate) if p.gain.initial_marginal() > rate else 0.0 for p in patches]


def mvt_solve(
    patches: Sequence[PatchType],
    damping: float = 0.5,
    tol: float = 1e-9,
    max_iter: int = 1000,
    residual_tol: float = 1e-6,
) -> ResidenceSolution:
    """Residence times satisfying the marginal value theorem.

    Damped fixed-point iteration on the environment rate R: each patch is
    left when its marginal gain falls to R (or skipped when it never exceeds
    R), then R is recomputed from those times. The reported ``env_rate`` is
    the rate actually achieved by the returned times. A run that exhausts
    ``max_iter`` or leaves residuals above ``residual_tol`` comes back with
    ``converged=False``.
    """
    if len(patches) == 0:
        raise ValueError("mvt_solve needs at least one patch")
    rate = patch_rate(patches, [p.gain.typical_time() for p in patches])
    if rate <= 0:
        # Every patch is worthless (no encounters or no gain).
        zeros = (0.0,) * len(patches)
        return ResidenceSolution(zeros, 0.0, 0, True, zeros)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        achieved = patch_rate(patches, _leave_times(patches, rate))
        new_rate = (1.0 - damping) * rate + damping * achieved
        step = abs(new_rate - rate)
        rate = new_rate
        if step < tol:
            converged = True
            break

    times = _leave_times(patches, rate)
    env_rate = patch_rate(patches, times)
    residuals = tuple(abs(p.gain.marginal(t) - env_rate) if t > 0 else 0.0 for p, t in zip(patches, times))
    if any(r > residual_tol for r in residuals):
        converged = False
    return ResidenceSolution(tuple(times), env_rate, it, converged, residuals)


def patches_as_prey(patches: Sequence[PatchType], **solver_kw) -> tuple[tuple[int, ...], ResidenceSolution]:
    """Greedy platform selection ranked by maximum profitability.

    Patches are added in ranked order and the marginal value theorem is
    re-solved over the included set each time. Selection stops at the first
    patch that lowers the environment rate or whose residence time solves to
    zero; a step that would push an earlier patch's time to zero also stops
    the loop. The returned solution covers the full input list, with zero
    time on unselected patches.
    """
    if len(patches) == 0:
        raise ValueError("patches_as_prey needs at least one patch")
    order = sorted(range(len(patches)), key=lambda k: -patches[k].max_profitability)
    selected = [order[0]]
    best = mvt_solve([patches[order[0]]], **solver_kw)
    for k in order[1:]:
        trial_set = selected + [k]
        trial = mvt_solve([patches[j] for j in trial_set], **solver_kw)
        if trial.env_rate < best.env_rate or any(t <= 0 for t in trial.residence_times):
            break
        selected, best = trial_set, trial

    times = [0.0] * len(patches)
    for j, t in zip(selected, best.residence_times):
        times[j] = t
    residuals = [0.0] * len(patches)
    for j, r in zip(selected, best.residuals):
        residuals[j] = r
    full = ResidenceSolution(tuple(times), best.env_rate, best.iterations, best.converged, tuple(residuals))
    return tuple(sorted(selected)), full
