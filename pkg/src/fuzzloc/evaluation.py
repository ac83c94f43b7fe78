"""Fuzzification of the objective and constraints, and the maximin fitness.

The fuzzy objective is decomposed into three crisp components (left spread,
center, right spread); each is mapped through a linear membership function
calibrated by per-component bounds, and the fitness is the minimum of the
three memberships. Infeasible solutions get a negative penalty so that every
feasible solution dominates every infeasible one.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .fuzzy import TriFuzzy
from .model import Instance, Solution, _facility_arrays, _slice_objective

_DEGENERATE_EPS = 1e-12


@dataclass(frozen=True)
class SpreadComponents:
    """Crisp decomposition of a fuzzy objective value.

    z1 = mid - lo (minimized), z2 = mid (maximized), z3 = hi - mid (maximized).
    """

    z1: float
    z2: float
    z3: float

    def value(self, name: str) -> float:
        return getattr(self, name)


@dataclass(frozen=True)
class MaximinContext:
    """Per-component (min, max) bounds calibrating the membership functions."""

    z1_bounds: tuple[float, float]
    z2_bounds: tuple[float, float]
    z3_bounds: tuple[float, float]
    provenance: str  # "metaheuristic-estimated" or "oracle-exact"

    def bounds(self, name: str) -> tuple[float, float]:
        return getattr(self, f"{name}_bounds")

    def is_degenerate(self, name: str) -> bool:
        low, high = self.bounds(name)
        if not (math.isfinite(low) and math.isfinite(high)):
            return True
        return high - low <= _DEGENERATE_EPS

    def to_dict(self) -> dict:
        return {
            "z1_bounds": list(self.z1_bounds),
            "z2_bounds": list(self.z2_bounds),
            "z3_bounds": list(self.z3_bounds),
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MaximinContext":
        return cls(
            z1_bounds=tuple(data["z1_bounds"]),
            z2_bounds=tuple(data["z2_bounds"]),
            z3_bounds=tuple(data["z3_bounds"]),
            provenance=data["provenance"],
        )

    @property
    def bounds_id(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def fuzzy_objective(instance: Instance, solution: Solution) -> Optional[TriFuzzy]:
    """Objective evaluated at all three slices, sorted into a fuzzy triple.

    Returns None when any slice has an unstable queue.
    """
    _, lam_bar, mu, benefit = _facility_arrays(instance, solution)
    values = []
    for s in range(3):
        v = _slice_objective(lam_bar[:, s], mu[:, s], benefit[:, s], instance.mql)
        if v is None:
            return None
        values.append(v)
    lo, mid, hi = sorted(values)
    return TriFuzzy(lo, mid, hi)


def spread_components(z: TriFuzzy) -> SpreadComponents:
    return SpreadComponents(z1=z.mid - z.lo, z2=z.mid, z3=z.hi - z.mid)


def _membership(value: float, low: float, high: float, decreasing: bool) -> float:
    if not (math.isfinite(low) and math.isfinite(high)) or high - low <= _DEGENERATE_EPS:
        return 1.0  # degenerate bounds impose no discrimination
    if decreasing:
        raw = (high - value) / (high - low)
    else:
        raw = (value - low) / (high - low)
    return min(max(raw, 0.0), 1.0)


def membership_values(c: SpreadComponents, ctx: MaximinContext) -> tuple[float, float, float]:
    """Linear membership degrees of the three components; clamped to [0, 1]."""
    mu1 = _membership(c.z1, *ctx.z1_bounds, decreasing=True)
    mu2 = _membership(c.z2, *ctx.z2_bounds, decreasing=False)
    mu3 = _membership(c.z3, *ctx.z3_bounds, decreasing=False)
    return (mu1, mu2, mu3)


def maximin_level(mu1: float, mu2: float, mu3: float) -> float:
    """Satisfaction level: the bottleneck membership degree."""
    for mu in (mu1, mu2, mu3):
        if not (0.0 <= mu <= 1.0):
            raise DomainError(f"membership {mu} outside [0, 1]")
    return min(mu1, mu2, mu3)


def capacity_threshold(instance: Instance) -> float:
    """Crisp occupancy bound from the truth-degree transform of the constraint.

    With B = (1-beta.hi, 1-beta.mid, 1-beta.lo), the occupancy center must not
    exceed B.hi - gamma*(B.hi - B.mid); at gamma=1 this is the center-vs-center
    comparison.
    """
    b_mid = 1.0 - instance.idle_min.mid
    b_hi = 1.0 - instance.idle_min.lo
    return b_hi - instance.gamma * (b_hi - b_mid)


def _occupancy_mid(lam_bar: np.ndarray, mu: np.ndarray) -> np.ndarray:
    # The center of the fuzzy occupancy ratio. The division triple
    # (lo/hi', mid/mid', hi/lo') is already ascending for nonnegative
    # arrival and positive service rates, so no component sort is needed.
    return lam_bar[:, 1] / mu[:, 1]


def fuzzy_capacity_feasible(instance: Instance, solution: Solution):
    """Truth-degree capacity check; returns (feasible, {facility: margin})."""
    open_idx, lam_bar, mu, _ = _facility_arrays(instance, solution)
    margins_arr = capacity_threshold(instance) - _occupancy_mid(lam_bar, mu)
    margins = {int(j) + 1: float(m) for j, m in zip(open_idx, margins_arr)}
    return (bool(np.all(margins_arr >= 0)), margins)


def violation_total(instance: Instance, solution: Solution) -> float:
    """Relative constraint violation: capacity excess plus queue instability."""
    _, lam_bar, mu, _ = _facility_arrays(instance, solution)
    threshold = capacity_threshold(instance)
    excess = np.maximum(_occupancy_mid(lam_bar, mu) - threshold, 0.0)
    total = float(excess.sum() / threshold)
    total += float(np.sum(np.maximum(lam_bar - mu, 0.0) / mu))
    return total


def evaluate(instance: Instance, solution: Solution, ctx: MaximinContext) -> float:
    """Maximin fitness in [0, 1] for feasible solutions, negative otherwise."""
    _, lam_bar, mu, benefit = _facility_arrays(instance, solution)
    threshold = capacity_threshold(instance)
    occ = _occupancy_mid(lam_bar, mu)
    z = None
    if np.all(occ <= threshold):
        values = []
        for s in range(3):
            v = _slice_objective(lam_bar[:, s], mu[:, s], benefit[:, s], instance.mql)
            if v is None:
                break
            values.append(v)
        if len(values) == 3:
            z = TriFuzzy(*sorted(values))
    if z is None:
        total = float(np.sum(np.maximum(occ - threshold, 0.0)) / threshold)
        total += float(np.sum(np.maximum(lam_bar - mu, 0.0) / mu))
        return -(1.0 + total)
    return maximin_level(*membership_values(spread_components(z), ctx))


def component_value(instance: Instance, solution: Solution, name: str) -> Optional[float]:
    """One spread component of a feasible solution, or None if infeasible."""
    _, lam_bar, mu, benefit = _facility_arrays(instance, solution)
    if np.any(_occupancy_mid(lam_bar, mu) > capacity_threshold(instance)):
        return None
    values = []
    for s in range(3):
        v = _slice_objective(lam_bar[:, s], mu[:, s], benefit[:, s], instance.mql)
        if v is None:
            return None
        values.append(v)
    return spread_components(TriFuzzy(*sorted(values))).value(name)


def make_maximin_eval(instance: Instance, ctx: MaximinContext) -> Callable[[Solution], float]:
    """Fitness function used by the final solver run: evaluate with the
    instance and bound context bound in."""

    def fitness(solution: Solution) -> float:
        return evaluate(instance, solution, ctx)

    return fitness
