"""Ground-truth machinery: exhaustive enumeration, exact membership bounds,
and a discrete-event single-server queue simulator."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BudgetExceededError, DomainError, InfeasibleInstanceError
from .evaluation import (
    MaximinContext,
    fuzzy_capacity_feasible,
    fuzzy_objective,
    spread_components,
)
from .model import Instance, Solution, _facility_arrays

DEFAULT_ENUM_BUDGET = 10**6

Fitness = Callable[[Solution], float]


@dataclass
class EnumerationResult:
    best: Solution
    best_value: float
    evaluated_count: int
    table: Optional[dict[frozenset, float]] = None


def _check_budget(instance: Instance, budget: int) -> int:
    count = math.comb(instance.n, instance.m_servers)
    if count > budget:
        raise BudgetExceededError(
            f"enumeration needs {count} subsets, budget is {budget}"
        )
    return count


def enumerate_optimum(
    instance: Instance,
    eval_fn: Fitness,
    budget: int = DEFAULT_ENUM_BUDGET,
    keep_table: bool = False,
) -> EnumerationResult:
    """Evaluate every m-subset; ties break to the lexicographically smallest
    sorted index set (combinations are visited in that order)."""
    count = _check_budget(instance, budget)
    best_subset = None
    best_value = -math.inf
    table = {} if keep_table else None
    for combo in itertools.combinations(range(1, instance.n + 1), instance.m_servers):
        value = eval_fn(Solution(combo))
        if table is not None:
            table[frozenset(combo)] = value
        if value > best_value:
            best_subset, best_value = combo, value
    return EnumerationResult(
        best=Solution(best_subset),
        best_value=best_value,
        evaluated_count=count,
        table=table,
    )


def exact_bounds(instance: Instance, budget: int = DEFAULT_ENUM_BUDGET) -> MaximinContext:
    """Exact (min, max) of each spread component over all feasible subsets."""
    _check_budget(instance, budget)
    lows = [math.inf] * 3
    highs = [-math.inf] * 3
    any_feasible = False
    for combo in itertools.combinations(range(1, instance.n + 1), instance.m_servers):
        solution = Solution(combo)
        feasible, _ = fuzzy_capacity_feasible(instance, solution)
        if not feasible:
            continue
        z = fuzzy_objective(instance, solution)
        if z is None:
            continue
        any_feasible = True
        comps = spread_components(z)
        for k, v in enumerate((comps.z1, comps.z2, comps.z3)):
            lows[k] = min(lows[k], v)
            highs[k] = max(highs[k], v)
    if not any_feasible:
        raise InfeasibleInstanceError("no feasible facility subset exists")
    return MaximinContext(
        z1_bounds=(lows[0], highs[0]),
        z2_bounds=(lows[1], highs[1]),
        z3_bounds=(lows[2], highs[2]),
        provenance="oracle-exact",
    )


@dataclass
class SimulationResult:
    p0: float  # time-averaged empty-system fraction
    lq: float  # time-averaged waiting-line length (excludes in-service customer)
    p0_se: float
    lq_se: float


def mm1_simulate(
    lam: float, mu: float, event_budget: int, seed: int = 0, batches: int = 20
) -> SimulationResult:
    """Event-driven M/M/1 simulation; standard errors come from batch means."""
    if mu <= 0 or lam <= 0:
        raise DomainError("rates must be positive")
    if lam >= mu:
        raise DomainError(f"unstable parameters: lam={lam} >= mu={mu}")
    if event_budget < 1:
        raise DomainError("event_budget must be positive")
    rng = random.Random(seed)
    now = 0.0
    in_system = 0
    next_arrival = rng.expovariate(lam)
    next_departure = math.inf
    batch_size = max(1, event_budget // batches)
    batch_idle: list[float] = []
    batch_area: list[float] = []
    batch_time: list[float] = []
    idle = area = span = 0.0
    events_in_batch = 0
    for _ in range(event_budget):
        t_next = min(next_arrival, next_departure)
        dt = t_next - now
        span += dt
        if in_system == 0:
            idle += dt
        else:
            area += (in_system - 1) * dt
        now = t_next
        if next_arrival <= next_departure:
            in_system += 1
            if in_system == 1:
                next_departure = now + rng.expovariate(mu)
            next_arrival = now + rng.expovariate(lam)
        else:
            in_system -= 1
            next_departure = now + rng.expovariate(mu) if in_system else math.inf
        events_in_batch += 1
        if events_in_batch >= batch_size:
            batch_idle.append(idle)
            batch_area.append(area)
            batch_time.append(span)
            idle = area = span = 0.0
            events_in_batch = 0
    if span > 0:
        batch_idle.append(idle)
        batch_area.append(area)
        batch_time.append(span)
    times = np.asarray(batch_time)
    p0s = np.asarray(batch_idle) / times
    lqs = np.asarray(batch_area) / times
    weights = times / times.sum()
    p0_hat = float(p0s @ weights)
    lq_hat = float(lqs @ weights)
    k = len(times)
    p0_se = float(p0s.std(ddof=1) / math.sqrt(k)) if k > 1 else math.nan
    lq_se = float(lqs.std(ddof=1) / math.sqrt(k)) if k > 1 else math.nan
    return SimulationResult(p0=p0_hat, lq=lq_hat, p0_se=p0_se, lq_se=lq_se)


def simulate_objective_slice(
    instance: Instance,
    solution: Solution,
    slc: str,
    event_budget: int,
    seed: int = 0,
) -> float:
    """Objective recomputed from per-facility simulated queue figures.

    Each open facility is simulated as an independent M/M/1 queue fed by its
    aggregated arrival rate; the analytic idle probability, occupancy and
    joining probability in the objective are replaced by their estimates.
    """
    from .fuzzy import SLICE_INDEX
    from .model import join_probability

    s = SLICE_INDEX[slc]
    open_idx, lam_bar, mu, benefit = _facility_arrays(instance, solution)
    total = 0.0
    for k in range(open_idx.size):
        result = mm1_simulate(lam_bar[k, s], mu[k, s], event_budget, seed=seed + k)
        rho_hat = 1.0 - result.p0
        join_hat = join_probability(result.lq, instance.mql)
        total += benefit[k, s] * ((1.0 - rho_hat) + join_hat * rho_hat)
    return total
