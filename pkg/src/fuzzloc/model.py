"""Problem data types and the crisp queuing/allocation/objective formulas.

Node indices are 1-based everywhere in the public API; numpy arrays are
indexed internally with ``index - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import DomainError
from .fuzzy import SLICE_INDEX, SLICES, TriFuzzy


def _fuzzy_rows(values, n: int, what: str) -> np.ndarray:
    arr = np.asarray(
        [v.as_tuple() if isinstance(v, TriFuzzy) else tuple(v) for v in values],
        dtype=float,
    )
    if arr.shape != (n, 3):
        raise DomainError(f"{what} must be {n} fuzzy triples, got shape {arr.shape}")
    if not (np.all(arr[:, 0] <= arr[:, 1]) and np.all(arr[:, 1] <= arr[:, 2])):
        bad = int(np.argmax(~((arr[:, 0] <= arr[:, 1]) & (arr[:, 1] <= arr[:, 2])))) + 1
        raise DomainError(f"{what} triple at node {bad} is not ordered lo <= mid <= hi")
    return arr


@dataclass(frozen=True)
class Instance:
    """One problem datum: network, fuzzy rates, and model parameters.

    ``demand`` and ``service`` are (n, 3) arrays of [lo, mid, hi] rows;
    ``distance`` is a symmetric zero-diagonal (n, n) matrix.
    """

    n: int
    m_servers: int
    distance: np.ndarray
    demand: np.ndarray
    service: np.ndarray
    idle_min: TriFuzzy
    mql: float
    gamma: float = 0.5
    logit_sensitivity: float = 0.5
    benefit_weight: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        n = self.n
        if n < 2:
            raise DomainError("instance needs at least two nodes")
        if not (1 <= self.m_servers < n):
            raise DomainError(f"m_servers must satisfy 1 <= M < n, got {self.m_servers}")
        dist = np.asarray(self.distance, dtype=float)
        if dist.shape != (n, n):
            raise DomainError(f"distance must be {n}x{n}, got {dist.shape}")
        if np.any(np.diag(dist) != 0):
            raise DomainError("distance diagonal must be zero")
        if not np.array_equal(dist, dist.T):
            raise DomainError("distance matrix must be symmetric")
        off = dist[~np.eye(n, dtype=bool)]
        if np.any(off <= 0):
            raise DomainError("off-diagonal distances must be positive")
        demand = _fuzzy_rows(self.demand, n, "demand")
        service = _fuzzy_rows(self.service, n, "service")
        if np.any(demand < 0) or np.any(service[:, 0] <= 0):
            raise DomainError("demand must be nonnegative and service rates positive")
        if not (0 <= self.idle_min.lo and self.idle_min.hi <= 1):
            raise DomainError("idle_min must lie in [0, 1]")
        if self.mql <= 0:
            raise DomainError("mql must be positive")
        if not (0 <= self.gamma <= 1):
            raise DomainError("gamma must lie in [0, 1]")
        if self.logit_sensitivity <= 0:
            raise DomainError("logit_sensitivity must be positive")
        weight = self.benefit_weight
        if weight is not None:
            weight = np.asarray(weight, dtype=float)
            if weight.shape != (n, n):
                raise DomainError(f"benefit_weight must be {n}x{n}, got {weight.shape}")
            if np.any(weight < 0):
                raise DomainError("benefit weights must be nonnegative")
            weight.setflags(write=False)
        for name, arr in (("distance", dist), ("demand", demand), ("service", service)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "benefit_weight", weight)

    def demand_fuzzy(self, node: int) -> TriFuzzy:
        return TriFuzzy(*self.demand[node - 1])

    def service_fuzzy(self, node: int) -> TriFuzzy:
        return TriFuzzy(*self.service[node - 1])

    def check_solution(self, solution: "Solution") -> None:
        if len(solution.open) != self.m_servers:
            raise DomainError(
                f"solution opens {len(solution.open)} facilities, expected {self.m_servers}"
            )
        if any(not (1 <= j <= self.n) for j in solution.open):
            raise DomainError(f"solution indices out of range 1..{self.n}: {solution}")


@dataclass(frozen=True)
class Solution:
    """A set of exactly M distinct open-facility node indices (1-based)."""

    open: frozenset[int] = field()

    def __init__(self, open: Iterable[int]):
        genes = frozenset(int(j) for j in open)
        if not genes:
            raise DomainError("solution must open at least one facility")
        object.__setattr__(self, "open", genes)

    def sorted(self) -> list[int]:
        return sorted(self.open)

    def __str__(self) -> str:
        return "{" + ",".join(str(j) for j in self.sorted()) + "}"


@dataclass(frozen=True)
class QueueMetrics:
    """Per-facility queue figures; slice entries are None when unstable."""

    facility: int
    agg_demand: TriFuzzy
    occupancy: TriFuzzy
    idle_prob: tuple  # per slice: float or None
    queue_length: tuple
    join_prob: tuple


def _open_indices(instance: Instance, solution: Solution) -> np.ndarray:
    # Size is deliberately not checked: the GA's greedy drop evaluates
    # oversized intermediate subsets through the same fitness interface.
    if any(not (1 <= j <= instance.n) for j in solution.open):
        raise DomainError(f"solution indices out of range 1..{instance.n}: {solution}")
    return np.asarray(solution.sorted(), dtype=int) - 1


def logit_allocation(instance: Instance, solution: Solution) -> np.ndarray:
    """Share of each node's demand captured by each open facility.

    Row i holds exp(-a*d_ij) / sum_k exp(-a*d_ik) over open facilities k and
    zeros for closed ones; the exponent is shifted per row for stability.
    """
    open_idx = _open_indices(instance, solution)
    if open_idx.size == 0:
        raise DomainError("empty open set")
    scores = -instance.logit_sensitivity * instance.distance[:, open_idx]
    scores = scores - scores.max(axis=1, keepdims=True)
    weights = np.exp(scores)
    probs = weights / weights.sum(axis=1, keepdims=True)
    allocation = np.zeros((instance.n, instance.n))
    allocation[:, open_idx] = probs
    return allocation


def aggregate_demand(instance: Instance, allocation: np.ndarray) -> dict[int, TriFuzzy]:
    """Fuzzy arrival rate captured by each open facility (Poisson superposition)."""
    totals = allocation.T @ instance.demand  # (n, 3); zero rows for closed nodes
    out = {}
    for j in range(instance.n):
        if np.any(allocation[:, j] > 0):
            out[j + 1] = TriFuzzy(*totals[j])
    return out


def mm1_metrics(lam: float, mu: float):
    """Analytic single-server idle probability and waiting-line length.

    Returns (P0, Lq) for a stable queue and None when lam >= mu.
    """
    if mu <= 0:
        raise DomainError(f"service rate must be positive, got {mu}")
    if lam < 0:
        raise DomainError(f"arrival rate must be nonnegative, got {lam}")
    if lam >= mu:
        return None
    p0 = 1.0 - lam / mu
    lq = lam * lam / (mu * (mu - lam))
    return (p0, lq)


def join_probability(lq: float, mql: float) -> float:
    """Linear balking ramp: 1 at an empty queue, 0 at or beyond MQL."""
    if mql <= 0:
        raise DomainError(f"mql must be positive, got {mql}")
    if lq < 0:
        raise DomainError(f"queue length must be nonnegative, got {lq}")
    return min(max(1.0 - lq / mql, 0.0), 1.0)


def _facility_arrays(instance: Instance, solution: Solution):
    """(open_idx, lam_bar, mu, benefit) with lam_bar/mu/benefit of shape (k, 3).

    benefit[j, s] = sum_i w_ij * lambda_i^s * p_ij, the weighted captured
    demand that the objective discounts by queue state.
    """
    open_idx = _open_indices(instance, solution)
    scores = -instance.logit_sensitivity * instance.distance[:, open_idx]
    scores = scores - scores.max(axis=1, keepdims=True)
    weights = np.exp(scores)
    probs = weights / weights.sum(axis=1, keepdims=True)  # (n, k)
    lam_bar = probs.T @ instance.demand  # (k, 3)
    mu = instance.service[open_idx]
    if instance.benefit_weight is None:
        benefit = lam_bar
    else:
        benefit = (instance.benefit_weight[:, open_idx] * probs).T @ instance.demand
    return open_idx, lam_bar, mu, benefit


def _slice_objective(lam_bar, mu, benefit, mql: float):
    """Objective value for one crisp slice, or None if any queue is unstable."""
    if np.any(lam_bar >= mu):
        return None
    rho = lam_bar / mu
    lq = lam_bar * lam_bar / (mu * (mu - lam_bar))
    join = np.clip(1.0 - lq / mql, 0.0, 1.0)
    return float(np.sum(benefit * ((1.0 - rho) + join * rho)))


def crisp_objective_slice(instance: Instance, solution: Solution, slc: str):
    """Benefit objective with all fuzzy data pinned at one slice.

    Returns None (unstable marker) when some open facility has lam_bar >= mu.
    """
    s = SLICE_INDEX[slc]
    _, lam_bar, mu, benefit = _facility_arrays(instance, solution)
    return _slice_objective(lam_bar[:, s], mu[:, s], benefit[:, s], instance.mql)


def capacity_feasible_slice(instance: Instance, solution: Solution, slc: str):
    """Check lam_bar_j <= mu_j * (1 - beta) at one slice; boundary inclusive."""
    s = SLICE_INDEX[slc]
    open_idx, lam_bar, mu, _ = _facility_arrays(instance, solution)
    cap = mu[:, s] * (1.0 - instance.idle_min.component(slc))
    excess = lam_bar[:, s] - cap
    violations = [
        (int(open_idx[k]) + 1, float(excess[k]))
        for k in range(open_idx.size)
        if excess[k] > 0
    ]
    return (not violations, violations)


def queue_metrics(instance: Instance, solution: Solution) -> dict[int, QueueMetrics]:
    """Inspection view of per-facility fuzzy demand, occupancy and queue state."""
    from .fuzzy import tri_combine

    open_idx, lam_bar, mu, _ = _facility_arrays(instance, solution)
    out = {}
    for k, j0 in enumerate(open_idx):
        agg = TriFuzzy(*lam_bar[k])
        srv = TriFuzzy(*mu[k])
        occ = tri_combine(agg, srv, "div")
        p0, lq, join = [], [], []
        for s in range(3):
            metrics = mm1_metrics(lam_bar[k, s], mu[k, s])
            if metrics is None:
                p0.append(None), lq.append(None), join.append(None)
            else:
                p0.append(metrics[0])
                lq.append(metrics[1])
                join.append(join_probability(metrics[1], instance.mql))
        out[int(j0) + 1] = QueueMetrics(
            facility=int(j0) + 1,
            agg_demand=agg,
            occupancy=occ,
            idle_prob=tuple(p0),
            queue_length=tuple(lq),
            join_prob=tuple(join),
        )
    return out
