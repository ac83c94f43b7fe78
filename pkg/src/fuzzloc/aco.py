"""Ant colony optimizer: static desirability index, pheromone-guided subset
construction, and evaporation-plus-deposit updates with a pheromone cap."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError
from .model import Instance, Solution
from .reports import SolverReport

Fitness = Callable[[Solution], float]

TAU_MIN = 1e-6


@dataclass
class ACOConfig:
    evaporation_rate: float = 0.97  # trail persistence: fraction of tau kept
    max_pheromone: float = 200.0  # deposit scale and cap on accumulated tau
    population_coefficient: int = 2
    alpha_exp: float = 0.75  # pheromone exponent
    beta_exp: float = 0.75  # heuristic exponent
    seed: int = 0
    convergence_limit: Optional[int] = None  # default floor(n * sqrt(m))
    stagnation_limit: Optional[int] = None  # default convergence_limit ** 2

    def __post_init__(self) -> None:
        if not (0 < self.evaporation_rate < 1):
            raise DomainError("evaporation_rate must lie in (0, 1)")
        if self.max_pheromone <= 0:
            raise DomainError("max_pheromone must be positive")
        if self.alpha_exp <= 0 or self.beta_exp <= 0:
            raise DomainError("exponents must be positive")
        if self.population_coefficient < 1:
            raise DomainError("population_coefficient must be at least 1")


@dataclass
class PheromoneState:
    tau: np.ndarray  # one trail level per node

    @classmethod
    def initial(cls, n: int) -> "PheromoneState":
        return cls(tau=np.ones(n))


def heuristic_index(instance: Instance) -> np.ndarray:
    """Static node desirability: mid service rate over total distance to all
    other nodes, normalized to sum to 1."""
    raw = instance.service[:, 1] / instance.distance.sum(axis=1)
    return raw / raw.sum()


def ant_count(n: int, m: int, coefficient: int) -> int:
    if not (1 <= m < n):
        raise DomainError(f"need 1 <= m < n, got m={m}, n={n}")
    return coefficient * math.ceil(n / m)


def _selection_probabilities(
    state: PheromoneState, eta: np.ndarray, unchosen: np.ndarray, config: ACOConfig
) -> np.ndarray:
    weights = state.tau[unchosen] ** config.alpha_exp * eta[unchosen] ** config.beta_exp
    total = weights.sum()
    if not np.isfinite(total) or total <= 0:
        return np.full(unchosen.size, 1.0 / unchosen.size)
    return weights / total


def select_next(
    state: PheromoneState,
    eta: np.ndarray,
    chosen: set[int],
    config: ACOConfig,
    rng: np.random.Generator,
) -> int:
    """Sample one more node (1-based) proportionally to tau^a * eta^b."""
    n = state.tau.size
    unchosen = np.asarray([j for j in range(n) if (j + 1) not in chosen], dtype=int)
    if unchosen.size == 0:
        raise DomainError("no unchosen nodes left")
    probs = _selection_probabilities(state, eta, unchosen, config)
    return int(unchosen[rng.choice(unchosen.size, p=probs)]) + 1


def construct_solution(
    state: PheromoneState,
    eta: np.ndarray,
    instance: Instance,
    config: ACOConfig,
    rng: np.random.Generator,
) -> Solution:
    """Draw m_servers distinct nodes, each proportionally to tau^a * eta^b.

    Sampled with the Gumbel top-k trick, which draws from the same
    distribution as repeated select_next calls (sequential proportional
    sampling without replacement) in one vectorized pass.
    """
    weights = state.tau**config.alpha_exp * eta**config.beta_exp
    return _sample_solution(weights, instance.m_servers, state, eta, config, rng)


def _sample_solution(
    weights: np.ndarray,
    m: int,
    state: PheromoneState,
    eta: np.ndarray,
    config: ACOConfig,
    rng: np.random.Generator,
) -> Solution:
    if np.all(np.isfinite(weights)) and np.all(weights > 0):
        keys = np.log(weights) + rng.gumbel(size=weights.size)
        picks = np.argpartition(-keys, m - 1)[:m]
        return Solution(int(j) + 1 for j in picks)
    # Degenerate weights: fall back to stepwise selection with its uniform
    # fallback over the remaining nodes.
    chosen: set[int] = set()
    for _ in range(m):
        chosen.add(select_next(state, eta, chosen, config, rng))
    return Solution(chosen)


def pheromone_update(
    state: PheromoneState,
    colony: Sequence[tuple[Solution, float]],
    config: ACOConfig,
    sense: str = "max",
) -> PheromoneState:
    """Evaporate, deposit per ant on every node it opened, then clamp.

    Deposits are theta*F under maximization and theta/F under minimization;
    penalized ants (negative F under max, nonpositive F under min) deposit
    nothing.
    """
    tau = state.tau * config.evaporation_rate
    for solution, fitness in colony:
        if not math.isfinite(fitness):
            continue
        if sense == "max":
            if fitness < 0:
                continue
            deposit = config.max_pheromone * fitness
        else:
            if fitness <= 0:
                continue
            deposit = config.max_pheromone / fitness
        tau[np.fromiter(solution.open, dtype=int) - 1] += deposit
    return PheromoneState(tau=np.clip(tau, TAU_MIN, config.max_pheromone))


def run_aco(
    instance: Instance, eval_fn: Fitness, config: ACOConfig, sense: str = "max"
) -> SolverReport:
    """Iterate colonies until the colony converges on the global best or
    improvement stops.

    Same two windows as the genetic algorithm: the per-iteration colony best
    equals the global best for floor(n * sqrt(m)) consecutive iterations
    (convergence), or the global best goes unimproved for the square of that
    many iterations (stagnation).
    """
    if sense not in ("max", "min"):
        raise DomainError(f"sense must be 'max' or 'min', got {sense!r}")
    start = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    better = (lambda a, b: a > b) if sense == "max" else (lambda a, b: a < b)
    n, m = instance.n, instance.m_servers
    limit = config.convergence_limit or int(n * math.sqrt(m))
    cap = config.stagnation_limit or limit * limit
    ants = ant_count(n, m, config.population_coefficient)
    eta = heuristic_index(instance)
    state = PheromoneState.initial(n)
    best_solution: Optional[Solution] = None
    best_value = -math.inf if sense == "max" else math.inf
    trace: list[float] = []
    converged = 0
    stagnant = 0
    iterations = 0
    termination = "stagnation"
    while True:
        colony = []
        improved = False
        colony_best = -math.inf if sense == "max" else math.inf
        weights = state.tau**config.alpha_exp * eta**config.beta_exp
        for _ in range(ants):
            solution = _sample_solution(weights, m, state, eta, config, rng)
            value = eval_fn(solution)
            colony.append((solution, value))
            if better(value, colony_best):
                colony_best = value
            if best_solution is None or better(value, best_value):
                best_solution, best_value = solution, value
                improved = True
        state = pheromone_update(state, colony, config, sense)
        iterations += 1
        if improved:
            stagnant = 0
            converged = 0
        else:
            stagnant += 1
            converged = converged + 1 if colony_best == best_value else 0
        trace.append(best_value)
        if converged >= limit:
            termination = "convergence"
            break
        if stagnant >= cap:
            break
    return SolverReport(
        algorithm="aco",
        n=n,
        m=m,
        seed=config.seed,
        best=best_solution.sorted() if best_solution else [],
        objective=best_value,
        iterations=iterations,
        termination=termination,
        trace=trace,
        elapsed_s=time.perf_counter() - start,
    )
