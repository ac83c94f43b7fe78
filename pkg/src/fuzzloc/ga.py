"""Genetic algorithm with index-set encoding and union-and-greedy-drop mating.

There is no mutation operator: selection pressure comes from elitist
replacement of the worst member, and new genetic material only ever comes
from recombining the current gene pool.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import DomainError
from .model import Instance, Solution
from .reports import SolverReport

Fitness = Callable[[Solution], float]


@dataclass(frozen=True)
class Chromosome:
    genes: frozenset[int]
    fitness: float


@dataclass
class GAConfig:
    population_floor: int = 10
    seed: int = 0
    convergence_limit: Optional[int] = None  # default floor(n * sqrt(m))
    stagnation_limit: Optional[int] = None  # default convergence_limit ** 2

    def __post_init__(self) -> None:
        if self.population_floor < 2:
            raise DomainError("population_floor must be at least 2")


def convergence_limit(n: int, m: int) -> int:
    return int(n * math.sqrt(m))


def population_size(n: int, m: int, floor: int) -> int:
    """Smallest population that can jointly contain every gene, at least floor."""
    if not (1 <= m < n):
        raise DomainError(f"need 1 <= m < n, got m={m}, n={n}")
    return max(math.ceil(n / m), floor)


def init_population(
    instance: Instance,
    config: GAConfig,
    eval_fn: Fitness,
    rng: Optional[random.Random] = None,
) -> list[Chromosome]:
    """Deal genes 1..n round-robin so every node appears, then fill randomly."""
    rng = rng if rng is not None else random.Random(config.seed)
    n, m = instance.n, instance.m_servers
    size = population_size(n, m, config.population_floor)
    members: list[set[int]] = [set() for _ in range(size)]
    for gene in range(1, n + 1):
        members[(gene - 1) % size].add(gene)
    for member in members:
        missing = m - len(member)
        if missing > 0:
            pool = [g for g in range(1, n + 1) if g not in member]
            member.update(rng.sample(pool, missing))
    return [Chromosome(frozenset(member), eval_fn(Solution(member))) for member in members]


def generate_candidate(
    p1: Chromosome,
    p2: Chromosome,
    eval_fn: Fitness,
    rng: Optional[random.Random] = None,
) -> Chromosome:
    """Union the parents, then greedily drop unshared genes back to size m.

    At each shrink step every droppable gene is trial-removed and the removal
    with the best remaining fitness wins; genes present in both parents are
    never dropped. Clamped memberships make large fitness plateaus common, so
    exact ties are broken at random (first gene in index order when no rng is
    given) to avoid a systematic bias toward dropping low indices.
    """
    if p1.genes == p2.genes:
        raise DomainError("parents must have different gene sets")
    m = len(p1.genes)
    draft = set(p1.genes | p2.genes)
    shared = p1.genes & p2.genes
    value = None
    while len(draft) > m:
        tied, best_value = [], None
        for gene in sorted(draft - shared):
            trial = eval_fn(Solution(draft - {gene}))
            if best_value is None or trial > best_value:
                tied, best_value = [gene], trial
            elif trial == best_value:
                tied.append(gene)
        best_gene = tied[0] if rng is None or len(tied) == 1 else rng.choice(tied)
        draft.remove(best_gene)
        value = best_value
    if value is None:  # parents already of size m and disjoint unions can't occur
        value = eval_fn(Solution(draft))
    return Chromosome(frozenset(draft), value)


def replace(population: list[Chromosome], candidate: Chromosome) -> list[Chromosome]:
    """Elitist replacement: swap out the worst member unless the candidate is
    worse than it or duplicates an existing gene set."""
    worst = min(range(len(population)), key=lambda i: population[i].fitness)
    if candidate.fitness < population[worst].fitness:
        return population
    if any(candidate.genes == member.genes for member in population):
        return population
    population[worst] = candidate
    return population


def run_ga(instance: Instance, eval_fn: Fitness, config: GAConfig) -> SolverReport:
    """Evolve until the population converges on its best or improvement stops.

    Two windows, terminating on whichever closes first: candidates equal the
    incumbent best fitness for floor(n * sqrt(m)) consecutive iterations
    (convergence), or the best fitness goes unimproved for the square of that
    many iterations (stagnation). One iteration is one mating.
    """
    start = time.perf_counter()
    rng = random.Random(config.seed)
    limit = config.convergence_limit or convergence_limit(instance.n, instance.m_servers)
    cap = config.stagnation_limit or limit * limit
    population = init_population(instance, config, eval_fn, rng)
    best = max(population, key=lambda c: c.fitness)
    trace: list[float] = []
    converged = 0
    stagnant = 0
    iterations = 0
    termination = "stagnation"
    while True:
        pair = _distinct_parents(population, rng)
        if pair is None:
            termination = "convergence"  # gene pool collapsed; nothing left to recombine
            break
        candidate = generate_candidate(pair[0], pair[1], eval_fn, rng)
        replace(population, candidate)
        iterations += 1
        converged = converged + 1 if candidate.fitness == best.fitness else 0
        current = max(population, key=lambda c: c.fitness)
        if current.fitness > best.fitness:
            best = current
            stagnant = 0
            converged = 0
        else:
            stagnant += 1
        trace.append(best.fitness)
        if converged >= limit:
            termination = "convergence"
            break
        if stagnant >= cap:
            break
    return SolverReport(
        algorithm="ga",
        n=instance.n,
        m=instance.m_servers,
        seed=config.seed,
        best=sorted(best.genes),
        objective=best.fitness,
        iterations=iterations,
        termination=termination,
        trace=trace,
        elapsed_s=time.perf_counter() - start,
    )


def _distinct_parents(
    population: Sequence[Chromosome], rng: random.Random
) -> Optional[tuple[Chromosome, Chromosome]]:
    for _ in range(32):
        p1, p2 = rng.sample(population, 2)
        if p1.genes != p2.genes:
            return (p1, p2)
    for i in range(len(population)):
        for j in range(i + 1, len(population)):
            if population[i].genes != population[j].genes:
                return (population[i], population[j])
    return None
