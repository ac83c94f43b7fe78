"""Genetic algorithm: sizing, mating, replacement, termination, optimality."""

import random

import pytest

from conftest import feasible_subsets
from fuzzloc.errors import DomainError
from fuzzloc.evaluation import make_maximin_eval
from fuzzloc.ga import (
    Chromosome,
    GAConfig,
    convergence_limit,
    generate_candidate,
    init_population,
    population_size,
    replace,
    run_ga,
)
from fuzzloc.model import Solution
from fuzzloc.oracle import enumerate_optimum, exact_bounds


def subset_size_fitness(solution: Solution) -> float:
    """Deterministic toy fitness: prefer high indices, penalize size."""
    return sum(solution.open) - 10.0 * len(solution.open)


class TestSizing:
    def test_population_size_examples(self):
        assert population_size(20, 5, 10) == 10
        assert population_size(100, 5, 10) == 20
        assert population_size(6, 2, 2) == 3

    def test_population_size_invalid(self):
        with pytest.raises(DomainError):
            population_size(5, 5, 10)

    def test_convergence_limit(self):
        assert convergence_limit(20, 5) == 44
        assert convergence_limit(6, 2) == 8

    def test_config_floor(self):
        with pytest.raises(DomainError):
            GAConfig(population_floor=1)


class TestInitPopulation:
    def test_covers_all_genes(self, medium_instance):
        population = init_population(medium_instance, GAConfig(seed=0), subset_size_fitness)
        union = set().union(*(c.genes for c in population))
        assert union == set(range(1, medium_instance.n + 1))

    def test_member_sizes(self, medium_instance):
        population = init_population(medium_instance, GAConfig(seed=1), subset_size_fitness)
        assert all(len(c.genes) == medium_instance.m_servers for c in population)
        assert len(population) == population_size(medium_instance.n, 2, 10)

    def test_deterministic(self, medium_instance):
        a = init_population(medium_instance, GAConfig(seed=7), subset_size_fitness)
        b = init_population(medium_instance, GAConfig(seed=7), subset_size_fitness)
        assert [c.genes for c in a] == [c.genes for c in b]


class TestGenerateCandidate:
    def test_shared_gene_preserved(self):
        p1 = Chromosome(frozenset({1, 2, 3}), subset_size_fitness(Solution([1, 2, 3])))
        p2 = Chromosome(frozenset({3, 4, 5}), subset_size_fitness(Solution([3, 4, 5])))
        child = generate_candidate(p1, p2, subset_size_fitness, random.Random(0))
        assert len(child.genes) == 3
        assert 3 in child.genes
        assert child.genes <= p1.genes | p2.genes

    def test_greedy_drop_optimal_for_additive_fitness(self):
        p1 = Chromosome(frozenset({1, 2}), 0.0)
        p2 = Chromosome(frozenset({7, 8}), 0.0)
        child = generate_candidate(p1, p2, subset_size_fitness, random.Random(0))
        assert child.genes == frozenset({7, 8})

    def test_identical_parents_rejected(self):
        p = Chromosome(frozenset({1, 2}), 0.0)
        with pytest.raises(DomainError):
            generate_candidate(p, p, subset_size_fitness)

    def test_candidate_fitness_matches_eval(self):
        p1 = Chromosome(frozenset({1, 2}), 0.0)
        p2 = Chromosome(frozenset({2, 5}), 0.0)
        child = generate_candidate(p1, p2, subset_size_fitness, random.Random(3))
        assert child.fitness == subset_size_fitness(Solution(child.genes))


class TestReplace:
    def test_worse_candidate_rejected(self):
        population = [Chromosome(frozenset({1, 2}), 5.0), Chromosome(frozenset({3, 4}), 3.0)]
        out = replace(population, Chromosome(frozenset({5, 6}), 1.0))
        assert {c.genes for c in out} == {frozenset({1, 2}), frozenset({3, 4})}

    def test_duplicate_rejected(self):
        population = [Chromosome(frozenset({1, 2}), 5.0), Chromosome(frozenset({3, 4}), 3.0)]
        out = replace(population, Chromosome(frozenset({1, 2}), 9.0))
        assert {c.genes for c in out} == {frozenset({1, 2}), frozenset({3, 4})}

    def test_better_candidate_replaces_worst(self):
        population = [Chromosome(frozenset({1, 2}), 5.0), Chromosome(frozenset({3, 4}), 3.0)]
        out = replace(population, Chromosome(frozenset({5, 6}), 4.0))
        assert frozenset({5, 6}) in {c.genes for c in out}
        assert frozenset({3, 4}) not in {c.genes for c in out}


class TestRunGA:
    def test_deterministic(self, small_instance):
        ctx = exact_bounds(small_instance)
        fitness = make_maximin_eval(small_instance, ctx)
        a = run_ga(small_instance, fitness, GAConfig(seed=5))
        b = run_ga(small_instance, fitness, GAConfig(seed=5))
        assert a.best == b.best
        assert a.objective == b.objective
        assert a.trace == b.trace

    def test_trace_nondecreasing(self, small_instance):
        ctx = exact_bounds(small_instance)
        fitness = make_maximin_eval(small_instance, ctx)
        report = run_ga(small_instance, fitness, GAConfig(seed=2))
        assert all(x <= y for x, y in zip(report.trace, report.trace[1:]))
        assert report.termination in ("convergence", "stagnation")

    def test_best_is_valid_solution(self, small_instance):
        ctx = exact_bounds(small_instance)
        fitness = make_maximin_eval(small_instance, ctx)
        report = run_ga(small_instance, fitness, GAConfig(seed=0))
        assert len(report.best) == small_instance.m_servers
        assert all(1 <= j <= small_instance.n for j in report.best)

    def test_finds_optimum_on_small_instance(self, small_instance):
        ctx = exact_bounds(small_instance)
        fitness = make_maximin_eval(small_instance, ctx)
        optimum = enumerate_optimum(small_instance, fitness)
        hits = sum(
            abs(run_ga(small_instance, fitness, GAConfig(seed=s)).objective
                - optimum.best_value) < 1e-9
            for s in range(20)
        )
        assert hits >= 18

    def test_never_exceeds_enumerated_best(self, small_instance):
        ctx = exact_bounds(small_instance)
        fitness = make_maximin_eval(small_instance, ctx)
        optimum = enumerate_optimum(small_instance, fitness)
        for seed in range(5):
            report = run_ga(small_instance, fitness, GAConfig(seed=seed))
            assert report.objective <= optimum.best_value + 1e-12

    def test_explicit_window_overrides(self, small_instance):
        ctx = exact_bounds(small_instance)
        fitness = make_maximin_eval(small_instance, ctx)
        report = run_ga(
            small_instance,
            fitness,
            GAConfig(seed=0, convergence_limit=1, stagnation_limit=1),
        )
        # every iteration before the last strictly improves the best, and the
        # fitness only takes one value per distinct 2-subset (15 of them)
        assert report.iterations <= 16
