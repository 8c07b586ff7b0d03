"""Traditional GA baseline with static shortest-path link mapping."""
from __future__ import annotations

from dataclasses import dataclass

from .lbhga import Individual, Problem, crossover, feasibility_repair
from .linkmap import link_order
from .model import EmbeddingPlan, SubstrateNetwork, VirtualNetworkRequest
from .pathing import shortest_path, static_weights


@dataclass
class TGAParams:
    population_size: int = 50
    max_iterations: int = 50
    crossover_prob: float = 0.7
    mutation_prob: float = 0.03
    init_attempts: int = 50

    def validate(self):
        if self.population_size < 1 or self.max_iterations < 0:
            raise ValueError("population_size must be >= 1 and max_iterations >= 0")
        for name in ("crossover_prob", "mutation_prob"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")


def _roulette(rng, cumulative, total):
    u = rng.random() * total
    lo, hi = 0, len(cumulative) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if cumulative[mid] > u:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _random_mutation(genes, problem: Problem, rng):
    genes = list(genes)
    j = int(rng.integers(len(genes)))
    used = set(genes)
    free = [s for s in problem.candidates[j] if s not in used]
    if free:
        genes[j] = free[int(rng.integers(len(free)))]
    return genes


def tga_run(vnr: VirtualNetworkRequest, net: SubstrateNetwork, params: TGAParams, rng,
            problem: Problem | None = None, trace: list | None = None) -> list[Individual]:
    """Generational GA with inverse-fitness roulette and fixed operator rates; no elitism.

    Survivors are not protected, but the best individual ever seen is
    reported at the head of the returned list.
    """
    params.validate()
    if problem is None:
        problem = Problem(vnr, net, static_weights(net))
    size = params.population_size
    population = [problem.random_individual(rng, params.init_attempts) for _ in range(size)]
    best = min(population, key=Individual.rank_key)

    for _ in range(params.max_iterations):
        cumulative = []
        total = 0.0
        for ind in population:
            total += 1.0 / ind.fitness
            cumulative.append(total)
        children = []
        while len(children) < size:
            p1 = population[_roulette(rng, cumulative, total)]
            p2 = population[_roulette(rng, cumulative, total)]
            if rng.random() < params.crossover_prob:
                pair = crossover(p1.genes, p2.genes, rng)
            else:
                pair = (p1.genes, p2.genes)
            for genes in pair:
                if len(children) == size:
                    break
                if rng.random() < params.mutation_prob:
                    genes = _random_mutation(genes, problem, rng)
                genes = feasibility_repair(genes, problem, rng, params.init_attempts)
                children.append(problem.individual(genes))
        population = children
        best = min(population + [best], key=Individual.rank_key)
        if trace is not None:
            trace.append(best.fitness)

    population.sort(key=Individual.rank_key)
    if best.rank_key() < population[0].rank_key():
        population.insert(0, best)
    return population


def tga_map_links(vnr: VirtualNetworkRequest, node_map, net: SubstrateNetwork) -> EmbeddingPlan:
    """Cheapest unit-price path per virtual link, ignoring residual bandwidth.

    The returned plan may violate bandwidth; allocation is where that shows up.
    """
    node_map = dict(enumerate(node_map)) if not isinstance(node_map, dict) else dict(node_map)
    view = static_weights(net)
    link_map = {}
    for i in link_order(vnr):
        a, b, _ = vnr.links[i]
        link_map[(a, b)] = shortest_path(net, view, node_map[a], node_map[b])
    return EmbeddingPlan.build(net, vnr, node_map, link_map)
