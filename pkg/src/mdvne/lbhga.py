"""Node mapping by a pheromone-guided genetic algorithm.

Chromosomes hold one substrate node id per virtual node. Fitness is the
embedding price, with link costs estimated from an all-pairs matrix built
under the request's smallest bandwidth demand. Lower is better.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


from .errors import NoFeasibleIndividual, NoFeasibleTarget
from .model import SubstrateNetwork, VirtualNetworkRequest
from .pathing import WeightView, all_pairs_estimate, compute_weights

PHEROMONE_FLOOR = 1e-6


@dataclass
class LBHGAParams:
    population_size: int = 40
    max_iterations: int = 50
    mutation_prob: float = 0.2
    lambda1: float = 1.2
    lambda2: float = 0.8
    lam: float = 1.0
    rho: float = 0.1
    mutation_genes: int = 1
    cataclysm_ratio: float = 0.6
    init_attempts: int = 50

    def validate(self):
        if self.population_size < 1 or self.max_iterations < 0:
            raise ValueError("population_size must be >= 1 and max_iterations >= 0")
        for name in ("lambda1", "lambda2", "lam"):
            if not 0 < getattr(self, name) <= 2:
                raise ValueError(f"{name} must lie in (0, 2]")
        if not 0 < self.rho < 1:
            raise ValueError("rho must lie in (0, 1)")
        if not 0 <= self.mutation_prob <= 1:
            raise ValueError("mutation_prob must lie in [0, 1]")
        if self.mutation_genes < 1:
            raise ValueError("mutation_genes must be >= 1")


@dataclass
class Individual:
    genes: tuple[int, ...]
    fitness: float = math.inf

    def rank_key(self):
        return (self.fitness, self.genes)


@dataclass
class PopulationStats:
    mean: float
    min: float
    max: float

    @classmethod
    def of(cls, population) -> "PopulationStats":
        values = [ind.fitness for ind in population]
        return cls(sum(values) / len(values), min(values), max(values))


@dataclass
class PheromoneTable:
    tau: list[float]
    rho: float = 0.1
    floor: float = PHEROMONE_FLOOR

    @classmethod
    def empty(cls, num_nodes: int, rho: float = 0.1, floor: float = PHEROMONE_FLOOR) -> "PheromoneTable":
        return cls([floor] * num_nodes, rho, floor)

    def __getitem__(self, node):
        return self.tau[node]

    def clamp(self):
        self.tau = [t if t > self.floor else self.floor for t in self.tau]


def min_bandwidth(vnr: VirtualNetworkRequest) -> int:
    return min((bw for _, _, bw in vnr.links), default=0)


def infeasible_penalty(vnr: VirtualNetworkRequest, net: SubstrateNetwork, view: WeightView) -> float:
    """A fitness value strictly above any feasible embedding price.

    Any feasible price is at most (total demand) x (largest price or weight)
    x (link count), since a simple path has fewer hops than there are links.
    """
    demand = sum(vnr.cpu) + sum(bw for _, _, bw in vnr.links)
    top = max([n.cpu_unit_price for n in net.nodes] + list(view.weight.values()))
    return demand * top * max(1, len(net.links)) + 1


def fitness(genes, vnr: VirtualNetworkRequest, dm, net: SubstrateNetwork, penalty: float = math.inf) -> float:
    nodes = net.nodes
    total = 0.0
    for j, s in enumerate(genes):
        total += vnr.cpu[j] * nodes[s].cpu_unit_price
    for a, b, bw in vnr.links:
        d = dm[genes[a]][genes[b]]
        if d == math.inf:
            return penalty
        total += bw * d
    return total


class Problem:
    """Per-request context shared by every fitness evaluation."""

    def __init__(self, vnr: VirtualNetworkRequest, net: SubstrateNetwork, view: WeightView):
        self.vnr = vnr
        self.net = net
        self.view = view
        self.dm = all_pairs_estimate(net, view).tolist()
        self.penalty = infeasible_penalty(vnr, net, view)
        # Substrate nodes able to host each virtual node.
        self.candidates = [
            [n.id for n in net.nodes if n.cpu_residual >= demand] for demand in vnr.cpu
        ]

    @classmethod
    def for_request(cls, vnr, net, lam: float) -> "Problem":
        return cls(vnr, net, compute_weights(net, lam, min_bandwidth(vnr)))

    def evaluate(self, genes) -> float:
        return fitness(genes, self.vnr, self.dm, self.net, self.penalty)

    def individual(self, genes) -> Individual:
        genes = tuple(genes)
        return Individual(genes, self.evaluate(genes))

    def cpu_ok(self, j: int, s: int) -> bool:
        return self.net.nodes[s].cpu_residual >= self.vnr.cpu[j]

    def is_valid(self, genes) -> bool:
        return len(set(genes)) == len(genes) and all(self.cpu_ok(j, s) for j, s in enumerate(genes))

    def random_genes(self, rng, attempts: int = 50) -> tuple[int, ...]:
        n = self.vnr.num_nodes
        if len({s for c in self.candidates for s in c}) < n or any(not c for c in self.candidates):
            raise NoFeasibleIndividual(f"request {self.vnr.id}: not enough CPU-sufficient substrate nodes")
        # Most constrained virtual nodes first.
        order = sorted(range(n), key=lambda j: (len(self.candidates[j]), j))
        for _ in range(attempts):
            genes = [None] * n
            used = set()
            for j in order:
                free = [s for s in self.candidates[j] if s not in used]
                if not free:
                    break
                s = free[int(rng.integers(len(free)))]
                genes[j] = s
                used.add(s)
            else:
                return tuple(genes)
        raise NoFeasibleIndividual(f"request {self.vnr.id}: random construction failed")

    def random_individual(self, rng, attempts: int = 50) -> Individual:
        return self.individual(self.random_genes(rng, attempts))


def crossover_probability(f1, f2, stats: PopulationStats, lambda1=1.2, lambda2=0.8) -> float:
    """Fitness-dependent crossover probability for a parent pair."""
    mean, lo_pop, hi_pop = stats.mean, stats.min, stats.max
    if hi_pop == mean or mean == lo_pop:
        return 0.5
    lo, hi = min(f1, f2), max(f1, f2)
    if lo >= mean:
        p = lambda1 * (lo - mean) / (hi_pop - mean)
    elif hi <= mean:
        p = lambda2 * (1 - (mean - hi) / (mean - lo_pop))
    else:
        s_max = (hi - mean) / (hi_pop - mean)
        s_min = (mean - lo) / (mean - lo_pop)
        p = lambda1 * s_max if s_max > s_min else lambda2 * (1 - s_min)
    return min(1.0, max(0.0, p))


def _deposit(population, tau):
    worst = max(ind.fitness for ind in population)
    for ind in population:
        share = (worst - ind.fitness) / len(ind.genes)
        for s in ind.genes:
            tau[s] += share


def init_pheromones(population, table: PheromoneTable) -> PheromoneTable:
    tau = [0.0] * len(table.tau)
    _deposit(population, tau)
    table.tau = tau
    table.clamp()
    return table


def crossover_pheromone_update(offspring, table: PheromoneTable) -> PheromoneTable:
    keep = 1 - table.rho
    table.tau = [t * keep for t in table.tau]
    if offspring:
        _deposit(offspring, table.tau)
    table.clamp()
    return table


def select_mutation_genes(ind: Individual, table: PheromoneTable, count: int, rng) -> list[int]:
    """Roulette over gene positions, favouring nodes with little pheromone.

    Position ``i`` is weighted by the complement of its pheromone share,
    ``(1 - share_i) / (g - 1)``; picks are made without replacement.
    """
    g = len(ind.genes)
    if count > g:
        raise ValueError(f"cannot select {count} of {g} genes")
    if g == 1:
        return [0][:count]
    tau = [table[s] for s in ind.genes]
    total = sum(tau)
    weights = [(1 - t / total) / (g - 1) for t in tau]
    remaining = list(range(g))
    chosen = []
    for _ in range(count):
        mass = sum(weights[i] for i in remaining)
        u = rng.random() * mass
        pick = remaining[-1]
        acc = 0.0
        for i in remaining:
            acc += weights[i]
            if u < acc:
                pick = i
                break
        chosen.append(pick)
        remaining.remove(pick)
    return chosen


def apply_mutation_pheromones(table: PheromoneTable, old_nodes, new_nodes, before: float, after: float):
    if before == after or not old_nodes:
        return table
    delta = abs(after - before) / len(old_nodes)
    sign = -1 if before > after else 1
    for s in old_nodes:
        table.tau[s] += sign * delta
    for s in new_nodes:
        table.tau[s] -= sign * delta
    table.clamp()
    return table


def mutate(ind: Individual, gene_set, problem: Problem, table: PheromoneTable, rng) -> Individual:
    """Move each selected gene to a random CPU-feasible unused node and update pheromones.

    Genes with no legal target stay put; NoFeasibleTarget is raised only
    when none of the selected genes could move.
    """
    genes = list(ind.genes)
    used = set(genes)
    old_nodes, new_nodes = [], []
    for j in gene_set:
        free = [s for s in problem.candidates[j] if s not in used]
        if not free:
            continue
        s = free[int(rng.integers(len(free)))]
        old_nodes.append(genes[j])
        new_nodes.append(s)
        used.discard(genes[j])
        used.add(s)
        genes[j] = s
    if not old_nodes:
        raise NoFeasibleTarget(f"no legal replacement for genes {sorted(gene_set)}")
    child = problem.individual(genes)
    apply_mutation_pheromones(table, old_nodes, new_nodes, ind.fitness, child.fitness)
    return child


def crossover(g1, g2, rng):
    """Exchange the alleles of 1..ceil(n/2) random loci between two parents.

    The exchange is partially mapped: if the incoming node already sits at
    another locus of the child, the displaced node moves there, so children
    stay duplicate-free and a one-locus exchange can act as a swap.
    """
    n = len(g1)
    k = int(rng.integers(1, math.ceil(n / 2) + 1))
    positions = rng.choice(n, size=k, replace=False)
    c1, c2 = list(g1), list(g2)
    for i in positions:
        a, b = c1[i], c2[i]
        _place(c1, i, b)
        _place(c2, i, a)
    return c1, c2


def _place(child, i, node):
    if child[i] == node:
        return
    if node in child:
        child[child.index(node)] = child[i]
    child[i] = node


def feasibility_repair(genes, problem: Problem, rng, attempts: int = 50) -> tuple[int, ...]:
    """Redraw duplicated or CPU-violating genes; fall back to a fresh random chromosome."""
    out = list(genes)
    used = set()
    bad = []
    for j, s in enumerate(out):
        if s in used or not problem.cpu_ok(j, s):
            bad.append(j)
        else:
            used.add(s)
    for j in bad:
        free = [s for s in problem.candidates[j] if s not in used]
        if not free:
            return problem.random_genes(rng, attempts)
        s = free[int(rng.integers(len(free)))]
        out[j] = s
        used.add(s)
    return tuple(out)


@dataclass
class IterationRecord:
    iteration: int
    population_size: int
    best_so_far: float
    generation_best: float
    cataclysm: bool = False


def _pick_pair(rng, size):
    if size == 1:
        return 0, 0
    i = int(rng.integers(size))
    j = int(rng.integers(size - 1))
    return i, j if j < i else j + 1


def _select_elite(population, count):
    """Best ``count`` individuals, distinct chromosomes first; duplicates only fill a shortfall."""
    ranked = sorted(population, key=Individual.rank_key)
    seen = set()
    distinct, repeats = [], []
    for ind in ranked:
        (repeats if ind.genes in seen else distinct).append(ind)
        seen.add(ind.genes)
    return (distinct + repeats)[:count]


def run(vnr: VirtualNetworkRequest, net: SubstrateNetwork, params: LBHGAParams, rng,
        problem: Problem | None = None, trace: list | None = None) -> list[Individual]:
    """Evolve node mappings for one request; returns the final population, best first.

    Raises Rejected (NoFeasibleIndividual) when no CPU-feasible chromosome exists.
    """
    params.validate()
    if problem is None:
        problem = Problem.for_request(vnr, net, params.lam)
    size = params.population_size
    population = [problem.random_individual(rng, params.init_attempts) for _ in range(size)]
    table = PheromoneTable.empty(len(net.nodes), params.rho)
    init_pheromones(population, table)

    best = min(ind.fitness for ind in population)
    stall = 0
    threshold = math.ceil(params.cataclysm_ratio * params.max_iterations)
    n_elite = math.ceil(size / 2)
    n_keep = max(1, size // 3)
    g = vnr.num_nodes

    for it in range(params.max_iterations):
        start_size = len(population)
        stats = PopulationStats.of(population)
        elite = _select_elite(population, n_elite)

        offspring = []
        while n_elite + len(offspring) < size:
            i, j = _pick_pair(rng, len(elite))
            p1, p2 = elite[i], elite[j]
            pc = crossover_probability(p1.fitness, p2.fitness, stats, params.lambda1, params.lambda2)
            if rng.random() < pc:
                children = crossover(p1.genes, p2.genes, rng)
            else:
                children = (p1.genes, p2.genes)
            for child in children:
                if n_elite + len(offspring) < size:
                    offspring.append(problem.individual(feasibility_repair(child, problem, rng, params.init_attempts)))

        crossover_pheromone_update(offspring, table)
        # Offspring identical to an elite or an earlier child always mutate.
        seen = {ind.genes for ind in elite}
        for k, child in enumerate(offspring):
            if rng.random() < params.mutation_prob or child.genes in seen:
                gene_set = select_mutation_genes(child, table, min(params.mutation_genes, g), rng)
                try:
                    offspring[k] = mutate(child, gene_set, problem, table, rng)
                except NoFeasibleTarget:
                    pass
            seen.add(offspring[k].genes)

        population = elite + offspring
        generation_best = min(ind.fitness for ind in population)
        cataclysm = False
        if generation_best < best:
            best = generation_best
            stall = 0
        else:
            stall += 1
            if stall >= threshold:
                population.sort(key=Individual.rank_key)
                population = population[:n_keep]
                population += [problem.random_individual(rng, params.init_attempts) for _ in range(size - n_keep)]
                stall = 0
                cataclysm = True
        if trace is not None:
            trace.append(IterationRecord(it, start_size, best, generation_best, cataclysm))

    population.sort(key=Individual.rank_key)
    return population
