"""Load-balanced link weights and bandwidth-constrained shortest paths."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import Infeasible
from .model import SubstrateNetwork, link_key

# Weights are snapped to a dyadic grid so path sums are exact in binary
# floating point and independent of summation order.
WEIGHT_QUANTUM = 2.0 ** -20


def _snap(w: float) -> float:
    return round(w / WEIGHT_QUANTUM) * WEIGHT_QUANTUM


@dataclass
class WeightView:
    weight: dict[tuple[int, int], float]
    excluded: set[tuple[int, int]] = field(default_factory=set)
    min_bw: int = 0

    def usable(self, u: int, v: int) -> bool:
        return link_key(u, v) not in self.excluded

    def path_weight(self, path) -> float:
        total = 0.0
        for a, b in zip(path, path[1:]):
            total += self.weight[link_key(a, b)]
        return total


def compute_weights(net: SubstrateNetwork, lam: float = 1.0, min_bw: int = 0) -> WeightView:
    """Inflate the unit price of links carrying more than the mean used bandwidth.

    A link whose used bandwidth ``U`` exceeds the network mean ``Ubar`` gets
    ``price * (1 + lam * (U - Ubar) / (Umax - Ubar))``; every other link keeps
    its unit price. Links with residual below ``min_bw`` are excluded.
    """
    links = list(net.links.values())
    if not links:
        return WeightView({}, set(), min_bw)
    used = [l.bw_used for l in links]
    mean = sum(used) / len(used)
    top = max(used)
    weight = {}
    excluded = set()
    for link, u in zip(links, used):
        if u > mean:
            extra = (u - mean) / (top - mean)
            weight[link.key] = _snap(link.bw_unit_price * (1 + lam * extra))
        else:
            weight[link.key] = float(link.bw_unit_price)
        if link.bw_residual < min_bw:
            excluded.add(link.key)
    return WeightView(weight, excluded, min_bw)


def static_weights(net: SubstrateNetwork) -> WeightView:
    """Plain unit-price weights with nothing excluded."""
    return WeightView({k: float(l.bw_unit_price) for k, l in net.links.items()}, set(), 0)


def shortest_path(net: SubstrateNetwork, view: WeightView, src: int, dst: int) -> tuple[int, ...]:
    """Minimum-weight path over usable links as a node sequence.

    Among equal-weight paths the lexicographically smallest node sequence
    wins. Raises Infeasible when ``dst`` is unreachable.
    """
    if src == dst:
        raise ValueError("source and destination must differ")
    best = {src: (0.0, (src,))}
    heap = [(0.0, (src,))]
    done = set()
    while heap:
        d, path = heapq.heappop(heap)
        u = path[-1]
        if u in done:
            continue
        done.add(u)
        if u == dst:
            return path
        for v in net.adj[u]:
            if v in done:
                continue
            key = link_key(u, v)
            if key in view.excluded:
                continue
            cand = (d + view.weight[key], path + (v,))
            if v not in best or cand < best[v]:
                best[v] = cand
                heapq.heappush(heap, cand)
    raise Infeasible(f"no path from {src} to {dst} with residual >= {view.min_bw}")


def all_pairs_estimate(net: SubstrateNetwork, view: WeightView) -> np.ndarray:
    """Matrix of cheapest usable-path weights; ``inf`` marks unreachable pairs."""
    n = len(net.nodes)
    rows, cols, data = [], [], []
    for key, w in view.weight.items():
        if key in view.excluded:
            continue
        u, v = key
        rows += [u, v]
        cols += [v, u]
        data += [w, w]
    graph = csr_matrix((data, (rows, cols)), shape=(n, n))
    return dijkstra(graph, directed=True)


def path_is_feasible(net: SubstrateNetwork, path, bw: int) -> bool:
    return all(net.link(a, b).bw_residual >= bw for a, b in zip(path, path[1:]))


def is_infeasible(cost) -> bool:
    return math.isinf(cost)
