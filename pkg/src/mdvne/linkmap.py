"""Map virtual links onto load-balanced, bandwidth-feasible substrate paths."""
from __future__ import annotations

from collections import Counter

from .errors import Infeasible, LinkMapFailure
from .model import EmbeddingPlan, SubstrateNetwork, VirtualNetworkRequest, path_links, reserve, unreserve
from .pathing import compute_weights, shortest_path


def link_order(vnr: VirtualNetworkRequest) -> list[int]:
    """Indices of the virtual links by nonincreasing bandwidth, ties by index."""
    return sorted(range(len(vnr.links)), key=lambda i: (-vnr.links[i][2], i))


def map_links(vnr: VirtualNetworkRequest, node_map, net: SubstrateNetwork, lam: float = 1.0) -> EmbeddingPlan:
    """Route every virtual link of ``vnr`` given a node mapping.

    Weights are recomputed before each link against residuals that include
    the bandwidth already claimed by earlier links of this request. The
    network is left exactly as it was on return, success or failure; the
    caller allocates the returned plan.
    """
    node_map = dict(enumerate(node_map)) if not isinstance(node_map, dict) else dict(node_map)
    link_map = {}
    tentative = []
    try:
        for i in link_order(vnr):
            a, b, bw = vnr.links[i]
            view = compute_weights(net, lam, min_bw=bw)
            try:
                path = shortest_path(net, view, node_map[a], node_map[b])
            except Infeasible:
                raise LinkMapFailure((a, b)) from None
            loads = Counter({key: bw for key in path_links(path)})
            reserve(net, {}, loads)
            tentative.append(loads)
            link_map[(a, b)] = path
    finally:
        for loads in reversed(tentative):
            unreserve(net, {}, loads)
    return EmbeddingPlan.build(net, vnr, node_map, link_map)
