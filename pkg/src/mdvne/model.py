"""Substrate and virtual network types plus the allocation ledger.

Capacities and demands are integers (prices too), so that allocate/release
round-trips are exact.
"""
from __future__ import annotations

import copy
from collections import Counter
from dataclasses import dataclass, field

from .errors import InsufficientBandwidth, InsufficientCpu, UnknownPlan


def link_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def path_links(path) -> list[tuple[int, int]]:
    """Links traversed by a node sequence, as normalized keys."""
    return [link_key(a, b) for a, b in zip(path, path[1:])]


@dataclass
class SubstrateNode:
    id: int
    domain: int
    cpu_capacity: int
    cpu_residual: int
    cpu_unit_price: int


@dataclass
class SubstrateLink:
    u: int
    v: int
    bw_capacity: int
    bw_residual: int
    bw_unit_price: int
    inter_domain: bool = False

    @property
    def key(self) -> tuple[int, int]:
        return link_key(self.u, self.v)

    @property
    def bw_used(self) -> int:
        return self.bw_capacity - self.bw_residual


class SubstrateNetwork:
    """Undirected substrate graph with residual resources and a plan ledger.

    Node ids are ``0..n-1`` and index ``nodes`` directly. Links are keyed by
    the sorted endpoint pair.
    """

    def __init__(self, nodes, links, domain_count: int):
        self.nodes: list[SubstrateNode] = list(nodes)
        for i, n in enumerate(self.nodes):
            if n.id != i:
                raise ValueError(f"node ids must be contiguous from 0, got {n.id} at position {i}")
        self.links: dict[tuple[int, int], SubstrateLink] = {}
        for link in links:
            if link.u == link.v:
                raise ValueError(f"self-loop on node {link.u}")
            if link.key in self.links:
                raise ValueError(f"duplicate link {link.key}")
            self.links[link.key] = link
        self.links = dict(sorted(self.links.items()))
        self.domain_count = domain_count
        self.adj: dict[int, list[int]] = {n.id: [] for n in self.nodes}
        for u, v in self.links:
            self.adj[u].append(v)
            self.adj[v].append(u)
        for nbrs in self.adj.values():
            nbrs.sort()
        self.active: dict = {}

    def __len__(self):
        return len(self.nodes)

    def link(self, u: int, v: int) -> SubstrateLink:
        return self.links[link_key(u, v)]

    def has_link(self, u: int, v: int) -> bool:
        return link_key(u, v) in self.links

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in self.adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == len(self.nodes)

    def state(self) -> tuple:
        """Hashable view of every residual plus the ledger keys."""
        return (
            tuple(n.cpu_residual for n in self.nodes),
            tuple(l.bw_residual for l in self.links.values()),
            tuple(sorted(self.active, key=repr)),
        )

    def copy(self) -> "SubstrateNetwork":
        return copy.deepcopy(self)


@dataclass
class VirtualNetworkRequest:
    """A demand graph. Virtual node ``j`` requests ``cpu[j]``; each link is ``(a, b, bw)``."""

    id: int
    arrival_time: float
    lifetime: float
    cpu: list[int]
    links: list[tuple[int, int, int]]

    @property
    def num_nodes(self) -> int:
        return len(self.cpu)

    @property
    def nodes(self) -> list[tuple[int, int]]:
        return list(enumerate(self.cpu))

    def is_connected(self) -> bool:
        n = self.num_nodes
        if n == 0:
            return True
        adj = {i: [] for i in range(n)}
        for a, b, _ in self.links:
            adj[a].append(b)
            adj[b].append(a)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == n


@dataclass
class EmbeddingPlan:
    """Node map and link-to-path map for one request.

    ``link_map`` maps a virtual link ``(a, b)`` to the substrate node
    sequence of its path, starting at ``node_map[a]``. The demands are
    carried along so the plan alone is enough to allocate and release it.
    """

    vnr_id: object
    node_map: dict[int, int]
    link_map: dict[tuple[int, int], tuple[int, ...]]
    cpu_demand: dict[int, int] = field(default_factory=dict)
    bw_demand: dict[tuple[int, int], int] = field(default_factory=dict)
    objective: float = 0

    @classmethod
    def build(cls, net: SubstrateNetwork, vnr: VirtualNetworkRequest, node_map, link_map) -> "EmbeddingPlan":
        node_map = dict(node_map)
        link_map = {(a, b): tuple(p) for (a, b), p in link_map.items()}
        plan = cls(
            vnr_id=vnr.id,
            node_map=node_map,
            link_map=link_map,
            cpu_demand={j: vnr.cpu[j] for j in node_map},
            bw_demand={(a, b): bw for a, b, bw in vnr.links if (a, b) in link_map},
        )
        plan.objective = objective_value(net, plan)
        return plan

    def hops(self, vlink) -> int:
        return len(self.link_map[vlink]) - 1

    def node_loads(self) -> Counter:
        loads = Counter()
        for j, s in self.node_map.items():
            loads[s] += self.cpu_demand[j]
        return loads

    def link_loads(self) -> Counter:
        # Virtual links of one plan sharing a substrate link add up.
        loads = Counter()
        for vlink, path in self.link_map.items():
            bw = self.bw_demand[vlink]
            for key in path_links(path):
                loads[key] += bw
        return loads


def check_plan(net: SubstrateNetwork, plan: EmbeddingPlan) -> None:
    """Raise ValueError if the plan is structurally inconsistent with ``net``."""
    images = list(plan.node_map.values())
    if len(set(images)) != len(images):
        raise ValueError(f"plan {plan.vnr_id}: node map is not injective")
    for s in images:
        if not 0 <= s < len(net.nodes):
            raise ValueError(f"plan {plan.vnr_id}: unknown substrate node {s}")
    for (a, b), path in plan.link_map.items():
        if len(path) < 2 or path[0] != plan.node_map[a] or path[-1] != plan.node_map[b]:
            raise ValueError(f"plan {plan.vnr_id}: path for virtual link {(a, b)} has wrong endpoints")
        if len(set(path)) != len(path):
            raise ValueError(f"plan {plan.vnr_id}: path for virtual link {(a, b)} is not simple")
        for key in path_links(path):
            if key not in net.links:
                raise ValueError(f"plan {plan.vnr_id}: path uses missing link {key}")


def objective_value(net: SubstrateNetwork, plan: EmbeddingPlan):
    """Total price: CPU demand times node unit price plus bandwidth demand times path unit price sum."""
    total = 0
    for j, s in plan.node_map.items():
        total += plan.cpu_demand[j] * net.nodes[s].cpu_unit_price
    for vlink, path in plan.link_map.items():
        aup = sum(net.links[key].bw_unit_price for key in path_links(path))
        total += plan.bw_demand[vlink] * aup
    return total


def reserve(net: SubstrateNetwork, node_loads, link_loads) -> None:
    """Atomically subtract the given loads from the residuals."""
    for s, need in node_loads.items():
        if need > net.nodes[s].cpu_residual:
            raise InsufficientCpu(s, need, net.nodes[s].cpu_residual)
    for key, need in link_loads.items():
        link = net.links[key]
        if need > link.bw_residual:
            raise InsufficientBandwidth(key, need, link.bw_residual)
    for s, need in node_loads.items():
        net.nodes[s].cpu_residual -= need
    for key, need in link_loads.items():
        net.links[key].bw_residual -= need


def unreserve(net: SubstrateNetwork, node_loads, link_loads) -> None:
    for s, need in node_loads.items():
        net.nodes[s].cpu_residual += need
    for key, need in link_loads.items():
        net.links[key].bw_residual += need


def allocate(net: SubstrateNetwork, plan: EmbeddingPlan) -> SubstrateNetwork:
    """Reserve a plan's resources and record it in the active ledger.

    Nothing is modified if any constraint is violated.
    """
    check_plan(net, plan)
    if plan.vnr_id in net.active:
        raise ValueError(f"plan {plan.vnr_id} is already allocated")
    reserve(net, plan.node_loads(), plan.link_loads())
    net.active[plan.vnr_id] = plan
    return net


def release(net: SubstrateNetwork, plan: EmbeddingPlan) -> SubstrateNetwork:
    stored = net.active.get(plan.vnr_id)
    if stored is None or stored != plan:
        raise UnknownPlan(f"plan {plan.vnr_id} is not allocated")
    del net.active[plan.vnr_id]
    unreserve(net, plan.node_loads(), plan.link_loads())
    return net


def conservation_errors(net: SubstrateNetwork) -> list[str]:
    """Discrepancies between residuals and the loads of the active plans."""
    node_loads = Counter()
    link_loads = Counter()
    for plan in net.active.values():
        node_loads.update(plan.node_loads())
        link_loads.update(plan.link_loads())
    errors = []
    for n in net.nodes:
        if not 0 <= n.cpu_residual <= n.cpu_capacity:
            errors.append(f"node {n.id}: residual {n.cpu_residual} outside [0, {n.cpu_capacity}]")
        if n.cpu_capacity - n.cpu_residual != node_loads[n.id]:
            errors.append(f"node {n.id}: used {n.cpu_capacity - n.cpu_residual} != ledger {node_loads[n.id]}")
    for key, l in net.links.items():
        if not 0 <= l.bw_residual <= l.bw_capacity:
            errors.append(f"link {key}: residual {l.bw_residual} outside [0, {l.bw_capacity}]")
        if l.bw_used != link_loads[key]:
            errors.append(f"link {key}: used {l.bw_used} != ledger {link_loads[key]}")
    return errors
