"""Seeded generators for multi-domain substrates and Poisson request streams."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .model import SubstrateLink, SubstrateNetwork, SubstrateNode, VirtualNetworkRequest, link_key

TOPOLOGY, WORKLOAD, ALGORITHM = range(3)


def rng_stream(seed: int, which: int) -> np.random.Generator:
    """Independent generator for one consumer of a master seed."""
    children = np.random.SeedSequence(seed).spawn(3)
    return np.random.default_rng(children[which])


def _check_range(name, r):
    lo, hi = r
    if lo > hi:
        raise ValueError(f"{name}: empty range {r}")


@dataclass
class SubstrateConfig:
    domain_count: int = 4
    nodes_per_domain: int = 30
    intra_edge_prob: float = 0.5
    inter_links_per_domain_pair: int = 3
    cpu_range: tuple[int, int] = (100, 300)
    intra_bw_range: tuple[int, int] = (1000, 3000)
    inter_bw_range: tuple[int, int] = (3000, 6000)
    price_range: tuple[int, int] = (1, 10)

    def validate(self):
        if self.domain_count < 1 or self.nodes_per_domain < 1:
            raise ValueError("domain_count and nodes_per_domain must be positive")
        if not 0 < self.intra_edge_prob <= 1:
            raise ValueError("intra_edge_prob must lie in (0, 1]")
        if self.domain_count > 1:
            if self.inter_links_per_domain_pair < 1:
                raise ValueError("inter_links_per_domain_pair must be >= 1 with several domains")
            if self.inter_links_per_domain_pair > self.nodes_per_domain ** 2:
                raise ValueError("inter_links_per_domain_pair exceeds the possible node pairs")
        for name in ("cpu_range", "intra_bw_range", "inter_bw_range", "price_range"):
            _check_range(name, getattr(self, name))
        if self.price_range[0] < 1:
            raise ValueError("unit prices must be >= 1")


@dataclass
class VnrStreamConfig:
    mean_arrivals_per_100_units: float = 10.0
    vnr_node_range: tuple[int, int] = (5, 10)
    cpu_demand_range: tuple[int, int] = (1, 10)
    bw_demand_range: tuple[int, int] = (1, 10)
    lifetime: float = 1000.0
    horizon: float = 2200.0
    extra_edge_prob: float = 0.5

    def validate(self):
        if self.mean_arrivals_per_100_units <= 0:
            raise ValueError("mean_arrivals_per_100_units must be positive")
        for name in ("vnr_node_range", "cpu_demand_range", "bw_demand_range"):
            _check_range(name, getattr(self, name))
        if self.vnr_node_range[0] < 2:
            raise ValueError("requests need at least two virtual nodes")
        if self.cpu_demand_range[0] < 1 or self.bw_demand_range[0] < 1:
            raise ValueError("demands must be >= 1")
        if self.lifetime <= 0 or self.horizon < 0:
            raise ValueError("lifetime must be positive and horizon non-negative")


def _uniform_int(rng, r) -> int:
    return int(rng.integers(r[0], r[1] + 1))


def _random_tree(rng, nodes):
    """Edges of a random recursive spanning tree over ``nodes``."""
    order = [nodes[i] for i in rng.permutation(len(nodes))]
    return [(order[i], order[int(rng.integers(0, i))]) for i in range(1, len(order))]


def generate_substrate(cfg: SubstrateConfig, seed: int) -> SubstrateNetwork:
    cfg.validate()
    rng = rng_stream(seed, TOPOLOGY)
    nodes = []
    domains = []
    for d in range(cfg.domain_count):
        members = list(range(d * cfg.nodes_per_domain, (d + 1) * cfg.nodes_per_domain))
        domains.append(members)
        for i in members:
            cpu = _uniform_int(rng, cfg.cpu_range)
            nodes.append(SubstrateNode(i, d, cpu, cpu, _uniform_int(rng, cfg.price_range)))

    intra = set()
    for members in domains:
        for u, v in itertools.combinations(members, 2):
            if rng.random() < cfg.intra_edge_prob:
                intra.add((u, v))
        for u, v in _random_tree(rng, members):
            intra.add(link_key(u, v))

    inter = set()
    for d1, d2 in itertools.combinations(range(cfg.domain_count), 2):
        placed = 0
        while placed < cfg.inter_links_per_domain_pair:
            u = domains[d1][int(rng.integers(0, cfg.nodes_per_domain))]
            v = domains[d2][int(rng.integers(0, cfg.nodes_per_domain))]
            if (u, v) not in inter:
                inter.add((u, v))
                placed += 1

    links = []
    for u, v in sorted(intra):
        bw = _uniform_int(rng, cfg.intra_bw_range)
        links.append(SubstrateLink(u, v, bw, bw, _uniform_int(rng, cfg.price_range), False))
    for u, v in sorted(inter):
        bw = _uniform_int(rng, cfg.inter_bw_range)
        links.append(SubstrateLink(u, v, bw, bw, _uniform_int(rng, cfg.price_range), True))
    return SubstrateNetwork(nodes, links, cfg.domain_count)


def _random_vnr(rng, cfg: VnrStreamConfig, vnr_id: int, t: float) -> VirtualNetworkRequest:
    n = _uniform_int(rng, cfg.vnr_node_range)
    cpu = [_uniform_int(rng, cfg.cpu_demand_range) for _ in range(n)]
    edges = {link_key(a, b) for a, b in _random_tree(rng, list(range(n)))}
    for a, b in itertools.combinations(range(n), 2):
        if (a, b) not in edges and rng.random() < cfg.extra_edge_prob:
            edges.add((a, b))
    links = [(a, b, _uniform_int(rng, cfg.bw_demand_range)) for a, b in sorted(edges)]
    return VirtualNetworkRequest(vnr_id, t, cfg.lifetime, cpu, links)


def generate_vnr_stream(cfg: VnrStreamConfig, seed: int) -> list[VirtualNetworkRequest]:
    cfg.validate()
    rng = rng_stream(seed, WORKLOAD)
    scale = 100.0 / cfg.mean_arrivals_per_100_units
    stream = []
    t = 0.0
    while True:
        t += float(rng.exponential(scale))
        if t > cfg.horizon:
            break
        stream.append(_random_vnr(rng, cfg, len(stream), t))
    return stream
