"""Discrete-event embedding simulation and the evaluation indexes."""
from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import baseline, lbhga
from .errors import EmbeddingError, Rejected
from .linkmap import map_links
from .model import (
    EmbeddingPlan,
    SubstrateNetwork,
    VirtualNetworkRequest,
    allocate,
    conservation_errors,
    release,
)
from .topology import ALGORITHM, SubstrateConfig, VnrStreamConfig, generate_substrate, generate_vnr_stream, rng_stream

ALGORITHMS = ("lbhga", "tga")
EXPIRY, ARRIVAL = 0, 1


@dataclass
class MetricsRecord:
    """Cumulative indexes from time 0 up to ``bucket_end``.

    Ratios with a zero denominator are None. ``accept_refuse_ratio`` is
    accepted over refused, kept alongside the usual acceptance ratio.
    """

    bucket_end: float
    link_load_variance: float
    revenue: int
    cost: int
    revenue_cost_ratio: float | None
    acceptance_ratio: float | None
    avg_quotation: float | None
    accepted: int
    refused: int
    total_runtime_ms: float
    avg_runtime_ms: float | None
    accept_refuse_ratio: float | None = None


@dataclass
class Event:
    time: float
    kind: str
    vnr_id: int
    accepted: bool | None = None
    revenue: int = 0
    cost: int = 0
    objective: float = 0
    runtime_ms: float = 0.0
    node_map: dict | None = None
    link_map: dict | None = None

    def to_dict(self, include_runtime: bool = True) -> dict:
        d = {"time": self.time, "kind": self.kind, "vnr_id": self.vnr_id}
        if self.kind == "arrival":
            d.update(accepted=self.accepted, revenue=self.revenue, cost=self.cost, objective=self.objective)
            if self.accepted:
                d["node_map"] = [self.node_map[j] for j in sorted(self.node_map)]
                d["link_map"] = [[a, b, list(p)] for (a, b), p in sorted(self.link_map.items())]
            if include_runtime:
                d["runtime_ms"] = self.runtime_ms
        return d


@dataclass
class SimulationResult:
    algorithm: str
    seed: int
    records: list[MetricsRecord]
    events: list[Event] = field(default_factory=list)
    net: SubstrateNetwork | None = None


def link_load_variance(net: SubstrateNetwork) -> float:
    """Population variance of consumed bandwidth over all substrate links."""
    used = [l.bw_used for l in net.links.values()]
    if not used:
        return 0.0
    mu = sum(used) / len(used)
    return sum((u - mu) ** 2 for u in used) / len(used)


def revenue(vnr: VirtualNetworkRequest) -> int:
    return sum(vnr.cpu) + sum(bw for _, _, bw in vnr.links)


def cost(plan: EmbeddingPlan, vnr: VirtualNetworkRequest) -> int:
    total = sum(vnr.cpu)
    for a, b, bw in vnr.links:
        total += bw * plan.hops((a, b))
    return total


def _ratio(num, den):
    return num / den if den else None


def embed_lbhga(vnr, net, params: lbhga.LBHGAParams, rng, retry_limit: int = 5) -> EmbeddingPlan | None:
    """Node-map with the hybrid GA, then try link mapping on the ranked individuals."""
    try:
        ranked = lbhga.run(vnr, net, params, rng)
    except Rejected:
        return None
    tried = set()
    for ind in ranked:
        if len(tried) >= retry_limit:
            break
        if ind.genes in tried:
            continue
        tried.add(ind.genes)
        try:
            plan = map_links(vnr, ind.genes, net, params.lam)
            allocate(net, plan)
            return plan
        except EmbeddingError:
            continue
    return None


def embed_tga(vnr, net, params: baseline.TGAParams, rng) -> EmbeddingPlan | None:
    """Best T-GA individual with static shortest paths; any violation rejects."""
    try:
        ranked = baseline.tga_run(vnr, net, params, rng)
    except Rejected:
        return None
    plan = baseline.tga_map_links(vnr, ranked[0].genes, net)
    try:
        allocate(net, plan)
    except EmbeddingError:
        return None
    return plan


def default_params(algorithm: str):
    if algorithm == "lbhga":
        return lbhga.LBHGAParams()
    if algorithm == "tga":
        return baseline.TGAParams()
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


def simulate(net: SubstrateNetwork, stream: list[VirtualNetworkRequest], algorithm: str, params=None, rng=None,
             horizon: float | None = None, bucket: float = 100, retry_limit: int = 5,
             check_invariants: bool = False) -> SimulationResult:
    """Process arrivals and expiries in time order on ``net`` (mutated in place).

    At equal times expiries go before arrivals, then lower request id first.
    Metrics are taken at every bucket boundary up to ``horizon``. Arrivals
    past the last boundary are ignored; expiries are still processed so
    every plan ends released.
    """
    if params is None:
        params = default_params(algorithm)
    if rng is None:
        rng = np.random.default_rng(0)
    if horizon is None:
        horizon = max((v.arrival_time for v in stream), default=0)
    by_id = {v.id: v for v in stream}
    queue = [(v.arrival_time, ARRIVAL, v.id) for v in stream]
    heapq.heapify(queue)
    plans = {}
    events = []
    records = []
    accepted = refused = 0
    rev_total = cost_total = 0
    quote_total = 0
    runtime_total = 0.0

    def process(t, kind, vid):
        nonlocal accepted, refused, rev_total, cost_total, quote_total, runtime_total
        vnr = by_id[vid]
        if kind == EXPIRY:
            release(net, plans.pop(vid))
            events.append(Event(t, "expiry", vid))
        else:
            start = time.perf_counter()
            if algorithm == "lbhga":
                plan = embed_lbhga(vnr, net, params, rng, retry_limit)
            else:
                plan = embed_tga(vnr, net, params, rng)
            ms = (time.perf_counter() - start) * 1000.0
            runtime_total += ms
            if plan is None:
                refused += 1
                events.append(Event(t, "arrival", vid, False, runtime_ms=ms))
            else:
                accepted += 1
                r, c = revenue(vnr), cost(plan, vnr)
                rev_total += r
                cost_total += c
                quote_total += plan.objective
                plans[vid] = plan
                heapq.heappush(queue, (t + vnr.lifetime, EXPIRY, vid))
                events.append(Event(t, "arrival", vid, True, r, c, plan.objective, ms, plan.node_map, plan.link_map))
        if check_invariants:
            problems = conservation_errors(net)
            if problems:
                raise AssertionError(f"conservation violated at t={t}: {problems[:3]}")

    n_buckets = max(1, math.ceil(horizon / bucket))
    for b in range(1, n_buckets + 1):
        end = b * bucket
        last = b == n_buckets
        while queue and (queue[0][0] < end or (last and queue[0][0] <= end)):
            process(*heapq.heappop(queue))
        records.append(MetricsRecord(
            bucket_end=end,
            link_load_variance=link_load_variance(net),
            revenue=rev_total,
            cost=cost_total,
            revenue_cost_ratio=_ratio(rev_total, cost_total),
            acceptance_ratio=_ratio(accepted, accepted + refused),
            avg_quotation=_ratio(quote_total, accepted),
            accepted=accepted,
            refused=refused,
            total_runtime_ms=runtime_total,
            avg_runtime_ms=_ratio(runtime_total, accepted),
            accept_refuse_ratio=_ratio(accepted, refused),
        ))
    while queue:
        t, kind, vid = heapq.heappop(queue)
        if kind == EXPIRY:
            process(t, kind, vid)
    return SimulationResult(algorithm, 0, records, events, net)


def run_simulation(substrate_cfg: SubstrateConfig, stream_cfg: VnrStreamConfig, algorithm: str, params=None,
                   seed: int = 0, retry_limit: int = 5, bucket: float = 100,
                   check_invariants: bool = False) -> SimulationResult:
    """Generate the seeded instance and simulate one algorithm on it."""
    net = generate_substrate(substrate_cfg, seed)
    stream = generate_vnr_stream(stream_cfg, seed)
    rng = rng_stream(seed, ALGORITHM)
    result = simulate(net, stream, algorithm, params, rng, horizon=stream_cfg.horizon, bucket=bucket,
                      retry_limit=retry_limit, check_invariants=check_invariants)
    result.seed = seed
    return result
