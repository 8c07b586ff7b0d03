import random

import pytest
from hypothesis import given, settings, strategies as st

from mdvne.errors import InsufficientBandwidth, InsufficientCpu, UnknownPlan
from mdvne.model import (
    EmbeddingPlan,
    VirtualNetworkRequest,
    allocate,
    conservation_errors,
    objective_value,
    release,
)

from conftest import make_net
from oracles import grid_net, random_plans


@pytest.fixture
def line_net():
    # 0 - 1 - 2 with link prices 1 and 5
    return make_net([(100, 3), (100, 2), (100, 1)], [(0, 1, 10, 1), (1, 2, 3, 5)])


def test_allocate_single_node(line_net):
    vnr = VirtualNetworkRequest(1, 0, 10, [5], [])
    plan = EmbeddingPlan.build(line_net, vnr, {0: 0}, {})
    allocate(line_net, plan)
    assert line_net.nodes[0].cpu_residual == 95


def test_allocate_insufficient_bandwidth_leaves_network_untouched(line_net):
    vnr = VirtualNetworkRequest(1, 0, 10, [1, 1], [(0, 1, 4)])
    plan = EmbeddingPlan.build(line_net, vnr, {0: 0, 1: 2}, {(0, 1): (0, 1, 2)})
    before = line_net.state()
    with pytest.raises(InsufficientBandwidth) as err:
        allocate(line_net, plan)
    assert err.value.link == (1, 2)
    assert line_net.state() == before
    assert not line_net.active


def test_allocate_insufficient_cpu_names_node(line_net):
    vnr = VirtualNetworkRequest(1, 0, 10, [101], [])
    plan = EmbeddingPlan.build(line_net, vnr, {0: 1}, {})
    with pytest.raises(InsufficientCpu) as err:
        allocate(line_net, plan)
    assert err.value.node == 1
    assert line_net.nodes[1].cpu_residual == 100


def test_shared_substrate_link_demands_add(line_net):
    # virtual triangle 0-1-2 with two virtual links both crossing link (0, 1)
    vnr = VirtualNetworkRequest(1, 0, 10, [1, 1, 1], [(0, 1, 2), (0, 2, 3)])
    plan = EmbeddingPlan.build(line_net, vnr, {0: 0, 1: 1, 2: 2}, {(0, 1): (0, 1), (0, 2): (0, 1, 2)})
    allocate(line_net, plan)
    # oracle: sum demand over every (virtual link, substrate link) incidence
    expected = sum(bw for (a, b), bw in plan.bw_demand.items() if (0, 1) in zip(plan.link_map[(a, b)], plan.link_map[(a, b)][1:]))
    assert expected == 5
    assert line_net.link(0, 1).bw_used == 5
    assert line_net.link(0, 1).bw_residual == 5


def test_release_restores_state(line_net):
    before = line_net.state()
    vnr = VirtualNetworkRequest(1, 0, 10, [3, 4], [(0, 1, 2)])
    plan = EmbeddingPlan.build(line_net, vnr, {0: 0, 1: 2}, {(0, 1): (0, 1, 2)})
    allocate(line_net, plan)
    assert line_net.state() != before
    release(line_net, plan)
    assert line_net.state() == before


def test_release_unknown_plan(line_net):
    vnr = VirtualNetworkRequest(7, 0, 10, [1], [])
    plan = EmbeddingPlan.build(line_net, vnr, {0: 0}, {})
    with pytest.raises(UnknownPlan):
        release(line_net, plan)


def test_interleaved_release_matches_replay(line_net):
    fresh = line_net.copy()
    v1 = VirtualNetworkRequest(1, 0, 10, [3, 4], [(0, 1, 2)])
    v2 = VirtualNetworkRequest(2, 0, 10, [5, 6], [(0, 1, 1)])
    p1 = EmbeddingPlan.build(line_net, v1, {0: 0, 1: 2}, {(0, 1): (0, 1, 2)})
    p2 = EmbeddingPlan.build(line_net, v2, {0: 1, 1: 0}, {(0, 1): (1, 0)})
    allocate(line_net, p1)
    allocate(line_net, p2)
    release(line_net, p1)
    allocate(fresh, p2)
    assert line_net.state() == fresh.state()


def test_objective_examples(line_net):
    single = VirtualNetworkRequest(1, 0, 1, [2], [])
    assert objective_value(line_net, EmbeddingPlan.build(line_net, single, {0: 0}, {})) == 6
    pair = VirtualNetworkRequest(1, 0, 1, [2, 0], [(0, 1, 4)])
    plan = EmbeddingPlan.build(line_net, pair, {0: 0, 1: 2}, {(0, 1): (0, 1, 2)})
    assert objective_value(line_net, plan) == 6 + 4 * (1 + 5) == 30
    empty = EmbeddingPlan(9, {}, {})
    assert objective_value(line_net, empty) == 0


def test_structurally_invalid_plan_rejected(line_net):
    vnr = VirtualNetworkRequest(1, 0, 10, [1, 1], [(0, 1, 1)])
    not_injective = EmbeddingPlan.build(line_net, vnr, {0: 0, 1: 0}, {})
    with pytest.raises(ValueError):
        allocate(line_net, not_injective)
    bad_path = EmbeddingPlan(1, {0: 0, 1: 2}, {(0, 1): (0, 2)}, {0: 1, 1: 1}, {(0, 1): 1})
    with pytest.raises(ValueError):
        allocate(line_net, bad_path)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_random_sequences_round_trip(seed):
    rng = random.Random(seed)
    net = grid_net()
    initial = net.state()
    active = []
    for plan in random_plans(net, rng, 12):
        if active and rng.random() < 0.4:
            release(net, active.pop(rng.randrange(len(active))))
        before = net.state()
        try:
            allocate(net, plan)
            active.append(plan)
        except (InsufficientCpu, InsufficientBandwidth):
            assert net.state() == before
        assert conservation_errors(net) == []
    for plan in active:
        release(net, plan)
    assert net.state() == initial
