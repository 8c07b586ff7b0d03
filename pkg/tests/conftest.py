import pytest

from mdvne.model import (
    EmbeddingPlan,
    SubstrateLink,
    SubstrateNetwork,
    SubstrateNode,
    VirtualNetworkRequest,
)

# Two-route instance: three domains, E->D->B->C cheap (aggregate price 6),
# E->F->D->B->C one unit dearer, E->F->H->G->C ten units dearer.
A, B, C, D, E, F, G, H = range(8)
ROUTE_DOMAINS = [0, 0, 0, 1, 1, 1, 2, 2]
ROUTE_LINKS = [
    (A, B, 2), (A, C, 3), (B, C, 1),
    (D, B, 1),
    (E, D, 4), (E, F, 1), (F, D, 4),
    (F, H, 5), (H, G, 5), (G, C, 5),
]


def make_net(node_rows, link_rows, domain_count=1):
    """node_rows: (cpu, price[, domain]); link_rows: (u, v, bw, price[, inter])."""
    nodes = []
    for i, row in enumerate(node_rows):
        cpu, price = row[0], row[1]
        domain = row[2] if len(row) > 2 else 0
        nodes.append(SubstrateNode(i, domain, cpu, cpu, price))
    links = []
    for row in link_rows:
        u, v, bw, price = row[:4]
        inter = row[4] if len(row) > 4 else False
        links.append(SubstrateLink(u, v, bw, bw, price, inter))
    return SubstrateNetwork(nodes, links, domain_count)


def make_route_net(bw=100):
    nodes = [(100, 1, d) for d in ROUTE_DOMAINS]
    links = [(u, v, bw, p, ROUTE_DOMAINS[u] != ROUTE_DOMAINS[v]) for u, v, p in ROUTE_LINKS]
    return make_net(nodes, links, domain_count=3)


def single_link_plan(net, vnr_id, path, bw, cpu=1):
    vnr = VirtualNetworkRequest(vnr_id, 0, 1, [cpu, cpu], [(0, 1, bw)])
    return EmbeddingPlan.build(net, vnr, {0: path[0], 1: path[-1]}, {(0, 1): tuple(path)})


def congest_route_net(net):
    """Load E-D with 60 units and D-B, B-C with 20 (20 of it along E-D-B-C)."""
    from mdvne.model import allocate

    allocate(net, single_link_plan(net, "bg1", (E, D), 40))
    allocate(net, single_link_plan(net, "bg2", (E, D, B, C), 20))
    return net


@pytest.fixture
def route_net():
    return make_route_net()


# Acceptance reporting: tests marked ``criterion(label, text)`` get one summary line each.
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, text): acceptance criterion covered by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label, text = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        _CRITERIA[label] = (text, report.outcome == "passed", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")

    def sort_key(label):
        return (int("".join(c for c in label if c.isdigit())), label)

    for label in sorted(_CRITERIA, key=sort_key):
        text, ok, detail = _CRITERIA[label]
        line = f"criterion {label}: {'PASS' if ok else 'FAIL'}  {text}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
