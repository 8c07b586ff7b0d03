"""Plain-text (JSON) serialization of a generated substrate plus request stream."""
from __future__ import annotations

import json
from pathlib import Path

from .model import SubstrateLink, SubstrateNetwork, SubstrateNode, VirtualNetworkRequest

FORMAT = "mdvne-instance"
VERSION = 1


def instance_to_dict(net: SubstrateNetwork, stream, seed=None) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "seed": seed,
        "substrate": {
            "domain_count": net.domain_count,
            "nodes": [
                {"id": n.id, "domain": n.domain, "cpu": n.cpu_capacity, "price": n.cpu_unit_price}
                for n in net.nodes
            ],
            "links": [
                {"u": l.u, "v": l.v, "bw": l.bw_capacity, "price": l.bw_unit_price, "inter_domain": l.inter_domain}
                for l in net.links.values()
            ],
        },
        "vnrs": [
            {
                "id": v.id,
                "arrival_time": v.arrival_time,
                "lifetime": v.lifetime,
                "cpu": list(v.cpu),
                "links": [list(link) for link in v.links],
            }
            for v in stream
        ],
    }


def instance_from_dict(data: dict):
    if data.get("format") != FORMAT or data.get("version") != VERSION:
        raise ValueError(f"not a {FORMAT} v{VERSION} document")
    sub = data["substrate"]
    nodes = [SubstrateNode(n["id"], n["domain"], n["cpu"], n["cpu"], n["price"]) for n in sub["nodes"]]
    links = [SubstrateLink(l["u"], l["v"], l["bw"], l["bw"], l["price"], l["inter_domain"]) for l in sub["links"]]
    net = SubstrateNetwork(nodes, links, sub["domain_count"])
    stream = [
        VirtualNetworkRequest(v["id"], v["arrival_time"], v["lifetime"], list(v["cpu"]),
                              [tuple(link) for link in v["links"]])
        for v in data["vnrs"]
    ]
    return net, stream


def save_instance(path, net: SubstrateNetwork, stream, seed=None) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(json.dumps(instance_to_dict(net, stream, seed), indent=1) + "\n")
        tmp.replace(path)
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise OSError(exc.errno, f"cannot write instance to {path}: {exc.strerror}") from None


def load_instance(path):
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(exc.errno, f"cannot read instance {path}: {exc.strerror}") from None
    return instance_from_dict(data)
