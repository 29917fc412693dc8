"""JSON instance and design documents.

Probabilities are written as decimal (or ``p/q``) strings so that a
parse/serialize round trip is exact.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .disaster import DisasterError, DisasterZone
from .model import CNMDesign, Instance, Objective, Parameters
from .topology import PhysicalNetwork, TopologyError

INSTANCE_FORMAT = "cnm-instance/1"
DESIGN_FORMAT = "cnm-design/1"

_PARAM_KEYS = ("k", "q", "B", "latency_hops", "catalog_K", "controller_count")


class DocumentError(ValueError):
    """Malformed or inconsistent document."""


def fraction_text(value: Fraction | int) -> str:
    """Exact text for a rational: a terminating decimal when possible, else ``p/q``."""
    value = Fraction(value)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(value.numerator)
    scaled = value * 10**digits
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def _require(doc: dict, key: str, kind: type | tuple[type, ...]) -> Any:
    if key not in doc:
        raise DocumentError(f"missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise DocumentError(f"field {key!r} has wrong type")
    return value


def _node_pair(item: Any, what: str) -> tuple[int, int]:
    if (
        not isinstance(item, list)
        or len(item) != 2
        or not all(isinstance(x, int) and not isinstance(x, bool) for x in item)
    ):
        raise DocumentError(f"{what} must be a pair of node ids, got {item!r}")
    return item[0], item[1]


def instance_from_dict(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise DocumentError("instance document must be an object")
    fmt = doc.get("format", INSTANCE_FORMAT)
    if fmt != INSTANCE_FORMAT:
        raise DocumentError(f"unsupported format {fmt!r}")
    nodes, datacenters = [], []
    for entry in _require(doc, "nodes", list):
        if not isinstance(entry, dict):
            raise DocumentError(f"node entry must be an object, got {entry!r}")
        node_id = _require(entry, "id", int)
        nodes.append(node_id)
        if entry.get("datacenter", False):
            datacenters.append(node_id)
    links = [_node_pair(item, "link") for item in _require(doc, "links", list)]
    try:
        net = PhysicalNetwork.build(nodes, links, datacenters)
    except TopologyError as exc:
        raise DocumentError(str(exc)) from exc

    zones = []
    for entry in doc.get("disasters", []):
        if not isinstance(entry, dict):
            raise DocumentError(f"disaster entry must be an object, got {entry!r}")
        zone_id = str(_require(entry, "id", (str, int)))
        failed_nodes = entry.get("failed_nodes", [])
        if not isinstance(failed_nodes, list) or not all(isinstance(n, int) for n in failed_nodes):
            raise DocumentError(f"disaster {zone_id!r}: failed_nodes must be a list of node ids")
        try:
            zones.append(
                DisasterZone.build(
                    net,
                    zone_id,
                    [_node_pair(item, "failed link") for item in entry.get("failed_links", [])],
                    failed_nodes,
                    entry.get("p_occurrence", "1"),
                    entry.get("p_conditional", "1"),
                )
            )
        except DisasterError as exc:
            raise DocumentError(str(exc)) from exc
    ids = [z.id for z in zones]
    if len(set(ids)) != len(ids):
        raise DocumentError("duplicate disaster id")

    raw_params = doc.get("params", {})
    if not isinstance(raw_params, dict):
        raise DocumentError("params must be an object")
    unknown = set(raw_params) - set(_PARAM_KEYS)
    if unknown:
        raise DocumentError(f"unknown parameter(s) {sorted(unknown)}")
    try:
        params = Parameters(**raw_params)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"parameter out of range: {exc}") from exc
    metadata = doc.get("metadata", {})
    return Instance(net, tuple(zones), params, str(doc.get("name", "instance")), dict(metadata))


def parse_instance(text: str) -> Instance:
    """Parse and validate an instance document.

    Raises:
        DocumentError: malformed JSON, unknown ids, disconnected network or
            out-of-range parameters.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from exc
    return instance_from_dict(doc)


def instance_to_dict(instance: Instance) -> dict[str, Any]:
    net = instance.network
    p = instance.params
    return {
        "format": INSTANCE_FORMAT,
        "name": instance.name,
        "nodes": [{"id": n, "datacenter": n in net.datacenter_nodes} for n in net.nodes],
        "links": [list(link) for link in sorted(net.links)],
        "disasters": [
            {
                "id": z.id,
                "failed_nodes": sorted(z.failed_nodes),
                "failed_links": [list(link) for link in sorted(z.failed_links)],
                "p_occurrence": fraction_text(z.p_occurrence),
                "p_conditional": fraction_text(z.p_conditional),
            }
            for z in instance.zones
        ],
        "params": {key: getattr(p, key) for key in _PARAM_KEYS},
        "metadata": instance.metadata,
    }


def serialize_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def design_to_dict(
    instance: Instance,
    design: CNMDesign,
    objective: Objective | None = None,
    extra: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Serializable form of a design; ``extra`` carries solver metadata."""
    from .model import objective_value

    catalog = instance.catalog
    doc: dict[str, Any] = {"format": DESIGN_FORMAT, "instance": instance.name}
    if objective is not None:
        doc["objective"] = Objective(objective).value
    doc["risk"] = fraction_text(objective_value(instance, design, Objective.MIN_RISK))
    doc["resource"] = objective_value(instance, design, Objective.MIN_RESOURCE)
    if extra:
        doc.update(extra)
    doc["controllers"] = sorted(design.controllers)
    doc["virtual_links"] = [list(v) for v in sorted(design.virtual_links)]
    doc["assignment"] = [[i, f] for i, f in sorted(design.assignment.items())]
    doc["c2c_mapping"] = [
        {"link": [s, t], "path": idx, "nodes": list(catalog.path(s, t, idx).nodes)}
        for (s, t), idx in sorted(design.c2c_mapping.items())
    ]
    doc["s2c_mapping"] = [
        {"switch": i, "controller": f, "path": idx, "nodes": list(catalog.path(i, f, idx).nodes)}
        for (i, f), idx in sorted(design.s2c_mapping.items())
    ]
    return doc


def serialize_design(
    instance: Instance,
    design: CNMDesign,
    objective: Objective | None = None,
    extra: dict[str, Any] | None = None,
) -> str:
    return json.dumps(design_to_dict(instance, design, objective, extra), indent=2) + "\n"


def design_from_dict(doc: Any, instance: Instance | None = None) -> CNMDesign:
    """Rebuild a design; with ``instance`` given, path indices are cross-checked."""
    if not isinstance(doc, dict):
        raise DocumentError("design document must be an object")
    if doc.get("format", DESIGN_FORMAT) != DESIGN_FORMAT:
        raise DocumentError(f"unsupported format {doc.get('format')!r}")
    controllers = frozenset(_require(doc, "controllers", list))
    links = frozenset(tuple(sorted(_node_pair(v, "virtual link"))) for v in _require(doc, "virtual_links", list))
    assignment = dict(_node_pair(item, "assignment") for item in _require(doc, "assignment", list))
    c2c, s2c = {}, {}
    for entry in _require(doc, "c2c_mapping", list):
        key = _node_pair(entry.get("link"), "c2c link")
        c2c[key] = _require(entry, "path", int)
    for entry in _require(doc, "s2c_mapping", list):
        key = (_require(entry, "switch", int), _require(entry, "controller", int))
        s2c[key] = _require(entry, "path", int)
    design = CNMDesign(controllers, links, assignment, c2c, s2c)
    if instance is not None:
        catalog = instance.catalog
        for section, mapping, key_of in (
            ("c2c_mapping", c2c, lambda e: tuple(e["link"])),
            ("s2c_mapping", s2c, lambda e: (e["switch"], e["controller"])),
        ):
            for entry in doc[section]:
                if "nodes" not in entry:
                    continue
                key = key_of(entry)
                try:
                    path = catalog.path(*key, mapping[key])
                except (KeyError, IndexError) as exc:
                    raise DocumentError(f"{section} {key}: path index not in catalog") from exc
                if list(path.nodes) != entry["nodes"]:
                    raise DocumentError(f"{section} {key}: node list disagrees with catalog path")
    return design


def parse_design(text: str, instance: Instance | None = None) -> CNMDesign:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from exc
    return design_from_dict(doc, instance)
