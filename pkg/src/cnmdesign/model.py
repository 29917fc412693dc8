"""Problem instance, design data model, objectives and the feasibility checker.

Constraint ids used in reports:

=====  =====================================================================
C1     every switch sees at least ``k`` active controllers in its island
Cq     at least ``q`` controllers (exactly the forced count when one is set)
C3     switches per controller, host included, at most ``B``
C4     controller hosts are assigned to their own controller
C5     assignments and switch-controller paths respect the hop limit
C6     assignment targets are active controllers
C7     virtual links join active controllers only
C8     two virtual-link-disjoint virtual paths between every controller pair
C10    every virtual link and channel mapped to exactly one catalog path
C19    after each zone, surviving controllers stay virtually connected
=====  =====================================================================
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable

import networkx as nx

from .disaster import DisasterModel, DisasterZone, design_risk, path_survives
from .topology import Link, NodeId, Path, PathCatalog, PhysicalNetwork, build_catalog

CONSTRAINT_IDS = ("C1", "Cq", "C3", "C4", "C5", "C6", "C7", "C8", "C10", "C19")


class Objective(str, enum.Enum):
    MIN_RISK = "min-risk"
    MIN_RESOURCE = "min-resource"


class StructuralError(ValueError):
    """The design does not even describe a well-formed solution."""


@dataclass(frozen=True)
class Parameters:
    k: int = 1
    q: int = 1
    B: int = 1
    latency_hops: int = 3
    catalog_K: int = 4
    controller_count: int | None = None

    def __post_init__(self) -> None:
        for name in ("k", "q", "B", "catalog_K"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"parameter {name} must be an integer >= 1, got {value!r}")
        if not isinstance(self.latency_hops, int) or self.latency_hops < 0:
            raise ValueError(f"parameter latency_hops must be >= 0, got {self.latency_hops!r}")
        if self.controller_count is not None and (
            not isinstance(self.controller_count, int) or self.controller_count < 1
        ):
            raise ValueError(f"controller_count must be >= 1, got {self.controller_count!r}")


@dataclass(frozen=True)
class Instance:
    network: PhysicalNetwork
    zones: tuple[DisasterZone, ...]
    params: Parameters
    name: str = "instance"
    metadata: dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @cached_property
    def catalog(self) -> PathCatalog:
        return build_catalog(self.network, self.params.catalog_K, self.params.latency_hops)

    @cached_property
    def disasters(self) -> DisasterModel:
        return DisasterModel(self.zones)

    def with_params(self, **changes: Any) -> Instance:
        from dataclasses import replace

        return replace(self, params=replace(self.params, **changes))


@dataclass
class CNMDesign:
    """A complete control-plane design.

    ``s2c_mapping`` is keyed by ``(switch, controller)`` and indexes
    ``catalog.paths(switch, controller)``; ``c2c_mapping`` is keyed by the
    sorted controller pair and indexes ``catalog.paths(s, t)`` with ``s < t``.
    """

    controllers: frozenset[NodeId]
    virtual_links: frozenset[Link]
    assignment: dict[NodeId, NodeId]
    c2c_mapping: dict[Link, int]
    s2c_mapping: dict[tuple[NodeId, NodeId], int]

    def channels(self) -> list[tuple[NodeId, NodeId]]:
        """Non-self assignment pairs ``(switch, controller)``."""
        return sorted((i, f) for i, f in self.assignment.items() if i != f)

    def c2c_paths(self, catalog: PathCatalog) -> dict[Link, Path]:
        return {key: catalog.path(*key, idx) for key, idx in sorted(self.c2c_mapping.items())}

    def s2c_paths(self, catalog: PathCatalog) -> dict[tuple[NodeId, NodeId], Path]:
        return {key: catalog.path(*key, idx) for key, idx in sorted(self.s2c_mapping.items())}

    def mapped_paths(self, catalog: PathCatalog) -> list[Path]:
        return list(self.c2c_paths(catalog).values()) + list(self.s2c_paths(catalog).values())

    def canonical(self) -> tuple:
        return (
            tuple(sorted(self.controllers)),
            tuple(sorted(self.virtual_links)),
            tuple(sorted(self.assignment.items())),
            tuple(sorted(self.c2c_mapping.items())),
            tuple(sorted(self.s2c_mapping.items())),
        )


def resource_usage(design: CNMDesign, catalog: PathCatalog) -> int:
    """Total physical hops used by all mapped channels, each counted once."""
    return sum(p.length for p in design.mapped_paths(catalog))


def objective_value(instance: Instance, design: CNMDesign, objective: Objective) -> Fraction | int:
    if Objective(objective) is Objective.MIN_RISK:
        return design_risk(design, instance.catalog, instance.disasters)
    return resource_usage(design, instance.catalog)


def validate_structure(instance: Instance, design: CNMDesign) -> None:
    """Raise :class:`StructuralError` unless ``design`` is well formed for ``instance``."""
    net, catalog = instance.network, instance.catalog
    nodes = set(net.nodes)
    if not design.controllers:
        raise StructuralError("design has no controllers")
    stray = set(design.controllers) - net.datacenter_nodes
    if stray:
        raise StructuralError(f"controllers {sorted(stray)} are not datacenter nodes")
    if set(design.assignment) != nodes:
        missing = sorted(nodes - set(design.assignment))
        extra = sorted(set(design.assignment) - nodes)
        raise StructuralError(f"assignment must cover every node (missing {missing}, unknown {extra})")
    bad_targets = sorted(f for f in design.assignment.values() if f not in nodes)
    if bad_targets:
        raise StructuralError(f"assignment targets unknown nodes {bad_targets}")
    for s, t in design.virtual_links:
        if s not in nodes or t not in nodes or s >= t:
            raise StructuralError(f"virtual link ({s}, {t}) is not a sorted pair of distinct nodes")
    for (s, t), idx in design.c2c_mapping.items():
        if s not in nodes or t not in nodes or s >= t:
            raise StructuralError(f"c2c mapping key ({s}, {t}) is not a sorted node pair")
        if not 0 <= idx < len(catalog.paths(s, t)):
            raise StructuralError(f"c2c mapping ({s}, {t}) uses path {idx} absent from the catalog")
    for (i, f), idx in design.s2c_mapping.items():
        if i not in nodes or f not in nodes or i == f:
            raise StructuralError(f"s2c mapping key ({i}, {f}) is not a pair of distinct nodes")
        if not 0 <= idx < len(catalog.paths(i, f)):
            raise StructuralError(f"s2c mapping ({i}, {f}) uses path {idx} absent from the catalog")


@dataclass(frozen=True)
class Violation:
    constraint: str
    detail: str
    elements: tuple = ()

    def to_dict(self) -> dict[str, Any]:
        return {"constraint": self.constraint, "detail": self.detail, "elements": _jsonable(self.elements)}


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [_jsonable(x) for x in obj]
        return sorted(items, key=repr) if isinstance(obj, (set, frozenset)) else items
    return obj


@dataclass
class FeasibilityReport:
    violations: list[Violation] = field(default_factory=list)
    survivability_witnesses: dict[tuple[str, NodeId, NodeId], tuple[NodeId, ...]] = field(
        default_factory=dict
    )
    disjoint_path_witnesses: dict[tuple[NodeId, NodeId], tuple[tuple[NodeId, ...], ...]] = field(
        default_factory=dict
    )

    @property
    def feasible(self) -> bool:
        return not self.violations

    def violated(self) -> set[str]:
        return {v.constraint for v in self.violations}

    def add(self, constraint: str, detail: str, *elements: Any) -> None:
        self.violations.append(Violation(constraint, detail, tuple(elements)))

    def to_dict(self) -> dict[str, Any]:
        return {
            "feasible": self.feasible,
            "violated": sorted(self.violated(), key=CONSTRAINT_IDS.index),
            "violations": [v.to_dict() for v in self.violations],
            "survivability_witnesses": [
                {"disaster": y, "pair": [s, t], "virtual_path": list(path)}
                for (y, s, t), path in sorted(self.survivability_witnesses.items())
            ],
            "disjoint_path_witnesses": [
                {"pair": [s, t], "virtual_paths": [list(p) for p in paths]}
                for (s, t), paths in sorted(self.disjoint_path_witnesses.items())
            ],
        }


def virtual_path(
    controllers: Iterable[NodeId], links: Iterable[Link], s: NodeId, t: NodeId
) -> tuple[NodeId, ...] | None:
    """Shortest virtual path from ``s`` to ``t`` over ``links`` (BFS), or None."""
    adj: dict[NodeId, list[NodeId]] = {c: [] for c in controllers}
    for a, b in sorted(links):
        if a in adj and b in adj:
            adj[a].append(b)
            adj[b].append(a)
    if s not in adj or t not in adj:
        return None
    parent = {s: s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if u == t:
            out = [t]
            while out[-1] != s:
                out.append(parent[out[-1]])
            return tuple(reversed(out))
        for v in adj[u]:
            if v not in parent:
                parent[v] = u
                queue.append(v)
    return None


def two_disjoint_virtual_paths(
    controllers: Iterable[NodeId], links: Iterable[Link], s: NodeId, t: NodeId
) -> tuple[tuple[NodeId, ...], ...] | None:
    """Two virtual-link-disjoint paths via unit-capacity max flow, or None."""
    g = nx.Graph()
    g.add_nodes_from(sorted(controllers))
    g.add_edges_from(sorted(links))
    flow = nx.DiGraph()
    for a, b in g.edges:
        flow.add_edge(a, b, capacity=1)
        flow.add_edge(b, a, capacity=1)
    if s not in flow or t not in flow or nx.maximum_flow_value(flow, s, t) < 2:
        return None
    paths = list(itertools.islice(nx.edge_disjoint_paths(g, s, t), 2))
    return tuple(tuple(p) for p in paths)


def check_feasibility(instance: Instance, design: CNMDesign) -> FeasibilityReport:
    """List every constraint the design violates.

    Raises:
        StructuralError: if the design is not well formed (checked first).
    """
    validate_structure(instance, design)
    net, catalog, params = instance.network, instance.catalog, instance.params
    report = FeasibilityReport()
    ctrl = design.controllers

    for i in net.nodes:
        seen = sum(1 for f in ctrl if catalog.reach(i, f))
        if seen < params.k:
            report.add("C1", f"switch {i} sees {seen} controller(s) in its island, needs {params.k}", i)

    if len(ctrl) < params.q:
        report.add("Cq", f"{len(ctrl)} controller(s) active, at least {params.q} required")
    if params.controller_count is not None and len(ctrl) != params.controller_count:
        report.add("Cq", f"{len(ctrl)} controller(s) active, exactly {params.controller_count} forced")

    for f in sorted(ctrl):
        load = sum(1 for target in design.assignment.values() if target == f)
        if load > params.B:
            report.add("C3", f"controller {f} manages {load} switches, capacity {params.B}", f)
        if design.assignment[f] != f:
            report.add("C4", f"controller host {f} is assigned to {design.assignment[f]}", f)

    for i, f in sorted(design.assignment.items()):
        if i == f:
            if f not in ctrl:
                report.add("C6", f"switch {i} is self-assigned but hosts no controller", i)
            continue
        if f not in ctrl:
            report.add("C6", f"switch {i} assigned to {f}, which hosts no controller", i, f)
        if i in ctrl:
            report.add("C6", f"controller host {i} assigned away to {f}", i, f)
        if not catalog.reach(i, f):
            report.add("C5", f"switch {i} assigned to {f} outside its reachability island", i, f)
        idx = design.s2c_mapping.get((i, f))
        if idx is not None and catalog.path(i, f, idx).length > params.latency_hops:
            path = catalog.path(i, f, idx)
            report.add("C5", f"channel {i}->{f} uses a {path.length}-hop path", i, f, idx)

    for s, t in sorted(design.virtual_links):
        if s not in ctrl or t not in ctrl:
            report.add("C7", f"virtual link ({s}, {t}) has a non-controller endpoint", s, t)

    mesh = sorted((s, t) for s, t in design.virtual_links if s in ctrl and t in ctrl)
    for s, t in itertools.combinations(sorted(ctrl), 2):
        witness = two_disjoint_virtual_paths(ctrl, mesh, s, t)
        if witness is None:
            report.add("C8", f"fewer than two link-disjoint virtual paths between {s} and {t}", s, t)
        else:
            report.disjoint_path_witnesses[(s, t)] = witness

    expected_channels = set(design.channels())
    if set(design.c2c_mapping) != set(design.virtual_links):
        unmapped = sorted(set(design.virtual_links) - set(design.c2c_mapping))
        extra = sorted(set(design.c2c_mapping) - set(design.virtual_links))
        report.add("C10", f"virtual links unmapped {unmapped}, mappings without link {extra}", *unmapped, *extra)
    if set(design.s2c_mapping) != expected_channels:
        unmapped = sorted(expected_channels - set(design.s2c_mapping))
        extra = sorted(set(design.s2c_mapping) - expected_channels)
        report.add("C10", f"channels unmapped {unmapped}, mappings without channel {extra}", *unmapped, *extra)

    c2c = {key: catalog.path(*key, idx) for key, idx in design.c2c_mapping.items() if key in mesh}
    for zone in instance.zones:
        alive = sorted(f for f in ctrl if f not in zone.failed_nodes)
        surviving = [key for key, p in c2c.items() if path_survives(p, zone)]
        for s, t in itertools.combinations(alive, 2):
            witness = virtual_path(alive, surviving, s, t)
            if witness is None:
                report.add("C19", f"controllers {s} and {t} disconnected after disaster {zone.id}", zone.id, s, t)
            else:
                report.survivability_witnesses[(zone.id, s, t)] = witness
    return report
