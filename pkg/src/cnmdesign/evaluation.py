"""Post-disaster impact of a design and the controller-count sweep."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Sequence

import networkx as nx

from .disaster import DisasterZone, path_survives
from .model import CNMDesign, Instance, Objective, resource_usage, virtual_path
from .solver import BudgetExhausted, Infeasible, SolverConfig, solve
from .topology import NodeId, bfs_distances

AGGREGATE_ID = "ALL"

CSV_COLUMNS = (
    "objective",
    "controllers",
    "disaster_id",
    "failed_controllers",
    "failed_c2c",
    "failed_s2c",
    "disconnected_switches_raw",
    "disconnected_switches_after_reassign",
    "islanded",
    "resource_links",
)


@dataclass(frozen=True)
class DisruptionReport:
    disaster_id: str
    failed_controllers: tuple[NodeId, ...]
    failed_c2c_channels: int
    failed_s2c_channels: int
    disconnected_switches_raw: int
    disconnected_switches_after_reassign: int
    islanded: bool

    @property
    def disruptions(self) -> int:
        """Failed switch-controller channels plus failed controller nodes."""
        return len(self.failed_controllers) + self.failed_s2c_channels


def simulate(instance: Instance, design: CNMDesign, zone: DisasterZone | str) -> DisruptionReport:
    """Fail every element of ``zone`` and count what the control plane loses.

    Channels with a failed endpoint are not counted as disrupted; a switch
    whose controller died is still counted as disconnected. A disconnected
    switch is rescued when some surviving controller within the hop limit of
    the damaged network has spare capacity.
    """
    if isinstance(zone, str):
        zone = instance.disasters.zone(zone)
    catalog, params = instance.catalog, instance.params
    dead = zone.failed_nodes
    ctrl = design.controllers
    alive_ctrl = sorted(f for f in ctrl if f not in dead)

    c2c_alive = []
    failed_c2c = 0
    for (s, t), path in design.c2c_paths(catalog).items():
        if path_survives(path, zone):
            c2c_alive.append((s, t))
        elif s not in dead and t not in dead:
            failed_c2c += 1

    failed_s2c = 0
    stranded = []
    load = {f: 0 for f in alive_ctrl}
    for i, f in sorted(design.assignment.items()):
        if i in dead:
            continue
        if i == f:
            if f in load:
                load[f] += 1
            continue
        path = catalog.path(i, f, design.s2c_mapping[(i, f)])
        if path_survives(path, zone):
            load[f] += 1
            continue
        if f not in dead:
            failed_s2c += 1
        stranded.append(i)

    rescued = _reassign(instance, zone, stranded, {f: params.B - n for f, n in load.items()})
    islanded = any(
        virtual_path(alive_ctrl, c2c_alive, s, t) is None
        for s, t in zip(alive_ctrl, alive_ctrl[1:])
    )
    return DisruptionReport(
        zone.id,
        tuple(sorted(ctrl & dead)),
        failed_c2c,
        failed_s2c,
        len(stranded),
        len(stranded) - rescued,
        islanded,
    )


def surviving_adjacency(instance: Instance, zone: DisasterZone) -> dict[NodeId, list[NodeId]]:
    adj: dict[NodeId, list[NodeId]] = {n: [] for n in instance.network.nodes if n not in zone.failed_nodes}
    for a, b in sorted(instance.network.links - zone.failed_links):
        if a in adj and b in adj:
            adj[a].append(b)
            adj[b].append(a)
    return adj


def _reassign(
    instance: Instance, zone: DisasterZone, stranded: list[NodeId], spare: dict[NodeId, int]
) -> int:
    """Maximum number of stranded switches re-homed on surviving controllers."""
    if not stranded:
        return 0
    adj = surviving_adjacency(instance, zone)
    limit = instance.params.latency_hops
    g = nx.DiGraph()
    for f, room in sorted(spare.items()):
        if room <= 0:
            continue
        dist = bfs_distances(adj, f)
        g.add_edge(("c", f), "sink", capacity=room)
        for i in stranded:
            if dist.get(i, limit + 1) <= limit:
                g.add_edge("src", ("s", i), capacity=1)
                g.add_edge(("s", i), ("c", f), capacity=1)
    if "src" not in g or "sink" not in g:
        return 0
    return int(nx.maximum_flow_value(g, "src", "sink"))


@dataclass(frozen=True)
class SweepRow:
    objective: str
    controllers: int
    disaster_id: str
    failed_controllers: int
    failed_c2c: int
    failed_s2c: int
    disconnected_switches_raw: int
    disconnected_switches_after_reassign: int
    islanded: bool
    resource_links: int

    @property
    def disruptions(self) -> int:
        return self.failed_controllers + self.failed_s2c


@dataclass(frozen=True)
class AbsentRow:
    objective: str
    controllers: int
    reason: str


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    absent: list[AbsentRow] = field(default_factory=list)
    designs: dict[tuple[str, int], CNMDesign] = field(default_factory=dict)


def _row(objective: str, count: int, report: DisruptionReport, resource: int) -> SweepRow:
    return SweepRow(
        objective,
        count,
        report.disaster_id,
        len(report.failed_controllers),
        report.failed_c2c_channels,
        report.failed_s2c_channels,
        report.disconnected_switches_raw,
        report.disconnected_switches_after_reassign,
        report.islanded,
        resource,
    )


def sweep(
    instance: Instance,
    objectives: Iterable[Objective | str],
    controller_range: Iterable[int],
    worker_count: int = 1,
    node_budget: int = 2_000_000,
) -> SweepResult:
    """Solve for each (objective, forced controller count) and simulate every zone.

    Infeasible counts are reported in ``absent`` and the sweep continues.
    An aggregate ``ALL`` row is added when the instance has several zones.
    """
    result = SweepResult()
    counts = sorted(set(controller_range))
    for objective in objectives:
        objective = Objective(objective)
        for count in counts:
            config = SolverConfig(objective, count, node_budget, worker_count)
            try:
                outcome = solve(instance, config)
            except Infeasible as exc:
                result.absent.append(AbsentRow(objective.value, count, f"{exc.family} infeasible"))
                continue
            except BudgetExhausted:
                result.absent.append(AbsentRow(objective.value, count, "budget exhausted"))
                continue
            design = outcome.design
            result.designs[(objective.value, count)] = design
            resource = resource_usage(design, instance.catalog)
            reports = [simulate(instance, design, z) for z in instance.zones]
            rows = [_row(objective.value, count, r, resource) for r in reports]
            result.rows.extend(rows)
            if len(rows) > 1:
                result.rows.append(aggregate(rows))
    return result


def aggregate(rows: Sequence[SweepRow]) -> SweepRow:
    """Sum the per-zone counts of one (objective, count) design."""
    first = rows[0]
    return SweepRow(
        first.objective,
        first.controllers,
        AGGREGATE_ID,
        sum(r.failed_controllers for r in rows),
        sum(r.failed_c2c for r in rows),
        sum(r.failed_s2c for r in rows),
        sum(r.disconnected_switches_raw for r in rows),
        sum(r.disconnected_switches_after_reassign for r in rows),
        any(r.islanded for r in rows),
        first.resource_links,
    )


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        values = asdict(row)
        writer.writerow(
            [str(values[c]).lower() if isinstance(values[c], bool) else values[c] for c in CSV_COLUMNS]
        )
    return buf.getvalue()


def rows_from_csv(text: str) -> list[SweepRow]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    rows = []
    for rec in reader:
        kwargs = {}
        for f in fields(SweepRow):
            raw = rec[f.name]
            if f.name in ("objective", "disaster_id"):
                kwargs[f.name] = raw
            elif f.name == "islanded":
                if raw not in ("true", "false"):
                    raise ValueError(f"bad islanded value {raw!r}")
                kwargs[f.name] = raw == "true"
            else:
                kwargs[f.name] = int(raw)
        rows.append(SweepRow(**kwargs))
    return rows


def render_report(rows: Sequence[SweepRow], fmt: str = "csv") -> str:
    """Render sweep rows as CSV text or as an SVG document with two line charts."""
    if not rows:
        raise ValueError("no rows to render")
    if fmt == "csv":
        return rows_to_csv(rows)
    if fmt == "svg":
        from .plotting import sweep_figure_svg

        return sweep_figure_svg(rows)
    raise ValueError(f"unknown report format {fmt!r}")
