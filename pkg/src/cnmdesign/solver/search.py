"""Exact staged search for the control-network-mapping problem.

For a fixed controller set the problem splits in two independent parts:
the switch assignment (a capacitated min-cost assignment, solved with
network simplex) and the controller mesh with its path mapping (solved by
branch and bound). Controller sets are enumerated exhaustively.

All costs are integers. Risks are scaled by the common denominator of the
zones' failure probabilities; for the risk objective, path length is
folded in as a strictly secondary term so that among risk-optimal designs
the one using fewer links wins.
"""

from __future__ import annotations

import enum
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from ..model import CNMDesign, Instance, Objective, objective_value
from ..topology import NodeId

MAX_CANDIDATE_SITES = 16

# Stage order; when every controller set fails, the deepest stage is reported.
_STAGES = ("Cq", "C1", "C3", "C8", "C19")


class Proof(str, enum.Enum):
    OPTIMAL = "optimal"
    BUDGET_EXHAUSTED = "budget-exhausted"


class Infeasible(Exception):
    def __init__(self, family: str, detail: str = "") -> None:
        super().__init__(f"{family} infeasible" + (f": {detail}" if detail else ""))
        self.family = family
        self.detail = detail


class BudgetExhausted(Exception):
    """Node budget ran out before any feasible design was found."""


class SolverLimitError(ValueError):
    """Instance too large for exhaustive controller-set enumeration."""


@dataclass(frozen=True)
class SolverConfig:
    objective: Objective = Objective.MIN_RISK
    controller_count: int | tuple[int, int] | None = None
    node_budget: int = 2_000_000
    worker_count: int = 1

    def __post_init__(self) -> None:
        if self.node_budget < 1:
            raise ValueError("node_budget must be >= 1")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")


@dataclass
class SolveStats:
    nodes_explored: int = 0
    subsets_enumerated: int = 0
    wall_time: float = 0.0


@dataclass
class SolveOutcome:
    design: CNMDesign
    objective_value: Fraction | int
    proof: Proof
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def optimal(self) -> bool:
        return self.proof is Proof.OPTIMAL


@dataclass
class _SubsetResult:
    subset: tuple[NodeId, ...]
    cost: int | None = None
    assignment: dict[NodeId, tuple[NodeId, int]] = field(default_factory=dict)
    mesh: dict[tuple[NodeId, NodeId], int] = field(default_factory=dict)
    nodes: int = 0
    exhausted: bool = False
    failed: str | None = None


class _Costs:
    """Integer path costs for one objective."""

    def __init__(self, instance: Instance, objective: Objective) -> None:
        self.instance = instance
        self.objective = Objective(objective)
        zones = instance.zones
        self.scale = math.lcm(*(z.p_fail.denominator for z in zones)) if zones else 1
        n = len(instance.network.nodes)
        f = len(instance.network.datacenter_nodes)
        self.weight = (f * (f - 1) // 2 + n) * max(n, 1) + 1
        self._cache: dict[tuple[NodeId, ...], int] = {}

    def path_cost(self, path) -> int:
        cost = self._cache.get(path.nodes)
        if cost is None:
            if self.objective is Objective.MIN_RESOURCE:
                cost = path.length
            else:
                model = self.instance.disasters
                risk = sum(
                    z.p_fail * self.scale
                    for z, hit in zip(model.zones, model.affected(path))
                    if hit
                )
                cost = int(risk) * self.weight + path.length
            self._cache[path.nodes] = cost
        return cost


class _Search:
    def __init__(self, instance: Instance, objective: Objective, budget: int) -> None:
        self.instance = instance
        self.costs = _Costs(instance, objective)
        self.budget = budget
        self.catalog = instance.catalog
        self.model = instance.disasters

    # -- stage 2: switch assignment -------------------------------------------
    def best_channel(self, i: NodeId, f: NodeId) -> tuple[int, int] | None:
        """(cost, path index) of the cheapest latency-compliant path ``i -> f``."""
        limit = self.instance.params.latency_hops
        best = None
        for idx, path in enumerate(self.catalog.paths(i, f)):
            if path.length > limit:
                continue
            cand = (self.costs.path_cost(path), idx)
            if best is None or cand < best:
                best = cand
        return best

    def assign(self, subset: tuple[NodeId, ...]) -> tuple[int, dict] | None:
        params = self.instance.params
        chosen = set(subset)
        switches = [i for i in self.instance.network.nodes if i not in chosen]
        if not switches:
            return 0, {}
        if len(switches) > len(subset) * (params.B - 1):
            return None
        g = nx.DiGraph()
        g.add_node("src", demand=-len(switches))
        g.add_node("sink", demand=len(switches))
        options: dict[tuple[NodeId, NodeId], tuple[int, int]] = {}
        for i in switches:
            g.add_edge("src", ("s", i), capacity=1, weight=0)
            for f in subset:
                if not self.catalog.reach(i, f):
                    continue
                best = self.best_channel(i, f)
                if best is None:
                    continue
                options[(i, f)] = best
                g.add_edge(("s", i), ("c", f), capacity=1, weight=best[0])
        for f in subset:
            g.add_edge(("c", f), "sink", capacity=params.B - 1, weight=0)
        try:
            total, flow = nx.network_simplex(g)
        except nx.NetworkXUnfeasible:
            return None
        assignment = {}
        for i in switches:
            for node, units in flow[("s", i)].items():
                if units:
                    f = node[1]
                    assignment[i] = (f, options[(i, f)][1])
        return total, assignment

    # -- stage 3: controller mesh and its mapping -----------------------------
    def mesh(self, subset: tuple[NodeId, ...]) -> _MeshSearch:
        return _MeshSearch(self, subset)

    def solve_subset(self, subset: tuple[NodeId, ...]) -> _SubsetResult:
        result = _SubsetResult(subset)
        assigned = self.assign(subset)
        if assigned is None:
            result.failed = "C3"
            return result
        assign_cost, assignment = assigned
        search = self.mesh(subset)
        search.run()
        result.nodes = search.nodes
        result.exhausted = search.exhausted
        if search.best is None:
            result.failed = search.failure
            return result
        result.cost = assign_cost + search.best_cost
        result.assignment = assignment
        result.mesh = search.best
        return result


def _two_edge_connected(m: int, edges: list[tuple[int, int]]) -> bool:
    """Bridgeless and connected on vertices ``0..m-1`` (Tarjan bridge search)."""
    if m <= 1:
        return True
    adj: list[list[tuple[int, int]]] = [[] for _ in range(m)]
    for eid, (a, b) in enumerate(edges):
        adj[a].append((b, eid))
        adj[b].append((a, eid))
    disc = [-1] * m
    low = [0] * m
    counter = 0
    stack = [(0, -1, iter(adj[0]))]
    disc[0] = low[0] = 0
    counter = 1
    while stack:
        u, parent_edge, it = stack[-1]
        advanced = False
        for v, eid in it:
            if eid == parent_edge:
                continue
            if disc[v] == -1:
                disc[v] = low[v] = counter
                counter += 1
                stack.append((v, eid, iter(adj[v])))
                advanced = True
                break
            low[u] = min(low[u], disc[v])
        if not advanced:
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[u])
                if low[u] > disc[p]:
                    return False
    return counter == m


def _connected(nodes_mask: int, edges: list[tuple[int, int]]) -> bool:
    """Whether the vertices in ``nodes_mask`` are connected using ``edges``."""
    if nodes_mask & (nodes_mask - 1) == 0:
        return True
    start = nodes_mask & -nodes_mask
    seen = start
    changed = True
    while changed:
        changed = False
        for a, b in edges:
            ba, bb = 1 << a, 1 << b
            if (seen & ba) and not (seen & bb):
                seen |= bb
                changed = True
            elif (seen & bb) and not (seen & ba):
                seen |= ba
                changed = True
    return seen & nodes_mask == nodes_mask


def _mst_weight(nodes_mask: int, weighted: list[tuple[int, int, int]]) -> int:
    """Kruskal over the vertex set ``nodes_mask``; caller guarantees connectivity."""
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    total = 0
    for w, a, b in sorted(weighted):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            total += w
    return total


class _MeshSearch:
    """Branch and bound over (virtual link present?, which catalog path)."""

    def __init__(self, search: _Search, subset: tuple[NodeId, ...]) -> None:
        self.subset = subset
        self.m = m = len(subset)
        self.budget = search.budget
        model, catalog = search.model, search.catalog
        self.pairs = list(itertools.combinations(range(m), 2))
        self.options: list[list[tuple[int, int, int]]] = []
        for a, b in self.pairs:
            opts = [
                (search.costs.path_cost(p), idx, model.survival_mask(p))
                for idx, p in enumerate(catalog.paths(subset[a], subset[b]))
            ]
            self.options.append(sorted(opts))
        self.min_cost = [opts[0][0] for opts in self.options]
        full = (1 << m) - 1
        self.zones: list[tuple[int, int]] = []
        for y, zone in enumerate(model.zones):
            alive = full
            for local, node in enumerate(subset):
                if node in zone.failed_nodes:
                    alive &= ~(1 << local)
            if alive & (alive - 1):
                self.zones.append((y, alive))
        self.min_surv = [
            {
                y: min((c for c, _, mask in opts if mask >> y & 1), default=None)
                for y, _ in self.zones
            }
            for opts in self.options
        ]
        self.incident = [[p for p, (a, b) in enumerate(self.pairs) if v in (a, b)] for v in range(m)]
        self.choice: list[tuple[int, int, int] | None] = [None] * len(self.pairs)
        self.deg = [0] * m
        self.best: dict[tuple[NodeId, NodeId], int] | None = None
        self.best_cost = 0
        self.nodes = 0
        self.exhausted = False
        self.failure = "C19"

    def run(self) -> None:
        if self.m == 1:
            self.best, self.best_cost, self.nodes = {}, 0, 1
            return
        if not _two_edge_connected(self.m, self.pairs):
            self.failure = "C8"
            return
        if not all(self._zone_ok(y, alive, 0) for y, alive in self.zones):
            self.failure = "C19"
            return
        self._bound = math.inf
        self._dfs(0, 0)

    def _optimistic_edges(self, idx: int) -> list[tuple[int, int]]:
        return [
            self.pairs[p]
            for p in range(len(self.pairs))
            if p >= idx or self.choice[p] is not None
        ]

    def _zone_ok(self, y: int, alive: int, idx: int) -> bool:
        edges = []
        for p in range(len(self.pairs)):
            if p >= idx:
                if self.min_surv[p][y] is None:
                    continue
            else:
                opt = self.choice[p]
                if opt is None or not opt[2] >> y & 1:
                    continue
            edges.append(self.pairs[p])
        return _connected(alive, edges)

    def _lower_bound(self, idx: int) -> int:
        # every controller needs two incident links; an undecided link can
        # serve both endpoints, hence the halved sum
        deg_sum = deg_max = 0
        for v in range(self.m):
            need = 2 - self.deg[v]
            if need > 0:
                avail = sorted(self.min_cost[p] for p in self.incident[v] if p >= idx)
                extra = sum(avail[:need])
                deg_sum += extra
                deg_max = max(deg_max, extra)
        bound = max((deg_sum + 1) // 2, deg_max)
        for y, alive in self.zones:
            weighted = []
            for p in range(len(self.pairs)):
                a, b = self.pairs[p]
                if p >= idx:
                    w = self.min_surv[p][y]
                    if w is None:
                        continue
                else:
                    opt = self.choice[p]
                    if opt is None or not opt[2] >> y & 1:
                        continue
                    w = 0
                if alive >> a & 1 and alive >> b & 1:
                    weighted.append((w, a, b))
            bound = max(bound, _mst_weight(alive, weighted))
        return bound

    def _dfs(self, idx: int, cost: int) -> None:
        if self.exhausted:
            return
        self.nodes += 1
        if self.nodes > self.budget:
            self.exhausted = True
            return
        if idx == len(self.pairs):
            if cost < self._bound:
                self._bound = cost
                self.best_cost = cost
                self.best = {
                    (self.subset[a], self.subset[b]): opt[1]
                    for (a, b), opt in zip(self.pairs, self.choice)
                    if opt is not None
                }
            return
        if cost + self._lower_bound(idx) >= self._bound:
            return
        a, b = self.pairs[idx]
        # absent first
        self.choice[idx] = None
        if _two_edge_connected(self.m, self._optimistic_edges(idx + 1)) and all(
            self._zone_ok(y, alive, idx + 1) for y, alive in self.zones
        ):
            self._dfs(idx + 1, cost)
        self.deg[a] += 1
        self.deg[b] += 1
        for opt in self.options[idx]:
            if cost + opt[0] >= self._bound:
                break
            self.choice[idx] = opt
            if all(
                opt[2] >> y & 1 or self._zone_ok(y, alive, idx + 1) for y, alive in self.zones
            ):
                self._dfs(idx + 1, cost + opt[0])
            if self.exhausted:
                break
        self.choice[idx] = None
        self.deg[a] -= 1
        self.deg[b] -= 1


# -- top level -------------------------------------------------------------------

_WORKER: _Search | None = None


def _init_worker(instance: Instance, objective: Objective, budget: int) -> None:
    global _WORKER
    _WORKER = _Search(instance, objective, budget)


def _run_subset(subset: tuple[NodeId, ...]) -> _SubsetResult:
    assert _WORKER is not None
    return _WORKER.solve_subset(subset)


def controller_sizes(instance: Instance, config: SolverConfig) -> list[int]:
    count = config.controller_count
    if count is None:
        count = instance.params.controller_count
    n_sites = len(instance.network.datacenter_nodes)
    if count is None:
        lo, hi = 1, n_sites
    elif isinstance(count, int):
        lo = hi = count
    else:
        lo, hi = count
    lo = max(lo, instance.params.q)
    return list(range(lo, min(hi, n_sites) + 1))


def _requested_max(instance: Instance, config: SolverConfig) -> int:
    count = config.controller_count if config.controller_count is not None else instance.params.controller_count
    if count is None:
        return len(instance.network.datacenter_nodes)
    return count if isinstance(count, int) else count[1]


def candidate_subsets(instance: Instance, sizes: list[int]) -> list[tuple[NodeId, ...]]:
    """Controller sets meeting the reachability requirement, in lexicographic order."""
    catalog = instance.catalog
    k = instance.params.k
    sites = sorted(instance.network.datacenter_nodes)
    out = []
    for size in sizes:
        for subset in itertools.combinations(sites, size):
            if all(
                sum(1 for f in subset if catalog.reach(i, f)) >= k
                for i in instance.network.nodes
            ):
                out.append(subset)
    return out


def solve(instance: Instance, config: SolverConfig | None = None) -> SolveOutcome:
    """Find an optimal design over the catalog's candidate paths.

    Raises:
        Infeasible: no controller set admits a feasible design; ``family``
            names the constraint family that eliminated the last candidates.
        BudgetExhausted: the node budget ran out before any design was found.
        SolverLimitError: more than 16 candidate sites.
    """
    config = config or SolverConfig()
    started = time.perf_counter()
    if len(instance.network.datacenter_nodes) > MAX_CANDIDATE_SITES:
        raise SolverLimitError(
            f"{len(instance.network.datacenter_nodes)} candidate sites exceed the exact-search "
            f"limit of {MAX_CANDIDATE_SITES}; export the model with export_lp instead"
        )
    sizes = controller_sizes(instance, config)
    if not sizes:
        if _requested_max(instance, config) < instance.params.k:
            raise Infeasible("C1", f"fewer controllers than the {instance.params.k} each switch needs")
        raise Infeasible("Cq", "requested controller count conflicts with q or the site count")
    subsets = candidate_subsets(instance, sizes)
    stats = SolveStats(subsets_enumerated=len(subsets))
    if not subsets:
        raise Infeasible("C1", f"no controller set gives every switch {instance.params.k} in-island controllers")

    objective = Objective(config.objective)
    if config.worker_count > 1 and len(subsets) > 1:
        with ProcessPoolExecutor(
            max_workers=config.worker_count,
            initializer=_init_worker,
            initargs=(instance, objective, config.node_budget),
        ) as pool:
            results = list(pool.map(_run_subset, subsets))
    else:
        search = _Search(instance, objective, config.node_budget)
        results = [search.solve_subset(s) for s in subsets]

    stats.nodes_explored = sum(r.nodes for r in results)
    exhausted = any(r.exhausted for r in results)
    feasible = [r for r in results if r.cost is not None]
    if not feasible:
        stats.wall_time = time.perf_counter() - started
        if exhausted:
            raise BudgetExhausted("node budget exhausted before any feasible design was found")
        family = max((r.failed for r in results), key=_STAGES.index)
        raise Infeasible(family, "no controller set admits a feasible design")
    best = min(feasible, key=lambda r: (r.cost, r.subset))
    design = _to_design(best)
    stats.wall_time = time.perf_counter() - started
    return SolveOutcome(
        design,
        objective_value(instance, design, objective),
        Proof.BUDGET_EXHAUSTED if exhausted else Proof.OPTIMAL,
        stats,
    )


def _to_design(result: _SubsetResult) -> CNMDesign:
    assignment = {f: f for f in result.subset}
    s2c = {}
    for i, (f, idx) in result.assignment.items():
        assignment[i] = f
        s2c[(i, f)] = idx
    return CNMDesign(
        frozenset(result.subset),
        frozenset(result.mesh),
        dict(sorted(assignment.items())),
        dict(sorted(result.mesh.items())),
        dict(sorted(s2c.items())),
    )
