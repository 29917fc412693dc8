"""Export of the full integer program in CPLEX LP text format, and import of solutions.

Variable families (all binary; ``y`` is the zone's position in the instance):

``C_f``               controller active at datacenter ``f``
``a_i_f``             switch ``i`` assigned to controller ``f`` (``f`` in F)
``V_s_t``             virtual link between controllers ``s < t``
``m_i_j_s_t``         arc ``i -> j`` carries disjoint-path flow for pair ``s < t``
``o_i_j_s_t``         ``i, j, s, t`` are all controllers
``A_s_t_p``           virtual link ``s-t`` mapped on catalog path ``p``
``X_i_f_p``           channel ``i -> f`` mapped on catalog path ``p``
``K_s_t_y``           virtual link ``s-t`` survives zone ``y``
``Ks_i_j_s_t_y``      arc ``i -> j`` carries post-disaster flow for ``s < t``

Variable count, with ``P(u, v)`` the catalog size of a pair, ``n = |N|``,
``f = |F|``, ``c = f(f-1)/2`` and ``z = |Y|``::

    f + n*f + c + 2*f*(f-1)*c + sum_{s<t in F} P(s,t)
      + sum_{i in N, g in F, i != g} P(i,g) + z*c + z*f*(f-1)*c
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction

from ..model import CNMDesign, Instance, Objective, StructuralError
from ..topology import NodeId
from .search import SolverConfig


class InconsistentSolution(ValueError):
    """A variable assignment that does not describe a design."""


def lp_variable_count(instance: Instance) -> int:
    net, catalog = instance.network, instance.catalog
    n, sites = len(net.nodes), sorted(net.datacenter_nodes)
    f = len(sites)
    c = f * (f - 1) // 2
    z = len(instance.zones)
    a_paths = sum(len(catalog.paths(s, t)) for s, t in itertools.combinations(sites, 2))
    x_paths = sum(len(catalog.paths(i, g)) for i in net.nodes for g in sites if i != g)
    return f + n * f + c + 2 * f * (f - 1) * c + a_paths + x_paths + z * c + z * f * (f - 1) * c


def _num(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return repr(float(value))


class _Writer:
    def __init__(self) -> None:
        self.rows: list[str] = []
        self.binaries: list[str] = []

    def var(self, name: str) -> str:
        self.binaries.append(name)
        return name

    def expr(self, terms: list[tuple[Fraction | int, str]]) -> str:
        merged: dict[str, Fraction] = {}
        for coef, var in terms:
            merged[var] = merged.get(var, Fraction(0)) + Fraction(coef)
        parts = []
        for var, coef in merged.items():
            if coef == 0:
                continue
            sign = "-" if coef < 0 else "+"
            mag = abs(coef)
            parts.append(f"{sign} {var}" if mag == 1 else f"{sign} {_num(mag)} {var}")
        if not parts:
            # LP grammar needs at least one term
            return f"0 {self.binaries[0]}"
        body = " ".join(parts)
        return body[2:] if body.startswith("+ ") else body

    def row(self, name: str, terms: list[tuple[Fraction | int, str]], sense: str, rhs: Fraction | int) -> None:
        self.rows.append(f" {name}: {self.expr(terms)} {sense} {_num(rhs)}")


def export_lp(instance: Instance, config: SolverConfig | None = None) -> str:
    """Write the complete integer program for ``instance`` as LP text."""
    config = config or SolverConfig()
    objective = Objective(config.objective)
    net, catalog, params = instance.network, instance.catalog, instance.params
    model = instance.disasters
    nodes, sites = list(net.nodes), sorted(net.datacenter_nodes)
    pairs = list(itertools.combinations(sites, 2))
    arcs = [(i, j) for i in sites for j in sites if i != j]
    zones = list(enumerate(instance.zones))
    big_m = len(nodes) * params.catalog_K
    w = _Writer()

    C = {f: w.var(f"C_{f}") for f in sites}
    a = {(i, f): w.var(f"a_{i}_{f}") for i in nodes for f in sites}
    V = {(s, t): w.var(f"V_{s}_{t}") for s, t in pairs}
    m = {(i, j, s, t): w.var(f"m_{i}_{j}_{s}_{t}") for i, j in arcs for s, t in pairs}
    o = {(i, j, s, t): w.var(f"o_{i}_{j}_{s}_{t}") for i, j in arcs for s, t in pairs}
    A = {
        (s, t, p): w.var(f"A_{s}_{t}_{p}")
        for s, t in pairs
        for p in range(len(catalog.paths(s, t)))
    }
    X = {
        (i, f, p): w.var(f"X_{i}_{f}_{p}")
        for i in nodes
        for f in sites
        if i != f
        for p in range(len(catalog.paths(i, f)))
    }
    K = {(s, t, y): w.var(f"K_{s}_{t}_{y}") for y, _ in zones for s, t in pairs}
    Ks = {
        (i, j, s, t, y): w.var(f"Ks_{i}_{j}_{s}_{t}_{y}")
        for y, _ in zones
        for i, j in arcs
        for s, t in pairs
    }

    def cost(path) -> Fraction | int:
        if objective is Objective.MIN_RESOURCE:
            return path.length
        return sum(
            (z.p_fail for z, hit in zip(model.zones, model.affected(path)) if hit), Fraction(0)
        )

    obj_terms = [(cost(catalog.path(s, t, p)), var) for (s, t, p), var in A.items()]
    obj_terms += [(cost(catalog.path(i, f, p)), var) for (i, f, p), var in X.items()]

    for i in nodes:
        w.row(f"reach_{i}", [(1, C[f]) for f in sites if catalog.reach(i, f)], ">=", params.k)
    w.row("min_controllers", [(1, C[f]) for f in sites], ">=", params.q)
    count = config.controller_count if config.controller_count is not None else params.controller_count
    if isinstance(count, int):
        w.row("controller_count", [(1, C[f]) for f in sites], "=", count)
    elif count is not None:
        w.row("controller_count_lo", [(1, C[f]) for f in sites], ">=", count[0])
        w.row("controller_count_hi", [(1, C[f]) for f in sites], "<=", count[1])
    for f in sites:
        load = [(1, a[(i, f)]) for i in nodes]
        w.row(f"bin2a_{f}", [(1, C[f])] + [(-1, v) for _, v in load], "<=", 0)
        w.row(f"bin2b_{f}", [(big_m, C[f])] + [(-1, v) for _, v in load], ">=", 0)
        w.row(f"cap_{f}", load, "<=", params.B)
        w.row(f"self_{f}", [(1, a[(f, f)]), (-1, C[f])], ">=", 0)
    for i in nodes:
        terms = [(1, a[(i, f)]) for f in sites if f != i]
        if i in C:
            terms.append((1, C[i]))
        w.row(f"assign_{i}", terms, "=", 1)
    for i in nodes:
        for f in sites:
            if not catalog.reach(i, f):
                w.row(f"lat_{i}_{f}", [(1, a[(i, f)])], "<=", 0)
            w.row(f"sel_{i}_{f}", [(1, a[(i, f)]), (-1, C[f])], "<=", 0)
            if i != f and i in C:
                w.row(f"notc_{i}_{f}", [(1, a[(i, f)]), (1, C[i])], "<=", 1)
    for (i, j, s, t), var in o.items():
        members = sorted({i, j, s, t})
        for x in members:
            w.row(f"o_le_{i}_{j}_{s}_{t}_{x}", [(1, var), (-1, C[x])], "<=", 0)
        w.row(f"o_ge_{i}_{j}_{s}_{t}", [(1, var)] + [(-1, C[x]) for x in members], ">=", 1 - len(members))
        w.row(f"m_le_o_{i}_{j}_{s}_{t}", [(1, m[(i, j, s, t)]), (-1, var)], "<=", 0)
    for s, t in pairs:
        both = o[(s, t, s, t)]
        for i in sites:
            terms = [(1, m[(i, j, s, t)]) for j in sites if j != i]
            terms += [(-1, m[(j, i, s, t)]) for j in sites if j != i]
            if i == s:
                terms.append((-2, both))
            elif i == t:
                terms.append((2, both))
            w.row(f"flow_{i}_{s}_{t}", terms, "=", 0)
    flow_m = max(big_m, len(sites) * (len(sites) - 1))
    for s, t in pairs:
        carried = [(1, m[(s, t, u, v)]) for u, v in pairs] + [(1, m[(t, s, u, v)]) for u, v in pairs]
        w.row(f"bin9a_{s}_{t}", [(1, V[(s, t)])] + [(-1, x) for _, x in carried], "<=", 0)
        w.row(f"bin9b_{s}_{t}", carried + [(-flow_m, V[(s, t)])], "<=", 0)
        w.row(
            f"map_{s}_{t}",
            [(1, A[(s, t, p)]) for p in range(len(catalog.paths(s, t)))] + [(-1, V[(s, t)])],
            "=",
            0,
        )
    for i in nodes:
        for f in sites:
            if i == f:
                continue
            paths = catalog.paths(i, f)
            w.row(
                f"chan_{i}_{f}",
                [(1, X[(i, f, p)]) for p in range(len(paths))] + [(-1, a[(i, f)])],
                "=",
                0,
            )
            for p, path in enumerate(paths):
                if path.length > params.latency_hops:
                    w.row(f"chanlat_{i}_{f}_{p}", [(1, X[(i, f, p)])], "<=", 0)
    for y, zone in zones:
        for s, t in pairs:
            surv = [(1, A[(s, t, p)]) for p, path in enumerate(catalog.paths(s, t)) if model.survival(path)[y]]
            w.row(f"surv11a_{s}_{t}_{y}", [(1, K[(s, t, y)])] + [(-c, v) for c, v in surv], "=", 0)
        for i, j in arcs:
            link = (min(i, j), max(i, j))
            for s, t in pairs:
                w.row(f"surv11b_{i}_{j}_{s}_{t}_{y}", [(1, Ks[(i, j, s, t, y)]), (-1, K[(*link, y)])], "<=", 0)
        for s, t in pairs:
            alive = s not in zone.failed_nodes and t not in zone.failed_nodes
            both = o[(s, t, s, t)]
            for i in sites:
                terms = [(1, Ks[(i, j, s, t, y)]) for j in sites if j != i]
                terms += [(-1, Ks[(j, i, s, t, y)]) for j in sites if j != i]
                if alive and i == s:
                    terms.append((-1, both))
                elif alive and i == t:
                    terms.append((1, both))
                w.row(f"surv19_{i}_{s}_{t}_{y}", terms, "=", 0)

    lines = [
        f"\\ control network mapping: {instance.name}",
        f"\\ objective: {objective.value}",
        "Minimize",
    ]
    lines.append(f" obj: {w.expr(obj_terms)}")
    lines.append("Subject To")
    lines.extend(w.rows)
    lines.append("Binary")
    for start in range(0, len(w.binaries), 8):
        lines.append(" " + " ".join(w.binaries[start:start + 8]))
    lines.append("End")
    return "\n".join(lines) + "\n"


_NAME = re.compile(r"^(C|a|V|A|X)_(\d+(?:_\d+)*)$")


def import_solution(instance: Instance, text: str) -> CNMDesign:
    """Rebuild a design from ``name value`` lines (one variable per line).

    Only the C, a, V, A and X families are read; the rest are implied.

    Raises:
        InconsistentSolution: fractional values or contradictory selections.
        StructuralError: no active controller.
    """
    values: dict[str, dict[tuple[int, ...], int]] = {k: {} for k in "CaVAX"}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(("#", "\\")):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InconsistentSolution(f"line {lineno}: expected 'name value', got {raw!r}")
        name, value_text = parts
        match = _NAME.match(name)
        if not match:
            continue
        try:
            value = float(value_text)
        except ValueError as exc:
            raise InconsistentSolution(f"line {lineno}: bad value {value_text!r}") from exc
        rounded = round(value)
        if abs(value - rounded) > 1e-6 or rounded not in (0, 1):
            raise InconsistentSolution(f"{name} = {value_text} is not binary")
        key = tuple(int(x) for x in match.group(2).split("_"))
        values[match.group(1)][key] = rounded

    catalog = instance.catalog
    sites = set(instance.network.datacenter_nodes)
    controllers = frozenset(f for (f,), v in values["C"].items() if v)
    if not controllers:
        raise StructuralError("solution activates no controller")
    unknown = controllers - sites
    if unknown:
        raise InconsistentSolution(f"controllers at non-datacenter nodes {sorted(unknown)}")
    links = frozenset((s, t) for (s, t), v in values["V"].items() if v)
    assignment: dict[NodeId, NodeId] = {}
    for (i, f), v in sorted(values["a"].items()):
        if not v:
            continue
        if i in assignment:
            raise InconsistentSolution(f"switch {i} assigned to both {assignment[i]} and {f}")
        assignment[i] = f
    missing = sorted(set(instance.network.nodes) - set(assignment))
    if missing:
        raise InconsistentSolution(f"switches {missing} are unassigned")
    c2c: dict[tuple[NodeId, NodeId], int] = {}
    for (s, t, p), v in sorted(values["A"].items()):
        if not v:
            continue
        if (s, t) not in links:
            raise InconsistentSolution(f"A_{s}_{t}_{p} selects a path for a non-existent virtual link")
        if (s, t) in c2c:
            raise InconsistentSolution(f"virtual link ({s}, {t}) mapped twice")
        if p >= len(catalog.paths(s, t)):
            raise InconsistentSolution(f"A_{s}_{t}_{p} names a path outside the catalog")
        c2c[(s, t)] = p
    s2c: dict[tuple[NodeId, NodeId], int] = {}
    for (i, f, p), v in sorted(values["X"].items()):
        if not v:
            continue
        if assignment.get(i) != f or i == f:
            raise InconsistentSolution(f"X_{i}_{f}_{p} maps a channel that is not assigned")
        if (i, f) in s2c:
            raise InconsistentSolution(f"channel ({i}, {f}) mapped twice")
        if p >= len(catalog.paths(i, f)):
            raise InconsistentSolution(f"X_{i}_{f}_{p} names a path outside the catalog")
        s2c[(i, f)] = p
    return CNMDesign(controllers, links, dict(sorted(assignment.items())), c2c, s2c)
