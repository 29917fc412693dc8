"""Physical substrate: the node/link graph, hop distances and candidate paths.

Links are stored undirected. Every ordered node pair ``(i, j)`` gets its own
list of candidate paths in the catalog, with ``paths(j, i)`` being the
reversal of ``paths(i, j)`` so both directions of a channel share one
physical footprint.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import networkx as nx

NodeId = int
Link = tuple[int, int]


class TopologyError(ValueError):
    """Raised for an invalid physical network."""


def link_key(a: NodeId, b: NodeId) -> Link:
    """Canonical (sorted) form of an undirected link."""
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class PhysicalNetwork:
    nodes: tuple[NodeId, ...]
    datacenter_nodes: frozenset[NodeId]
    links: frozenset[Link]

    @classmethod
    def build(
        cls,
        nodes: Iterable[NodeId],
        links: Iterable[tuple[NodeId, NodeId]],
        datacenter_nodes: Iterable[NodeId] = (),
    ) -> PhysicalNetwork:
        """Validate and construct a network.

        Raises:
            TopologyError: on unknown node ids, self-loops, duplicate links,
                datacenters outside the node set or a disconnected graph.
        """
        node_list = list(nodes)
        if len(set(node_list)) != len(node_list):
            raise TopologyError("duplicate node id")
        node_set = set(node_list)
        seen: set[Link] = set()
        for a, b in links:
            for n in (a, b):
                if n not in node_set:
                    raise TopologyError(f"unknown node {n} in link ({a}, {b})")
            if a == b:
                raise TopologyError(f"self-loop on node {a}")
            key = link_key(a, b)
            if key in seen:
                raise TopologyError(f"duplicate link {key}")
            seen.add(key)
        dcs = frozenset(datacenter_nodes)
        unknown = dcs - node_set
        if unknown:
            raise TopologyError(f"unknown datacenter node(s) {sorted(unknown)}")
        net = cls(tuple(sorted(node_list)), dcs, frozenset(seen))
        if node_list and not nx.is_connected(net.graph):
            raise TopologyError("physical network is not connected")
        return net

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(sorted(self.links))
        return g

    @cached_property
    def _adjacency(self) -> dict[NodeId, tuple[NodeId, ...]]:
        adj: dict[NodeId, list[NodeId]] = {n: [] for n in self.nodes}
        for a, b in self.links:
            adj[a].append(b)
            adj[b].append(a)
        return {n: tuple(sorted(v)) for n, v in adj.items()}

    def neighbors(self, node: NodeId) -> tuple[NodeId, ...]:
        return self._adjacency[node]

    def has_link(self, a: NodeId, b: NodeId) -> bool:
        return link_key(a, b) in self.links

    @cached_property
    def _distances(self) -> dict[NodeId, dict[NodeId, int]]:
        return {n: bfs_distances(self._adjacency, n) for n in self.nodes}

    def hop_distance(self, i: NodeId, j: NodeId) -> int:
        return self._distances[i][j]

    def diameter(self) -> int:
        return max((max(row.values()) for row in self._distances.values()), default=0)


def bfs_distances(
    adjacency: dict[NodeId, tuple[NodeId, ...]] | dict[NodeId, list[NodeId]], source: NodeId
) -> dict[NodeId, int]:
    """Hop distances from ``source`` to every node reachable in ``adjacency``."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def hop_distance(net: PhysicalNetwork, i: NodeId, j: NodeId) -> int:
    """Shortest-path hop count between two nodes (0 when ``i == j``)."""
    return net.hop_distance(i, j)


@dataclass(frozen=True, order=True)
class Path:
    """A simple path given by its node sequence."""

    nodes: tuple[NodeId, ...]

    def __post_init__(self) -> None:
        if len(set(self.nodes)) != len(self.nodes):
            raise TopologyError(f"path {self.nodes} is not simple")

    @property
    def length(self) -> int:
        return len(self.nodes) - 1

    @property
    def links(self) -> tuple[Link, ...]:
        return tuple(link_key(a, b) for a, b in zip(self.nodes, self.nodes[1:]))

    @property
    def source(self) -> NodeId:
        return self.nodes[0]

    @property
    def target(self) -> NodeId:
        return self.nodes[-1]

    def reversed(self) -> Path:
        return Path(self.nodes[::-1])

    def is_valid_on(self, net: PhysicalNetwork) -> bool:
        return all(net.has_link(a, b) for a, b in zip(self.nodes, self.nodes[1:]))

    def sort_key(self) -> tuple[int, tuple[NodeId, ...]]:
        return (self.length, self.nodes)


def k_shortest_paths(
    net: PhysicalNetwork, i: NodeId, j: NodeId, K: int | None
) -> list[Path]:
    """Up to ``K`` loopless paths from ``i`` to ``j`` ordered by (hops, node sequence).

    ``K=None`` returns every simple path. Paths are drawn from a Yen-style
    generator in nondecreasing length; the whole length class of the K-th
    path is collected before sorting so lexicographic tie-breaking is exact.
    Ties are broken on the node sequence read from the smaller endpoint, so
    ``k_shortest_paths(j, i)`` is exactly the reversal of ``(i, j)``.
    """
    if i == j:
        raise ValueError("source and target must differ")
    if K is not None and K < 1:
        raise ValueError("K must be >= 1")
    collected: list[Path] = []
    cutoff: int | None = None
    for nodes in nx.shortest_simple_paths(net.graph, i, j):
        length = len(nodes) - 1
        if cutoff is not None and length > cutoff:
            break
        collected.append(Path(tuple(nodes)))
        if K is not None and cutoff is None and len(collected) >= K:
            cutoff = length
    if i < j:
        collected.sort(key=Path.sort_key)
    else:
        collected.sort(key=lambda p: p.reversed().sort_key())
    return collected if K is None else collected[:K]


@dataclass(frozen=True)
class PathCatalog:
    """Candidate paths for every ordered node pair plus the reachability matrix."""

    K: int
    latency_limit: int
    _paths: dict[tuple[NodeId, NodeId], tuple[Path, ...]] = field(repr=False)
    _reach: frozenset[tuple[NodeId, NodeId]] = field(repr=False)

    def paths(self, i: NodeId, j: NodeId) -> tuple[Path, ...]:
        return self._paths[(i, j)]

    def path(self, i: NodeId, j: NodeId, index: int) -> Path:
        return self._paths[(i, j)][index]

    def reach(self, i: NodeId, j: NodeId) -> bool:
        """True when ``j`` lies in ``i``'s reachability island."""
        return (i, j) in self._reach

    def pairs(self) -> Iterator[tuple[NodeId, NodeId]]:
        return iter(sorted(self._paths))

    def all_paths(self) -> Iterator[Path]:
        for key in sorted(self._paths):
            yield from self._paths[key]


def build_catalog(net: PhysicalNetwork, K: int, L: int) -> PathCatalog:
    """Precompute k-shortest paths for every ordered pair and the hop-limit reach matrix."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if L < 0:
        raise ValueError("latency limit must be >= 0")
    paths: dict[tuple[NodeId, NodeId], tuple[Path, ...]] = {}
    for i, j in itertools.combinations(net.nodes, 2):
        forward = tuple(k_shortest_paths(net, i, j, K))
        paths[(i, j)] = forward
        paths[(j, i)] = tuple(p.reversed() for p in forward)
    reach = frozenset(
        (i, j) for i in net.nodes for j in net.nodes if net.hop_distance(i, j) <= L
    )
    return PathCatalog(K, L, paths, reach)
