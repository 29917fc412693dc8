import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnmdesign.topology import (
    Path,
    PhysicalNetwork,
    TopologyError,
    build_catalog,
    hop_distance,
    k_shortest_paths,
)
from oracles import all_simple_paths, bfs_hops

TRIANGLE = [(1, 2), (2, 3), (1, 3)]
LINE = [(1, 2), (2, 3)]
SQUARE = [(1, 2), (2, 3), (3, 4), (4, 1)]


def net(links, n=None, dcs=()):
    n = n or max(max(e) for e in links)
    return PhysicalNetwork.build(range(1, n + 1), links, dcs)


def test_triangle_builds():
    g = net(TRIANGLE, dcs=[1])
    assert g.nodes == (1, 2, 3)
    assert len(g.links) == 3
    assert g.datacenter_nodes == {1}


@pytest.mark.parametrize(
    "links, nodes, message",
    [
        ([(1, 99)], [1, 2], "unknown node"),
        ([(1, 1), (1, 2)], [1, 2], "self-loop"),
        ([(1, 2), (2, 1)], [1, 2], "duplicate link"),
        ([(1, 2)], [1, 2, 3], "not connected"),
    ],
)
def test_invalid_networks(links, nodes, message):
    with pytest.raises(TopologyError, match=message):
        PhysicalNetwork.build(nodes, links)


def test_datacenter_must_exist():
    with pytest.raises(TopologyError, match="datacenter"):
        PhysicalNetwork.build([1, 2], [(1, 2)], [7])


def test_hop_distance_line():
    g = net(LINE)
    assert hop_distance(g, 1, 3) == 2
    assert all(hop_distance(g, i, i) == 0 for i in g.nodes)


def test_hop_distance_nsfnet_against_bfs(nsfnet):
    g = nsfnet.network
    far = max(
        (hop_distance(g, i, j), i, j) for i, j in itertools.combinations(g.nodes, 2)
    )
    d, i, j = far
    assert bfs_hops(g.links, i)[j] == d
    for i in g.nodes:
        ref = bfs_hops(g.links, i)
        assert all(hop_distance(g, i, j) == ref[j] for j in g.nodes)


def test_k_shortest_examples():
    assert [p.nodes for p in k_shortest_paths(net(TRIANGLE), 1, 3, 2)] == [(1, 3), (1, 2, 3)]
    assert [p.nodes for p in k_shortest_paths(net(LINE), 1, 3, 3)] == [(1, 2, 3)]
    # the 4-cycle order is derived from the full enumeration
    ref = sorted(all_simple_paths(SQUARE, 1, 3), key=lambda p: (len(p), p))[:2]
    assert ref == [(1, 2, 3), (1, 4, 3)]
    assert [p.nodes for p in k_shortest_paths(net(SQUARE), 1, 3, 2)] == ref


def test_k_shortest_rejects_bad_input():
    with pytest.raises(ValueError):
        k_shortest_paths(net(LINE), 1, 1, 2)
    with pytest.raises(ValueError):
        k_shortest_paths(net(LINE), 1, 3, 0)


def test_path_properties():
    p = Path((1, 2, 3))
    assert p.length == 2
    assert p.links == ((1, 2), (2, 3))
    assert p.reversed().nodes == (3, 2, 1)
    with pytest.raises(TopologyError):
        Path((1, 2, 1))


@st.composite
def small_graphs(draw):
    n = draw(st.integers(2, 8))
    parents = [draw(st.integers(1, v - 1)) for v in range(2, n + 1)]
    links = {(p, v) for p, v in zip(parents, range(2, n + 1))}
    extra = draw(st.sets(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=8))
    links |= {(min(a, b), max(a, b)) for a, b in extra if a != b}
    return sorted(links), n


@settings(max_examples=60, deadline=None)
@given(small_graphs(), st.data())
def test_unbounded_k_equals_enumeration(graph, data):
    links, n = graph
    g = net(links, n)
    i = data.draw(st.integers(1, n))
    j = data.draw(st.integers(1, n).filter(lambda x: x != i))
    got = [p.nodes for p in k_shortest_paths(g, i, j, None)]
    ref = all_simple_paths(links, i, j)
    if i < j:
        ref.sort(key=lambda p: (len(p), p))
    else:
        ref.sort(key=lambda p: (len(p), p[::-1]))
    assert got == ref
    assert len(set(got)) == len(got)
    for nodes in got:
        assert Path(nodes).is_valid_on(g)


@settings(max_examples=40, deadline=None)
@given(small_graphs(), st.integers(1, 4), st.integers(0, 4))
def test_catalog_invariants(graph, K, L):
    links, n = graph
    g = net(links, n)
    cat = build_catalog(g, K, L)
    for i, j in itertools.permutations(g.nodes, 2):
        paths = cat.paths(i, j)
        assert 1 <= len(paths) <= K
        assert paths[0].length == hop_distance(g, i, j)
        assert [p.reversed() for p in cat.paths(j, i)] == list(paths)
        assert [p.length for p in paths] == sorted(p.length for p in paths)
        assert all(p.source == i and p.target == j for p in paths)
    for i in g.nodes:
        ref = bfs_hops(links, i)
        for j in g.nodes:
            assert cat.reach(i, j) == (ref[j] <= L)
            assert cat.reach(i, j) == cat.reach(j, i)
        assert cat.reach(i, i)


def test_catalog_reach_extremes():
    g = net(SQUARE)
    zero = build_catalog(g, 2, 0)
    assert all(zero.reach(i, j) == (i == j) for i in g.nodes for j in g.nodes)
    full = build_catalog(g, 2, g.diameter())
    assert all(full.reach(i, j) for i in g.nodes for j in g.nodes)


def test_nsfnet_reach_three_hops(nsfnet):
    g = nsfnet.network
    cat = nsfnet.catalog
    assert cat.latency_limit == 3
    for i in g.nodes:
        ref = bfs_hops(g.links, i)
        assert [cat.reach(i, j) for j in g.nodes] == [ref[j] <= 3 for j in g.nodes]
