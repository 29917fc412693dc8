import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnmdesign import (
    CNMDesign,
    Instance,
    Objective,
    Parameters,
    StructuralError,
    SolverConfig,
    check_feasibility,
    objective_value,
    solve,
)
from cnmdesign.model import CONSTRAINT_IDS, two_disjoint_virtual_paths
from cnmdesign.topology import PhysicalNetwork
from faults import MUTATIONS, copy, mutate_C19, ring5
from oracles import all_simple_paths, corpus, edges_of, has_two_disjoint, hit


def triangle(B=3):
    net = PhysicalNetwork.build([1, 2, 3], [(1, 2), (2, 3), (1, 3)], [1])
    return Instance(net, (), Parameters(k=1, q=1, B=B, latency_hops=3, catalog_K=2))


def single(assignment=None):
    assignment = assignment or {1: 1, 2: 1, 3: 1}
    return CNMDesign(
        frozenset({1}),
        frozenset(),
        assignment,
        {},
        {(i, f): 0 for i, f in assignment.items() if i != f},
    )


def surviving_virtual_path_exists(inst, design, zone, s, t):
    """Exhaustive enumeration of virtual paths over surviving mapped links."""
    cat = inst.catalog
    alive = [
        key for key, idx in design.c2c_mapping.items() if not hit(cat.path(*key, idx).nodes, zone)
    ]
    return bool(all_simple_paths(alive, s, t))


@pytest.mark.parametrize("detour, feasible", [([1, 5, 4], True), ([1, 2, 3, 4], False)])
def test_c19_hand_built(detour, feasible):
    inst, design = ring5(detour)
    report = check_feasibility(inst, design)
    zone = inst.zones[0]
    oracle = all(
        surviving_virtual_path_exists(inst, design, zone, s, t)
        for s, t in itertools.combinations([1, 3, 4], 2)
    )
    assert oracle is feasible
    assert report.feasible is feasible
    if not feasible:
        assert report.violated() == {"C19"}
        assert {v.elements for v in report.violations} == {("cut", 1, 3), ("cut", 1, 4)}
    else:
        assert report.survivability_witnesses[("cut", 1, 3)] == (1, 4, 3)


def test_report_serializes(nsfnet_designs, nsfnet):
    doc = check_feasibility(nsfnet, nsfnet_designs[(Objective.MIN_RISK, 3)].design).to_dict()
    assert doc["feasible"] is True
    assert doc["violated"] == []
    assert len(doc["disjoint_path_witnesses"]) == 3


@pytest.mark.parametrize("cid", sorted(MUTATIONS))
def test_fault_injection_nsfnet(cid, nsfnet, nsfnet_designs):
    d = nsfnet_designs[(Objective.MIN_RISK, 3)].design
    assert check_feasibility(nsfnet, d).feasible
    inst, bad = MUTATIONS[cid](nsfnet, d)
    assert cid in check_feasibility(inst, bad).violated()


@pytest.mark.parametrize("cid", ["C1", "Cq", "C3", "C5", "C10"])
def test_fault_injection_is_targeted(cid, nsfnet, nsfnet_designs):
    d = nsfnet_designs[(Objective.MIN_RISK, 3)].design
    inst, bad = MUTATIONS[cid](nsfnet, d)
    assert check_feasibility(inst, bad).violated() == {cid}


def test_fault_injection_covers_every_id():
    assert set(MUTATIONS) | {"C19"} == set(CONSTRAINT_IDS)


def test_survivability_mutation_flips_only_c19():
    inst, good, bad = mutate_C19()
    assert check_feasibility(inst, good).feasible
    assert check_feasibility(inst, bad).violated() == {"C19"}


@pytest.mark.parametrize(
    "change, message",
    [
        ({"controllers": frozenset()}, "no controllers"),
        ({"controllers": frozenset({2})}, "not datacenter"),
        ({"assignment": {1: 1, 2: 1}}, "cover every node"),
        ({"s2c_mapping": {(2, 1): 0, (3, 1): 7}}, "absent from the catalog"),
        ({"virtual_links": frozenset({(3, 1)})}, "sorted pair"),
    ],
)
def test_structural_errors(change, message):
    with pytest.raises(StructuralError, match=message):
        check_feasibility(triangle(), copy(single(), **change))


def test_objective_examples():
    net = PhysicalNetwork.build([1], [], [1])
    inst = Instance(net, (), Parameters())
    lone = CNMDesign(frozenset({1}), frozenset(), {1: 1}, {}, {})
    for obj in Objective:
        assert objective_value(inst, lone, obj) == 0
    line = PhysicalNetwork.build([1, 2, 3], [(1, 2), (2, 3)], [1])
    inst = Instance(line, (), Parameters(B=3))
    d = CNMDesign(frozenset({1}), frozenset(), {1: 1, 2: 1, 3: 1}, {}, {(2, 1): 0, (3, 1): 0})
    assert objective_value(inst, d, Objective.MIN_RESOURCE) == 3
    assert objective_value(inst, d, Objective.MIN_RISK) == 0
    d1 = CNMDesign(frozenset({1}), frozenset(), {1: 1, 2: 1, 3: 2}, {}, {(2, 1): 0})
    assert objective_value(inst, d1, Objective.MIN_RESOURCE) == 1


def test_objective_value_types(nsfnet, nsfnet_designs):
    d = nsfnet_designs[(Objective.MIN_RISK, 4)].design
    assert isinstance(objective_value(nsfnet, d, Objective.MIN_RESOURCE), int)
    risk = objective_value(nsfnet, d, Objective.MIN_RISK)
    assert isinstance(risk, Fraction) and risk >= 0


@settings(max_examples=150, deadline=None)
@given(
    st.integers(2, 6).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.sets(st.sampled_from(list(itertools.combinations(range(n), 2)))),
        )
    )
)
def test_c8_maxflow_matches_exhaustive(case):
    n, mesh = case
    for s, t in itertools.combinations(range(n), 2):
        fast = two_disjoint_virtual_paths(range(n), mesh, s, t)
        assert (fast is not None) == has_two_disjoint(mesh, s, t)
        if fast is not None:
            a, b = fast
            assert not edges_of(a) & edges_of(b)
            assert edges_of(a) | edges_of(b) <= {tuple(sorted(e)) for e in mesh}


@pytest.fixture(scope="module")
def big_corpus():
    return corpus(n_feasible=100, seed=7)


def test_checker_accepts_solver_output(big_corpus):
    solved = 0
    for inst, risk_opt, _ in big_corpus:
        if risk_opt is None:
            continue
        for obj in Objective:
            out = solve(inst, SolverConfig(obj))
            assert check_feasibility(inst, out.design).feasible, inst.name
        solved += 1
    assert solved >= 100
