"""Design mutations that each break one named constraint."""

from cnmdesign import CNMDesign, Instance, Parameters
from cnmdesign.disaster import DisasterZone
from cnmdesign.topology import PhysicalNetwork


def index_of(instance, s, t, nodes):
    return [p.nodes for p in instance.catalog.paths(s, t)].index(tuple(nodes))


def ring5(mapping_14):
    """5-ring with controllers 1, 3, 4 and a zone cutting link (1,2)."""
    net = PhysicalNetwork.build(range(1, 6), [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)], [1, 3, 4])
    cut = DisasterZone.build(net, "cut", [(1, 2)], [], "0.5", "0.5")
    inst = Instance(net, (cut,), Parameters(k=1, q=1, B=5, latency_hops=3, catalog_K=3))
    design = CNMDesign(
        frozenset({1, 3, 4}),
        frozenset({(1, 3), (1, 4), (3, 4)}),
        {1: 1, 2: 3, 3: 3, 4: 4, 5: 4},
        {
            (1, 3): index_of(inst, 1, 3, [1, 2, 3]),
            (1, 4): index_of(inst, 1, 4, mapping_14),
            (3, 4): index_of(inst, 3, 4, [3, 4]),
        },
        {(2, 3): index_of(inst, 2, 3, [2, 3]), (5, 4): index_of(inst, 5, 4, [5, 4])},
    )
    return inst, design


def copy(d, **changes):
    fields = dict(
        controllers=d.controllers,
        virtual_links=d.virtual_links,
        assignment=dict(d.assignment),
        c2c_mapping=dict(d.c2c_mapping),
        s2c_mapping=dict(d.s2c_mapping),
    )
    fields.update(changes)
    return CNMDesign(**fields)


def loads(d):
    out = {}
    for f in d.assignment.values():
        out[f] = out.get(f, 0) + 1
    return out


def mutate_C1(inst, d):
    return inst.with_params(k=len(d.controllers) + 1), d


def mutate_Cq(inst, d):
    return inst.with_params(controller_count=len(d.controllers) + 1), d


def mutate_C3(inst, d):
    return inst.with_params(B=max(loads(d).values()) - 1), d


def mutate_C4(inst, d):
    f, g = sorted(d.controllers)[:2]
    a = dict(d.assignment) | {f: g}
    s2c = dict(d.s2c_mapping)
    s2c[(f, g)] = 0
    return inst, copy(d, assignment=a, s2c_mapping=s2c)


def mutate_C5(inst, d):
    cat, L = inst.catalog, inst.params.latency_hops
    for (i, f), idx in sorted(d.s2c_mapping.items()):
        for j, p in enumerate(cat.paths(i, f)):
            if p.length > L:
                return inst, copy(d, s2c_mapping=dict(d.s2c_mapping) | {(i, f): j})
    raise AssertionError("no over-long catalog path to inject")


def mutate_C6(inst, d):
    spare = min(inst.network.datacenter_nodes - d.controllers)
    i = next(i for i, f in sorted(d.assignment.items()) if i != f and inst.catalog.reach(i, spare))
    s2c = {k: v for k, v in d.s2c_mapping.items() if k[0] != i}
    s2c[(i, spare)] = 0
    return inst, copy(d, assignment=dict(d.assignment) | {i: spare}, s2c_mapping=s2c)


def mutate_C7(inst, d):
    spare = min(inst.network.datacenter_nodes - d.controllers)
    f = min(d.controllers)
    key = (min(f, spare), max(f, spare))
    return inst, copy(
        d,
        virtual_links=d.virtual_links | {key},
        c2c_mapping=dict(d.c2c_mapping) | {key: 0},
    )


def mutate_C8(inst, d):
    key = min(d.virtual_links)
    return inst, copy(
        d,
        virtual_links=d.virtual_links - {key},
        c2c_mapping={k: v for k, v in d.c2c_mapping.items() if k != key},
    )


def mutate_C10(inst, d):
    key = min(d.s2c_mapping)
    return inst, copy(d, s2c_mapping={k: v for k, v in d.s2c_mapping.items() if k != key})


MUTATIONS = {
    "C1": mutate_C1,
    "Cq": mutate_Cq,
    "C3": mutate_C3,
    "C4": mutate_C4,
    "C5": mutate_C5,
    "C6": mutate_C6,
    "C7": mutate_C7,
    "C8": mutate_C8,
    "C10": mutate_C10,
}


def mutate_C19():
    """The 5-ring with its 1-4 virtual link rerouted through the cut link."""
    inst, good = ring5([1, 5, 4])
    idx = index_of(inst, 1, 4, (1, 2, 3, 4))
    return inst, good, copy(good, c2c_mapping=dict(good.c2c_mapping) | {(1, 4): idx})
