"""Disaster zones, path survival and the expected-disruption risk metric."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable

from .topology import Link, NodeId, Path, PathCatalog, PhysicalNetwork, link_key

if TYPE_CHECKING:
    from .model import CNMDesign


class DisasterError(ValueError):
    """Raised for a zone that does not fit its network."""


def as_probability(value: object) -> Fraction:
    """Parse a probability exactly; decimal strings are preferred over floats."""
    if isinstance(value, bool):
        raise DisasterError(f"invalid probability {value!r}")
    try:
        prob = Fraction(str(value)) if isinstance(value, float) else Fraction(value)
    except (TypeError, ValueError) as exc:
        raise DisasterError(f"invalid probability {value!r}") from exc
    if not 0 <= prob <= 1:
        raise DisasterError(f"probability {value!r} outside [0, 1]")
    return prob


@dataclass(frozen=True)
class DisasterZone:
    id: str
    failed_links: frozenset[Link]
    failed_nodes: frozenset[NodeId]
    p_occurrence: Fraction
    p_conditional: Fraction

    @classmethod
    def build(
        cls,
        net: PhysicalNetwork,
        id: str,
        failed_links: Iterable[tuple[NodeId, NodeId]] = (),
        failed_nodes: Iterable[NodeId] = (),
        p_occurrence: object = 1,
        p_conditional: object = 1,
    ) -> DisasterZone:
        """Validate a zone against ``net``; links incident to failed nodes are added."""
        nodes = frozenset(failed_nodes)
        unknown = nodes - set(net.nodes)
        if unknown:
            raise DisasterError(f"zone {id!r}: unknown node(s) {sorted(unknown)}")
        links = set()
        for a, b in failed_links:
            if not net.has_link(a, b):
                raise DisasterError(f"zone {id!r}: unknown link ({a}, {b})")
            links.add(link_key(a, b))
        links.update(link for link in net.links if link[0] in nodes or link[1] in nodes)
        return cls(
            str(id),
            frozenset(links),
            nodes,
            as_probability(p_occurrence),
            as_probability(p_conditional),
        )

    @property
    def p_fail(self) -> Fraction:
        """Probability that the disaster happens and causes a failure."""
        return self.p_occurrence * self.p_conditional

    def hits_node(self, node: NodeId) -> bool:
        return node in self.failed_nodes


def path_survives(path: Path, zone: DisasterZone) -> bool:
    """True iff ``path`` touches neither a failed link nor a failed node of ``zone``."""
    if zone.failed_nodes.intersection(path.nodes):
        return False
    return zone.failed_links.isdisjoint(path.links)


@dataclass
class DisasterModel:
    """Zones plus a lazily filled survival table ``U[path][zone]``."""

    zones: tuple[DisasterZone, ...]
    _survival: dict[tuple[NodeId, ...], tuple[bool, ...]] = field(
        default_factory=dict, repr=False
    )

    def survival(self, path: Path) -> tuple[bool, ...]:
        row = self._survival.get(path.nodes)
        if row is None:
            row = tuple(path_survives(path, zone) for zone in self.zones)
            self._survival[path.nodes] = row
        return row

    def affected(self, path: Path) -> tuple[bool, ...]:
        return tuple(not u for u in self.survival(path))

    def survival_mask(self, path: Path) -> int:
        """Bit ``y`` set when the path survives zone ``y``."""
        mask = 0
        for y, alive in enumerate(self.survival(path)):
            if alive:
                mask |= 1 << y
        return mask

    def zone(self, zone_id: str) -> DisasterZone:
        for zone in self.zones:
            if zone.id == zone_id:
                return zone
        raise KeyError(zone_id)


def path_risk(path: Path, model: DisasterModel) -> Fraction:
    """Expected disruption of one channel: sum of ``p_fail`` over zones hitting it."""
    return sum(
        (zone.p_fail for zone, hit in zip(model.zones, model.affected(path)) if hit),
        Fraction(0),
    )


def design_risk(design: CNMDesign, catalog: PathCatalog, model: DisasterModel) -> Fraction:
    """Risk summed over every mapped controller-controller and switch-controller path."""
    return sum(
        (path_risk(p, model) for p in design.mapped_paths(catalog)), Fraction(0)
    )
