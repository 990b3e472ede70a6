"""Probable-effect projection: the three near-future spread risks.

Each effect is a single-hop sum over candidate organizations, shaped as

    p_a * sum over candidates k of
        (1 - p_e(k)) * spread_probability(k) * crit(k) * potential_impact

where p_a is the threat's success probability, p_e the candidate's
defensive probability, and potential_impact is the adjusted impact of the
threat's potential triple (evaluated once, applied uniformly).

Candidate sets differ per effect:

* procedural: organizations the origin org declares procedural links to;
  spread_probability is the per-link probability.
* network: organizations whose services share a dependency edge (either
  direction) with the origin org's services; spread_probability comes from
  the Snort-style classification table. When the threat declares both a
  port and a protocol, only edges matching that port with a compatible
  protocol qualify (an edge without a port never matches a port-specific
  threat).
* infrastructural: organizations whose CPE inventory contains the threat's
  CPE id; no extra spread factor. This is the only effect computed for
  vulnerabilities; procedural and network effects apply to incidents and
  attacks only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .impact import adjusted_impact
from .model import (
    NetProbTable,
    Organization,
    Proto,
    ThreatRecord,
    ThreatType,
    UnknownService,
    WorldState,
)

__all__ = [
    "NetProbTable",
    "PropagationGraph",
    "procedural_effect",
    "network_propagation_probability",
    "network_effect",
    "infrastructural_effect",
]


@dataclass(frozen=True)
class PropagationGraph:
    """Origin organization and the candidate orgs a threat may spread to.

    Each target records the spread probability used for it and its
    contribution; contributions sum to the effect scalar.
    """

    origin: str
    targets: Tuple[Tuple[str, float, float], ...] = ()

    @classmethod
    def empty(cls, origin: str = "") -> "PropagationGraph":
        return cls(origin, ())

    def total(self) -> float:
        return sum(t[2] for t in self.targets)

    def to_adjacency(self) -> dict:
        return {
            "origin": self.origin,
            "targets": [
                {"oid": oid, "probability": prob, "contribution": contrib}
                for oid, prob, contrib in self.targets
            ],
        }


def network_propagation_probability(category: str, table: NetProbTable) -> float:
    """Spread probability for a classification; unmatched falls back to "other"."""
    return table.entries.get(str(category).strip().lower(), table.default)


def _origin_org(world: WorldState, threat: ThreatRecord) -> Organization:
    if threat.sid not in world.services:
        raise UnknownService(threat.sid)
    return world.orgs[world.services[threat.sid].oid]


def _spread_terms(
    world: WorldState,
    threat: ThreatRecord,
    candidates: list[Tuple[str, float]],
) -> Tuple[float, Tuple[Tuple[str, float, float], ...]]:
    impact = float(adjusted_impact(threat.potential_cia))
    targets = []
    total = 0.0
    for oid, prob in candidates:
        org = world.orgs[oid]
        contribution = threat.p_a * (1.0 - org.p_e) * prob * org.crit * impact
        targets.append((oid, prob, contribution))
        total += contribution
    return total, tuple(targets)


def procedural_effect(
    world: WorldState, threat: ThreatRecord
) -> Tuple[float, PropagationGraph]:
    """Risk of spread over the origin org's declared procedural exchanges."""
    origin = _origin_org(world, threat)
    if threat.ttype is ThreatType.VULNERABILITY:
        return 0.0, PropagationGraph.empty(origin.oid)
    total, targets = _spread_terms(world, threat, list(origin.procedural_links))
    return total, PropagationGraph(origin.oid, targets)


def _protos_compatible(edge_proto: Proto, threat_proto: Proto) -> bool:
    return Proto.ANY in (edge_proto, threat_proto) or edge_proto is threat_proto


def network_effect(
    world: WorldState, threat: ThreatRecord
) -> Tuple[float, PropagationGraph]:
    """Risk of spread over dependency edges that cross into other orgs."""
    origin = _origin_org(world, threat)
    if threat.ttype is ThreatType.VULNERABILITY:
        return 0.0, PropagationGraph.empty(origin.oid)

    filter_by_link = threat.port is not None and threat.proto is not None
    neighbors: set[str] = set()
    for edge in world.edges:
        if filter_by_link:
            if edge.port != threat.port or not _protos_compatible(edge.proto, threat.proto):
                continue
        src_org = world.services[edge.src].oid
        dst_org = world.services[edge.dst].oid
        if src_org == origin.oid and dst_org != origin.oid:
            neighbors.add(dst_org)
        elif dst_org == origin.oid and src_org != origin.oid:
            neighbors.add(src_org)

    prob = network_propagation_probability(threat.category, world.net_prob_table)
    candidates = [(oid, prob) for oid in sorted(neighbors)]
    total, targets = _spread_terms(world, threat, candidates)
    return total, PropagationGraph(origin.oid, targets)


def infrastructural_effect(
    world: WorldState, threat: ThreatRecord
) -> Tuple[float, PropagationGraph]:
    """Risk of the threat recurring in orgs holding the same CPE asset."""
    origin = _origin_org(world, threat)
    candidates = [
        (oid, 1.0)
        for oid, org in sorted(world.orgs.items())
        if oid != origin.oid and threat.cpe_id in org.cpe_inventory
    ]
    total, targets = _spread_terms(world, threat, candidates)
    return total, PropagationGraph(origin.oid, targets)
