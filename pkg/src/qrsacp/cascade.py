"""Definite-effect calculation: instant damage on the hit service plus the
gradual damage cascading to dependent services over the dependency graph.

Only incidents cascade. The traversal is breadth-first along forward edges
(provider -> dependent) with *visited-edge* marking, so cyclic graphs
terminate and every edge whose source is reachable from the origin
contributes exactly once:

    total = crit(origin) * affected_impact
          + sum over traversed edges (s, d) of
                weight(s, d) * (affected_impact / 10) * crit(d)

The per-edge factor weight * (affected_impact / 10) is the affected
dependency weight: the declared dependency scaled by normalized announced
damage, so nothing propagates from a zero-impact incident and the full
declared weight propagates from a maximal one.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Tuple

from .impact import IMPACT_CAP, affected_impact
from .model import (
    DependencyEdge,
    ServiceNode,
    ThreatRecord,
    ThreatType,
    UnknownService,
    WorldState,
)

# Dependency weight of a service with itself; never stored as an edge.
SELF_DEPENDENCY_WEIGHT = 1.0


class ZeroForVulnerability(ValueError):
    """Instant definite effect was requested for a vulnerability.

    Vulnerabilities have no definite effect; reaching this signals a
    type-gating bug in the caller, not a scoring outcome.
    """


@dataclass(frozen=True)
class DefiniteEffectGraph:
    """Services reached by a cascade and the per-edge damage contributions."""

    nodes: FrozenSet[str]
    arcs: Tuple[Tuple[str, str], ...]
    per_arc_contribution: Dict[Tuple[str, str], float] = field(default_factory=dict)

    @classmethod
    def empty(cls) -> "DefiniteEffectGraph":
        return cls(frozenset(), ())

    def gradual_total(self) -> float:
        return sum(self.per_arc_contribution.values())

    def to_adjacency(self) -> dict:
        """Deterministic adjacency document: nodes and arcs sorted."""
        return {
            "nodes": sorted(self.nodes),
            "arcs": [
                {"src": s, "dst": d, "contribution": self.per_arc_contribution[(s, d)]}
                for s, d in sorted(self.arcs)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_adjacency(), sort_keys=True, separators=(",", ":"))


def instant_definite_effect(threat: ThreatRecord, service: ServiceNode) -> float:
    """Damage on the hit service itself: self-weight * crit * affected impact."""
    if threat.ttype is ThreatType.VULNERABILITY:
        raise ZeroForVulnerability(threat.tid)
    return SELF_DEPENDENCY_WEIGHT * service.crit * float(affected_impact(threat))


def affected_weight(edge: DependencyEdge, threat: ThreatRecord) -> float:
    """Dependency weight scaled by the threat's normalized announced damage."""
    return edge.weight * (float(affected_impact(threat)) / IMPACT_CAP)


def cascade_definite_effect(
    world: WorldState, threat: ThreatRecord
) -> Tuple[float, DefiniteEffectGraph]:
    """Total definite effect of a threat and the subgraph it damaged.

    Vulnerabilities score 0 with an empty graph. Attacks score the instant
    term only; their graph is the origin node alone. Incidents additionally
    cascade: the emitted arcs are exactly the edges traversed once each.
    """
    if threat.sid not in world.services:
        raise UnknownService(threat.sid)
    if threat.ttype is ThreatType.VULNERABILITY:
        return 0.0, DefiniteEffectGraph.empty()

    origin = world.services[threat.sid]
    total = instant_definite_effect(threat, origin)
    if threat.ttype is ThreatType.ATTACK:
        return total, DefiniteEffectGraph(frozenset({origin.sid}), ())

    # Dependents sorted by sid for a deterministic arc emission order.
    outgoing: Dict[str, list[DependencyEdge]] = {}
    for edge in world.edges:
        outgoing.setdefault(edge.src, []).append(edge)
    for edges in outgoing.values():
        edges.sort(key=lambda e: e.dst)

    nodes = {origin.sid}
    arcs: list[Tuple[str, str]] = []
    contributions: Dict[Tuple[str, str], float] = {}
    visited: set[Tuple[str, str]] = set()
    queue: deque[str] = deque([origin.sid])
    while queue:
        current = queue.popleft()
        nodes.add(current)
        for edge in outgoing.get(current, ()):
            pair = (edge.src, edge.dst)
            if pair in visited:
                continue
            visited.add(pair)
            contribution = affected_weight(edge, threat) * world.services[edge.dst].crit
            contributions[pair] = contribution
            total += contribution
            arcs.append(pair)
            queue.append(edge.dst)

    graph = DefiniteEffectGraph(frozenset(nodes), tuple(arcs), contributions)
    return total, graph
