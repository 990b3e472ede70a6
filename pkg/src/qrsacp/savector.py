"""Composes the four effects into a per-threat SA vector, maintains the
network-wide SA by accumulation and analyst-feedback reduction, and ranks
active threats for triage.

Network SA is the componentwise sum of the vectors of all active threats.
Feedback on a resolved threat subtracts its full stored vector; a
subtraction that would drive any component meaningfully below zero is an
integrity error (the ledger no longer matches the stored vectors).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence, Tuple

from .cascade import DefiniteEffectGraph, cascade_definite_effect
from .model import SAVector, ThreatRecord, WorldState, TOLERANCE
from .projection import (
    PropagationGraph,
    infrastructural_effect,
    network_effect,
    procedural_effect,
)

DEFAULT_WEIGHTS: Tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)


class NotActive(KeyError):
    """Feedback for a threat that is unknown or already resolved."""


class IntegrityDrift(ValueError):
    """A reduction clamped a component by more than the tolerance."""


class ThreatStatus(Enum):
    ACTIVE = "active"
    RESOLVED = "resolved"


@dataclass(frozen=True)
class ThreatGraphs:
    """The four per-threat graphs: damaged subgraph plus spread candidates."""

    definite: DefiniteEffectGraph
    procedural: PropagationGraph
    network: PropagationGraph
    infrastructural: PropagationGraph


@dataclass(frozen=True)
class ScoredThreat:
    """A threat with its SA vector, graphs, triage priority and status."""

    threat: ThreatRecord
    sa: SAVector
    graphs: ThreatGraphs
    status: ThreatStatus = ThreatStatus.ACTIVE
    priority: float = 0.0

    def resolved(self) -> "ScoredThreat":
        return replace(self, status=ThreatStatus.RESOLVED)


def score_threat(
    world: WorldState,
    threat: ThreatRecord,
    weights: Sequence[float] = DEFAULT_WEIGHTS,
) -> ScoredThreat:
    """Score one threat: type-gated four-component vector plus its graphs."""
    definite, definite_graph = cascade_definite_effect(world, threat)
    procedural, procedural_graph = procedural_effect(world, threat)
    network, network_graph = network_effect(world, threat)
    infrastructural, infrastructural_graph = infrastructural_effect(world, threat)
    sa = SAVector(definite, procedural, network, infrastructural)
    return ScoredThreat(
        threat=threat,
        sa=sa,
        graphs=ThreatGraphs(
            definite_graph, procedural_graph, network_graph, infrastructural_graph
        ),
        priority=sa.weighted_sum(weights),
    )


def accumulate(network_sa: SAVector, sa: SAVector) -> SAVector:
    """Fold one threat's vector into the network SA (componentwise add)."""
    return network_sa + sa


def reduce(network_sa: SAVector, sa: SAVector) -> SAVector:
    """Remove one threat's vector from the network SA.

    Components are clamped at zero to absorb float round-off; a clamp
    beyond the tolerance raises IntegrityDrift.
    """
    out = []
    for name, (have, remove) in zip(
        ("definite", "procedural", "network", "infrastructural"),
        zip(network_sa.as_tuple(), sa.as_tuple()),
    ):
        diff = have - remove
        if diff < -TOLERANCE:
            raise IntegrityDrift(f"{name} would drop below zero by {-diff}")
        out.append(max(0.0, diff))
    return SAVector(*out)


def rank_threats(
    active: Sequence[ScoredThreat],
    weights: Sequence[float] = DEFAULT_WEIGHTS,
) -> list[ScoredThreat]:
    """Order threats for triage: highest weighted SA first.

    Ties break toward the earlier received report, then the lexically
    smaller tid, so the order is total and stable across runs.
    """
    if not any(w > 0 for w in weights):
        raise ValueError("ranking weights must not be all zero")
    if any(w < 0 for w in weights):
        raise ValueError("ranking weights must be nonnegative")
    return sorted(
        active,
        key=lambda st: (
            -st.sa.weighted_sum(weights),
            st.threat.received_at,
            st.threat.tid,
        ),
    )
