"""Quantitative situational awareness over service dependency graphs.

Scores incoming threat reports (vulnerabilities, attacks, incidents)
into four-component vectors (definite, procedural, network, and
infrastructural effect) against a weighted service-dependency world,
keeps a running network-wide total with mitigation feedback, and
persists everything to a replayable event ledger.
"""

from .engine import DuplicateThreat, SaEngine
from .impact import adjusted_impact, affected_impact
from .ingest import (
    IntegrityError,
    ParseError,
    WorldBundle,
    load_world,
    parse_threat_feed,
    serialize_threats,
    serialize_world,
)
from .model import (
    CiaLevel,
    CiaTriple,
    DependencyEdge,
    Organization,
    SAVector,
    ServiceNode,
    ThreatRecord,
    ThreatType,
    UnknownService,
    WorldState,
    validate_world,
)
from .savector import (
    DEFAULT_WEIGHTS,
    IntegrityDrift,
    NotActive,
    ScoredThreat,
    ThreatStatus,
    accumulate,
    rank_threats,
    reduce,
    score_threat,
)
from .store import CorruptLedger, EventKind, IllegalTransition, Ledger, replay

__version__ = "0.1.0"

__all__ = [
    "CiaLevel",
    "CiaTriple",
    "CorruptLedger",
    "DEFAULT_WEIGHTS",
    "DependencyEdge",
    "DuplicateThreat",
    "EventKind",
    "IllegalTransition",
    "IntegrityDrift",
    "IntegrityError",
    "Ledger",
    "NotActive",
    "Organization",
    "ParseError",
    "SAVector",
    "SaEngine",
    "ScoredThreat",
    "ServiceNode",
    "ThreatRecord",
    "ThreatStatus",
    "ThreatType",
    "UnknownService",
    "WorldBundle",
    "WorldState",
    "accumulate",
    "adjusted_impact",
    "affected_impact",
    "load_world",
    "parse_threat_feed",
    "rank_threats",
    "reduce",
    "replay",
    "score_threat",
    "serialize_threats",
    "serialize_world",
    "validate_world",
]
