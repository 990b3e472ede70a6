"""Domain types shared by every other module, plus structural validation.

The world is a weighted directed service-dependency graph: nodes are
services owned by organizations, edges point provider -> dependent and
carry a dependency weight in (0, 1]. Threat reports arrive as 15-field
records and are scored into four-component SA vectors. All types here
are immutable values after construction and safe to share across
threads; numeric range rules are checked by ``validate_world`` rather
than at construction so that invalid worlds can be built and inspected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence, Tuple

# Componentwise float comparisons throughout the project use this tolerance.
TOLERANCE = 1e-9

_CIA_ALIASES = {
    "n": "N", "none": "N",
    "p": "P", "partial": "P",
    "c": "C", "complete": "C",
}


class UnknownService(KeyError):
    """A threat references a service id that does not exist in the world."""


class CiaLevel(Enum):
    """Qualitative confidentiality/integrity/availability impact level."""

    NONE = "N"
    PARTIAL = "P"
    COMPLETE = "C"

    @classmethod
    def parse(cls, text: str) -> "CiaLevel":
        """Parse a level from a letter or full word, case-insensitive."""
        key = str(text).strip().lower()
        if key not in _CIA_ALIASES:
            raise ValueError(f"not a CIA level: {text!r}")
        return cls(_CIA_ALIASES[key])

    @property
    def ordinal(self) -> int:
        return ("N", "P", "C").index(self.value)

    def __le__(self, other: "CiaLevel") -> bool:
        return self.ordinal <= other.ordinal


@dataclass(frozen=True)
class CiaTriple:
    """Impact levels for confidentiality, integrity and availability."""

    conf: CiaLevel
    intg: CiaLevel
    avl: CiaLevel

    @classmethod
    def parse(cls, value) -> "CiaTriple":
        """Parse from a 3-item sequence or a string like "CPN" / "C,P,N" / "(C, P, N)".

        Letters and full words are accepted, case-insensitive.
        """
        if isinstance(value, CiaTriple):
            return value
        if isinstance(value, str):
            parts = [p for p in _split_triple(value)]
        else:
            parts = list(value)
        if len(parts) != 3:
            raise ValueError(f"not a CIA triple: {value!r}")
        return cls(*(CiaLevel.parse(p) for p in parts))

    def compact(self) -> str:
        """Canonical 3-letter form, e.g. "CPN"."""
        return self.conf.value + self.intg.value + self.avl.value

    def __le__(self, other: "CiaTriple") -> bool:
        return (
            self.conf <= other.conf
            and self.intg <= other.intg
            and self.avl <= other.avl
        )


def _split_triple(text: str) -> list[str]:
    cleaned = text.strip().strip("()[]")
    for sep in (",", ";", "/", " "):
        if sep in cleaned:
            return [p for p in (s.strip() for s in cleaned.split(sep)) if p]
    # Compact form: three single letters.
    return list(cleaned.strip())


class ThreatType(Enum):
    VULNERABILITY = "vulnerability"
    ATTACK = "attack"
    INCIDENT = "incident"

    @classmethod
    def parse(cls, text: str) -> "ThreatType":
        key = str(text).strip().lower()
        for t in cls:
            if key == t.value or key == t.value[:3]:
                return t
        raise ValueError(f"not a threat type: {text!r}")


class Proto(Enum):
    TCP = "tcp"
    UDP = "udp"
    ICMP = "icmp"
    ANY = "any"


class Direction(Enum):
    FORWARD = "forward"
    BIDIRECTIONAL = "bidirectional"


@dataclass(frozen=True)
class ServiceNode:
    """A critical service provided by an organization."""

    sid: str
    oid: str
    crit: float
    p_e: float
    cia_demand: Tuple[float, float, float]


@dataclass(frozen=True)
class DependencyEdge:
    """Directed dependency: ``dst`` depends on the service ``src`` provides.

    The self-dependency weight of a service with itself is always 1 and is
    never stored as an edge (see ``cascade.SELF_DEPENDENCY_WEIGHT``).
    """

    src: str
    dst: str
    weight: float
    port: Optional[int] = None
    proto: Proto = Proto.ANY
    dir: Direction = Direction.FORWARD


@dataclass(frozen=True)
class Organization:
    """Org metadata: criticality, defenses, demands, links and inventory."""

    oid: str
    crit: float
    p_e: float
    cia_demand: Tuple[float, float, float]
    procedural_links: Tuple[Tuple[str, float], ...] = ()
    cpe_inventory: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ThreatRecord:
    """A shared threat report (vulnerability, attack or incident).

    ``affected_cia`` carries the impact the reporting organization announces
    actually occurred; it is required for incidents and optional otherwise.
    ``potential_cia`` carries the impact the threat could have on success.
    """

    tid: str
    ttype: ThreatType
    name: str
    p_a: float
    potential_cia: CiaTriple
    sid: str
    sensor_name: str
    category: str
    cpe_id: str
    received_at: float
    affected_cia: Optional[CiaTriple] = None
    vulid: Optional[str] = None
    atkid: Optional[str] = None
    port: Optional[int] = None
    proto: Optional[Proto] = None


@dataclass(frozen=True)
class SAVector:
    """Four-component situational-awareness vector.

    Components are nonnegative finite scalars: definite (damage already
    caused, instant plus cascaded), procedural, network and infrastructural
    (the three projected propagation risks).
    """

    definite: float
    procedural: float
    network: float
    infrastructural: float

    def __post_init__(self):
        for name, value in self.components().items():
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"SAVector.{name} must be nonnegative and finite, got {value!r}")

    @classmethod
    def zero(cls) -> "SAVector":
        return cls(0.0, 0.0, 0.0, 0.0)

    def components(self) -> dict[str, float]:
        return {
            "definite": self.definite,
            "procedural": self.procedural,
            "network": self.network,
            "infrastructural": self.infrastructural,
        }

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.definite, self.procedural, self.network, self.infrastructural)

    def __add__(self, other: "SAVector") -> "SAVector":
        a, b = self.as_tuple(), other.as_tuple()
        return SAVector(*(x + y for x, y in zip(a, b)))

    def weighted_sum(self, weights: Sequence[float]) -> float:
        return sum(w * x for w, x in zip(weights, self.as_tuple()))

    def close_to(self, other: "SAVector", tol: float = TOLERANCE) -> bool:
        return all(abs(x - y) <= tol for x, y in zip(self.as_tuple(), other.as_tuple()))


@dataclass(frozen=True)
class NetProbTable:
    """Propagation probabilities over threat network connections, keyed by
    lowercase Snort-style classification, with an "other" default row."""

    entries: Mapping[str, float]

    @property
    def default(self) -> float:
        return self.entries.get("other", 0.0)


@dataclass(frozen=True)
class WorldState:
    """The full scoring world: static graph and tables plus the dynamic
    threat ledger (active threats, accumulated network SA, history).

    Instances are immutable; state transitions produce a replacement via
    ``dataclasses.replace``. ``network_sa`` must equal the componentwise sum
    of the SA vectors of ``active_threats`` at all times (within tolerance).
    """

    services: Mapping[str, ServiceNode]
    edges: Tuple[DependencyEdge, ...]
    orgs: Mapping[str, Organization]
    net_prob_table: NetProbTable
    active_threats: Mapping[str, Tuple[ThreatRecord, SAVector]] = field(default_factory=dict)
    network_sa: SAVector = field(default_factory=SAVector.zero)
    history: Tuple[Tuple[float, str, SAVector], ...] = ()

    def owner(self, sid: str) -> Organization:
        """Organization that provides service ``sid``."""
        if sid not in self.services:
            raise UnknownService(sid)
        return self.orgs[self.services[sid].oid]


@dataclass(frozen=True)
class Violation:
    """One violated structural rule, naming the offending entity."""

    entity: str
    rule: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.rule}"


def _in_unit(value: float) -> bool:
    return 0.0 <= value <= 1.0


def validate_world(world: WorldState) -> list[Violation]:
    """Check every structural invariant; returns an empty list iff all hold.

    Violations are data, not failures: callers decide whether to raise.
    The check is pure, identical input yields an identical list.
    """
    out: list[Violation] = []

    for key, svc in sorted(world.services.items()):
        who = f"service {key}"
        if svc.sid != key:
            out.append(Violation(who, f"keyed as {key} but sid is {svc.sid}"))
        if not _in_unit(svc.crit):
            out.append(Violation(who, f"crit out of range: {svc.crit}"))
        if not _in_unit(svc.p_e):
            out.append(Violation(who, f"p_e out of range: {svc.p_e}"))
        if len(svc.cia_demand) != 3 or not all(_in_unit(v) for v in svc.cia_demand):
            out.append(Violation(who, f"cia_demand out of range: {svc.cia_demand}"))
        if svc.oid not in world.orgs:
            out.append(Violation(who, f"unknown organization {svc.oid}"))

    seen_pairs: set[tuple[str, str]] = set()
    for edge in world.edges:
        who = f"edge {edge.src}->{edge.dst}"
        if not (0.0 < edge.weight <= 1.0):
            out.append(Violation(who, f"weight out of range: {edge.weight}"))
        if edge.src == edge.dst:
            out.append(Violation(who, "self-dependency must not be stored"))
        for end in (edge.src, edge.dst):
            if end not in world.services:
                out.append(Violation(who, f"unknown service {end}"))
        if edge.port is not None and not (0 <= edge.port <= 65535):
            out.append(Violation(who, f"port out of range: {edge.port}"))
        if (edge.src, edge.dst) in seen_pairs:
            out.append(Violation(who, "duplicate edge for (src, dst) pair"))
        seen_pairs.add((edge.src, edge.dst))

    for key, org in sorted(world.orgs.items()):
        who = f"organization {key}"
        if org.oid != key:
            out.append(Violation(who, f"keyed as {key} but oid is {org.oid}"))
        if not _in_unit(org.crit):
            out.append(Violation(who, f"crit out of range: {org.crit}"))
        if not _in_unit(org.p_e):
            out.append(Violation(who, f"p_e out of range: {org.p_e}"))
        if len(org.cia_demand) != 3 or not all(_in_unit(v) for v in org.cia_demand):
            out.append(Violation(who, f"cia_demand out of range: {org.cia_demand}"))
        for target, prob in org.procedural_links:
            if target == key:
                out.append(Violation(who, "procedural link targets itself"))
            if target not in world.orgs:
                out.append(Violation(who, f"procedural link to unknown organization {target}"))
            if not _in_unit(prob):
                out.append(Violation(who, f"procedural link probability out of range: {prob}"))

    table = world.net_prob_table
    if "other" not in table.entries:
        out.append(Violation("net_prob_table", 'missing "other" default row'))
    for name, prob in sorted(table.entries.items()):
        if name != name.lower():
            out.append(Violation("net_prob_table", f"classification not lowercase: {name!r}"))
        if not _in_unit(prob):
            out.append(Violation("net_prob_table", f"probability out of range for {name!r}: {prob}"))

    total = SAVector.zero()
    for tid, (threat, sa) in sorted(world.active_threats.items()):
        who = f"threat {tid}"
        if threat.tid != tid:
            out.append(Violation(who, f"keyed as {tid} but tid is {threat.tid}"))
        if not _in_unit(threat.p_a):
            out.append(Violation(who, f"p_a out of range: {threat.p_a}"))
        if threat.sid not in world.services:
            out.append(Violation(who, f"unknown service {threat.sid}"))
        if threat.ttype is ThreatType.INCIDENT and threat.affected_cia is None:
            out.append(Violation(who, "incident must announce affected CIA impacts"))
        if threat.port is not None and not (0 <= threat.port <= 65535):
            out.append(Violation(who, f"port out of range: {threat.port}"))
        total = total + sa

    if not total.close_to(world.network_sa):
        out.append(
            Violation(
                "network_sa",
                f"not the sum over active threats: {world.network_sa.as_tuple()} != {total.as_tuple()}",
            )
        )
    return out
