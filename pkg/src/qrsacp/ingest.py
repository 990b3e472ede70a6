"""World-bundle loading and threat-feed parsing.

A world bundle is six CSV files with fixed headers:

    services.csv    sid,oid,crit,p_e,conf_demand,integ_demand,avl_demand
    edges.csv       src,dst,weight,port,proto,dir
    orgs.csv        oid,crit,p_e,conf_demand,integ_demand,avl_demand
    procedural.csv  src_oid,dst_oid,prob
    netprob.csv     classification,prob        (default row: "other")
    cpe.csv         oid,cpe_id

Threat feeds are newline-delimited JSON, one record per line with fields
tid, type, vulid, atkid, name, p_a, cia, affected_cia, sid, sensor,
category, port, proto, cpe_id, received_at. Malformed feed lines are
collected as rejects with reasons and never abort the batch; malformed
bundle files raise with file/line context.

Loading normalizes edges: a bidirectional row becomes two forward edges,
and duplicate (src, dst) rows collapse to the one with maximum weight
(first wins on ties). ``serialize_world``/``serialize_threats`` emit the
canonical form these loaders round-trip byte-for-byte.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Tuple, Union

from .model import (
    CiaTriple,
    DependencyEdge,
    Direction,
    NetProbTable,
    Organization,
    Proto,
    ServiceNode,
    ThreatRecord,
    ThreatType,
    Violation,
    WorldState,
    validate_world,
)

SERVICES_HEADER = ["sid", "oid", "crit", "p_e", "conf_demand", "integ_demand", "avl_demand"]
EDGES_HEADER = ["src", "dst", "weight", "port", "proto", "dir"]
ORGS_HEADER = ["oid", "crit", "p_e", "conf_demand", "integ_demand", "avl_demand"]
PROCEDURAL_HEADER = ["src_oid", "dst_oid", "prob"]
NETPROB_HEADER = ["classification", "prob"]
CPE_HEADER = ["oid", "cpe_id"]

FEED_FIELDS = [
    "tid", "type", "vulid", "atkid", "name", "p_a", "cia", "affected_cia",
    "sid", "sensor", "category", "port", "proto", "cpe_id", "received_at",
]


class ParseError(ValueError):
    """A file could not be parsed; carries file, line and reason."""

    def __init__(self, file: str, line: int, reason: str):
        super().__init__(f"{file}:{line}: {reason}")
        self.file = file
        self.line = line
        self.reason = reason


class IntegrityError(ValueError):
    """The loaded world violates structural invariants."""

    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


@dataclass(frozen=True)
class WorldBundle:
    """Paths of the six world files."""

    services: Path
    edges: Path
    orgs: Path
    procedural: Path
    netprob: Path
    cpe: Path

    @classmethod
    def from_dir(cls, directory: Union[str, Path]) -> "WorldBundle":
        d = Path(directory)
        return cls(
            services=d / "services.csv",
            edges=d / "edges.csv",
            orgs=d / "orgs.csv",
            procedural=d / "procedural.csv",
            netprob=d / "netprob.csv",
            cpe=d / "cpe.csv",
        )


@dataclass(frozen=True)
class RejectedRecord:
    """A feed line that failed validation, with its reason."""

    line: int
    reason: str
    raw: str


def _rows(text: str, filename: str, header: list[str]) -> Iterable[tuple[int, dict]]:
    reader = csv.reader(io.StringIO(text))
    try:
        first = next(reader)
    except StopIteration:
        raise ParseError(filename, 1, "empty file, expected header")
    if [h.strip() for h in first] != header:
        raise ParseError(filename, 1, f"expected header {','.join(header)}")
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise ParseError(filename, lineno, f"expected {len(header)} columns, got {len(row)}")
        yield lineno, {key: cell.strip() for key, cell in zip(header, row)}


def _number(raw: str, filename: str, lineno: int, column: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ParseError(filename, lineno, f"{column} is not a number: {raw!r}")


def _parse_services(text: str, filename: str) -> dict[str, ServiceNode]:
    services: dict[str, ServiceNode] = {}
    for lineno, row in _rows(text, filename, SERVICES_HEADER):
        if not row["sid"]:
            raise ParseError(filename, lineno, "sid must not be empty")
        if row["sid"] in services:
            raise ParseError(filename, lineno, f"duplicate sid {row['sid']}")
        services[row["sid"]] = ServiceNode(
            sid=row["sid"],
            oid=row["oid"],
            crit=_number(row["crit"], filename, lineno, "crit"),
            p_e=_number(row["p_e"], filename, lineno, "p_e"),
            cia_demand=(
                _number(row["conf_demand"], filename, lineno, "conf_demand"),
                _number(row["integ_demand"], filename, lineno, "integ_demand"),
                _number(row["avl_demand"], filename, lineno, "avl_demand"),
            ),
        )
    return services


def _parse_edges(text: str, filename: str) -> list[DependencyEdge]:
    raw_edges: list[DependencyEdge] = []
    for lineno, row in _rows(text, filename, EDGES_HEADER):
        port: Optional[int] = None
        if row["port"]:
            try:
                port = int(row["port"])
            except ValueError:
                raise ParseError(filename, lineno, f"port is not an integer: {row['port']!r}")
        try:
            proto = Proto(row["proto"].lower()) if row["proto"] else Proto.ANY
        except ValueError:
            raise ParseError(filename, lineno, f"unknown proto: {row['proto']!r}")
        try:
            direction = Direction(row["dir"].lower()) if row["dir"] else Direction.FORWARD
        except ValueError:
            raise ParseError(filename, lineno, f"unknown dir: {row['dir']!r}")
        raw_edges.append(
            DependencyEdge(
                src=row["src"],
                dst=row["dst"],
                weight=_number(row["weight"], filename, lineno, "weight"),
                port=port,
                proto=proto,
                dir=direction,
            )
        )
    return normalize_edges(raw_edges)


def normalize_edges(raw_edges: Iterable[DependencyEdge]) -> list[DependencyEdge]:
    """Expand bidirectional rows into two forward edges and collapse
    duplicate (src, dst) pairs keeping the max-weight link (first wins on
    ties), so the cascade never double-counts a pair."""
    expanded: list[DependencyEdge] = []
    for edge in raw_edges:
        if edge.dir is Direction.BIDIRECTIONAL:
            expanded.append(
                DependencyEdge(edge.src, edge.dst, edge.weight, edge.port, edge.proto)
            )
            expanded.append(
                DependencyEdge(edge.dst, edge.src, edge.weight, edge.port, edge.proto)
            )
        else:
            expanded.append(edge)
    best: dict[tuple[str, str], DependencyEdge] = {}
    for edge in expanded:
        pair = (edge.src, edge.dst)
        if pair not in best or edge.weight > best[pair].weight:
            best[pair] = edge
    return [best[pair] for pair in sorted(best)]


def _parse_orgs(text: str, filename: str) -> dict[str, Organization]:
    orgs: dict[str, Organization] = {}
    for lineno, row in _rows(text, filename, ORGS_HEADER):
        if not row["oid"]:
            raise ParseError(filename, lineno, "oid must not be empty")
        if row["oid"] in orgs:
            raise ParseError(filename, lineno, f"duplicate oid {row['oid']}")
        orgs[row["oid"]] = Organization(
            oid=row["oid"],
            crit=_number(row["crit"], filename, lineno, "crit"),
            p_e=_number(row["p_e"], filename, lineno, "p_e"),
            cia_demand=(
                _number(row["conf_demand"], filename, lineno, "conf_demand"),
                _number(row["integ_demand"], filename, lineno, "integ_demand"),
                _number(row["avl_demand"], filename, lineno, "avl_demand"),
            ),
        )
    return orgs


def _parse_procedural(text: str, filename: str) -> dict[str, list[tuple[str, float]]]:
    links: dict[str, list[tuple[str, float]]] = {}
    for lineno, row in _rows(text, filename, PROCEDURAL_HEADER):
        prob = _number(row["prob"], filename, lineno, "prob")
        links.setdefault(row["src_oid"], []).append((row["dst_oid"], prob))
    return links


def _parse_netprob(text: str, filename: str) -> NetProbTable:
    entries: dict[str, float] = {}
    for lineno, row in _rows(text, filename, NETPROB_HEADER):
        name = row["classification"].lower()
        if name in entries:
            raise ParseError(filename, lineno, f"duplicate classification {name!r}")
        entries[name] = _number(row["prob"], filename, lineno, "prob")
    return NetProbTable(entries)


def _parse_cpe(text: str, filename: str) -> dict[str, set[str]]:
    inventory: dict[str, set[str]] = {}
    for lineno, row in _rows(text, filename, CPE_HEADER):
        if not row["cpe_id"]:
            raise ParseError(filename, lineno, "cpe_id must not be empty")
        inventory.setdefault(row["oid"], set()).add(row["cpe_id"])
    return inventory


def load_world_from_texts(texts: dict[str, str]) -> WorldState:
    """Build and validate a world from the six file texts, keyed by the
    canonical file names (services.csv, edges.csv, ...)."""
    services = _parse_services(texts["services.csv"], "services.csv")
    edges = _parse_edges(texts["edges.csv"], "edges.csv")
    orgs = _parse_orgs(texts["orgs.csv"], "orgs.csv")
    links = _parse_procedural(texts["procedural.csv"], "procedural.csv")
    table = _parse_netprob(texts["netprob.csv"], "netprob.csv")
    inventory = _parse_cpe(texts["cpe.csv"], "cpe.csv")

    for oid in sorted(set(links) | set(inventory)):
        if oid not in orgs:
            raise IntegrityError([Violation(f"organization {oid}", "referenced but not declared")])
    full_orgs = {
        oid: Organization(
            oid=org.oid,
            crit=org.crit,
            p_e=org.p_e,
            cia_demand=org.cia_demand,
            procedural_links=tuple(sorted(links.get(oid, []))),
            cpe_inventory=frozenset(inventory.get(oid, set())),
        )
        for oid, org in orgs.items()
    }

    world = WorldState(
        services=services,
        edges=tuple(edges),
        orgs=full_orgs,
        net_prob_table=table,
    )
    violations = validate_world(world)
    if violations:
        raise IntegrityError(violations)
    return world


def load_world(bundle: WorldBundle) -> WorldState:
    """Load a validated world with an empty ledger and zero network SA."""
    texts = {
        "services.csv": bundle.services.read_text(),
        "edges.csv": bundle.edges.read_text(),
        "orgs.csv": bundle.orgs.read_text(),
        "procedural.csv": bundle.procedural.read_text(),
        "netprob.csv": bundle.netprob.read_text(),
        "cpe.csv": bundle.cpe.read_text(),
    }
    return load_world_from_texts(texts)


def _fmt(value: float) -> str:
    # repr of a float is the shortest string that round-trips exactly.
    return repr(value)


def serialize_world(world: WorldState) -> dict[str, str]:
    """Canonical file texts for a world: fixed headers, sorted rows,
    shortest-round-trip floats. load(serialize(w)) == w and the texts are
    a fixed point of serialize∘load."""
    out: dict[str, str] = {}

    lines = [",".join(SERVICES_HEADER)]
    for sid in sorted(world.services):
        s = world.services[sid]
        lines.append(
            ",".join(
                [s.sid, s.oid, _fmt(s.crit), _fmt(s.p_e)]
                + [_fmt(v) for v in s.cia_demand]
            )
        )
    out["services.csv"] = "\n".join(lines) + "\n"

    lines = [",".join(EDGES_HEADER)]
    for e in sorted(world.edges, key=lambda e: (e.src, e.dst)):
        lines.append(
            ",".join(
                [
                    e.src,
                    e.dst,
                    _fmt(e.weight),
                    "" if e.port is None else str(e.port),
                    e.proto.value,
                    e.dir.value,
                ]
            )
        )
    out["edges.csv"] = "\n".join(lines) + "\n"

    lines = [",".join(ORGS_HEADER)]
    for oid in sorted(world.orgs):
        o = world.orgs[oid]
        lines.append(
            ",".join(
                [o.oid, _fmt(o.crit), _fmt(o.p_e)] + [_fmt(v) for v in o.cia_demand]
            )
        )
    out["orgs.csv"] = "\n".join(lines) + "\n"

    lines = [",".join(PROCEDURAL_HEADER)]
    for oid in sorted(world.orgs):
        for target, prob in sorted(world.orgs[oid].procedural_links):
            lines.append(",".join([oid, target, _fmt(prob)]))
    out["procedural.csv"] = "\n".join(lines) + "\n"

    lines = [",".join(NETPROB_HEADER)]
    for name in sorted(world.net_prob_table.entries):
        lines.append(",".join([name, _fmt(world.net_prob_table.entries[name])]))
    out["netprob.csv"] = "\n".join(lines) + "\n"

    lines = [",".join(CPE_HEADER)]
    for oid in sorted(world.orgs):
        for cpe in sorted(world.orgs[oid].cpe_inventory):
            lines.append(",".join([oid, cpe]))
    out["cpe.csv"] = "\n".join(lines) + "\n"

    return out


def parse_threat_record(
    obj: dict,
    clock: Callable[[], float] = time.time,
) -> ThreatRecord:
    """Build one ThreatRecord from a feed-format dict; raises ValueError
    with the reason on any malformed field."""
    if not isinstance(obj, dict):
        raise ValueError("record is not an object")
    missing = [f for f in ("tid", "type", "name", "p_a", "cia", "sid", "sensor", "category", "cpe_id") if f not in obj]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")

    ttype = ThreatType.parse(obj["type"])
    p_a = obj["p_a"]
    if not isinstance(p_a, (int, float)) or isinstance(p_a, bool):
        raise ValueError(f"p_a is not a number: {p_a!r}")
    if not 0.0 <= float(p_a) <= 1.0:
        raise ValueError(f"probability out of range: p_a={p_a}")

    potential = CiaTriple.parse(obj["cia"])
    affected = None
    if obj.get("affected_cia") is not None:
        affected = CiaTriple.parse(obj["affected_cia"])
    if ttype is ThreatType.INCIDENT and affected is None:
        raise ValueError("incident must announce affected_cia")

    port = obj.get("port")
    if port is not None:
        if not isinstance(port, int) or isinstance(port, bool) or not 0 <= port <= 65535:
            raise ValueError(f"port out of range: {port!r}")
    proto = None
    if obj.get("proto") is not None:
        try:
            proto = Proto(str(obj["proto"]).lower())
        except ValueError:
            raise ValueError(f"unknown proto: {obj['proto']!r}")

    received_at = obj.get("received_at")
    if received_at is None:
        received_at = clock()
    elif not isinstance(received_at, (int, float)) or isinstance(received_at, bool):
        raise ValueError(f"received_at is not a timestamp: {received_at!r}")

    return ThreatRecord(
        tid=str(obj["tid"]),
        ttype=ttype,
        name=str(obj["name"]),
        p_a=float(p_a),
        potential_cia=potential,
        sid=str(obj["sid"]),
        sensor_name=str(obj["sensor"]),
        category=str(obj["category"]),
        cpe_id=str(obj["cpe_id"]),
        received_at=float(received_at),
        affected_cia=affected,
        vulid=None if obj.get("vulid") is None else str(obj["vulid"]),
        atkid=None if obj.get("atkid") is None else str(obj["atkid"]),
        port=port,
        proto=proto,
    )


def parse_threat_feed(
    stream: Union[str, Iterable[str]],
    clock: Callable[[], float] = time.time,
) -> Tuple[list[ThreatRecord], list[RejectedRecord]]:
    """Parse a newline-delimited JSON feed.

    Well-formed records come back in arrival order; malformed lines are
    collected as rejects with reasons and never abort the batch. Blank
    lines are skipped.
    """
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = [line.rstrip("\n") for line in stream]

    records: list[ThreatRecord] = []
    rejects: list[RejectedRecord] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            rejects.append(RejectedRecord(lineno, f"invalid JSON: {exc.msg}", line))
            continue
        try:
            records.append(parse_threat_record(obj, clock=clock))
        except ValueError as exc:
            rejects.append(RejectedRecord(lineno, str(exc), line))
    return records, rejects


def threat_to_dict(threat: ThreatRecord) -> dict:
    """Feed-format dict for one record (the serialization inverse of
    ``parse_threat_record``)."""
    return {
        "tid": threat.tid,
        "type": threat.ttype.value,
        "vulid": threat.vulid,
        "atkid": threat.atkid,
        "name": threat.name,
        "p_a": threat.p_a,
        "cia": threat.potential_cia.compact(),
        "affected_cia": None if threat.affected_cia is None else threat.affected_cia.compact(),
        "sid": threat.sid,
        "sensor": threat.sensor_name,
        "category": threat.category,
        "port": threat.port,
        "proto": None if threat.proto is None else threat.proto.value,
        "cpe_id": threat.cpe_id,
        "received_at": threat.received_at,
    }


def serialize_threats(records: Iterable[ThreatRecord]) -> str:
    """Newline-delimited JSON feed text; parse_threat_feed round-trips it."""
    return "".join(
        json.dumps(threat_to_dict(t), sort_keys=True, separators=(",", ":")) + "\n"
        for t in records
    )
