"""Shared fixtures and seeded generators for the test suite."""

from __future__ import annotations

import random
from pathlib import Path
from typing import Optional

import pytest

from qrsacp.model import (
    CiaTriple,
    DependencyEdge,
    NetProbTable,
    Organization,
    Proto,
    ServiceNode,
    ThreatRecord,
    ThreatType,
    WorldState,
)

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "src" / "qrsacp" / "data"

CPE_POOL = tuple(f"cpe-{i}" for i in range(1, 8))
CATEGORY_POOL = ("scan", "trojan-activity", "attempted-user", "nonsense-class")

BASE_TABLE = NetProbTable(
    {"other": 0.1, "scan": 0.2, "trojan-activity": 1.0, "attempted-user": 0.3}
)


def make_service(sid: str, oid: str, crit: float, p_e: float = 0.0) -> ServiceNode:
    return ServiceNode(sid=sid, oid=oid, crit=crit, p_e=p_e, cia_demand=(0.5, 0.5, 0.5))


def make_org(
    oid: str,
    crit: float = 0.5,
    p_e: float = 0.0,
    links: tuple = (),
    cpes: frozenset = frozenset(),
) -> Organization:
    return Organization(
        oid=oid,
        crit=crit,
        p_e=p_e,
        cia_demand=(0.5, 0.5, 0.5),
        procedural_links=links,
        cpe_inventory=cpes,
    )


def make_threat(
    sid: str,
    ttype: ThreatType = ThreatType.INCIDENT,
    cia: str = "CCC",
    affected: Optional[str] = None,
    p_a: float = 1.0,
    tid: str = "t1",
    category: str = "other",
    cpe_id: str = "cpe-1",
    port: Optional[int] = None,
    proto: Optional[Proto] = None,
    received_at: float = 0.0,
) -> ThreatRecord:
    if affected is None and ttype is ThreatType.INCIDENT:
        affected = cia
    return ThreatRecord(
        tid=tid,
        ttype=ttype,
        name="synthetic",
        p_a=p_a,
        potential_cia=CiaTriple.parse(cia),
        sid=sid,
        sensor_name="test-sensor",
        category=category,
        cpe_id=cpe_id,
        received_at=received_at,
        affected_cia=CiaTriple.parse(affected) if affected else None,
        port=port,
        proto=proto,
    )


def random_world(rng: random.Random, max_services: int = 10, max_orgs: int = 5) -> WorldState:
    """A small valid world: random digraph (cycles allowed), random orgs
    with procedural links and CPE inventories."""
    n_orgs = rng.randint(1, max_orgs)
    oids = [f"org{i}" for i in range(1, n_orgs + 1)]
    orgs = {}
    for oid in oids:
        others = [o for o in oids if o != oid]
        links = tuple(
            sorted(
                (target, round(rng.uniform(0.05, 1.0), 3))
                for target in rng.sample(others, k=rng.randint(0, len(others)))
            )
        )
        orgs[oid] = Organization(
            oid=oid,
            crit=round(rng.uniform(0.05, 1.0), 3),
            p_e=round(rng.uniform(0.0, 0.95), 3),
            cia_demand=(0.5, 0.5, 0.5),
            procedural_links=links,
            cpe_inventory=frozenset(rng.sample(CPE_POOL, k=rng.randint(0, 4))),
        )

    n_services = rng.randint(1, max_services)
    services = {}
    for i in range(1, n_services + 1):
        sid = f"svc{i}"
        services[sid] = ServiceNode(
            sid=sid,
            oid=rng.choice(oids),
            crit=round(rng.uniform(0.05, 1.0), 3),
            p_e=round(rng.uniform(0.0, 0.95), 3),
            cia_demand=(0.5, 0.5, 0.5),
        )

    sids = sorted(services)
    pairs = [(a, b) for a in sids for b in sids if a != b]
    rng.shuffle(pairs)
    edges = []
    for a, b in pairs[: rng.randint(0, min(len(pairs), 2 * n_services))]:
        if rng.random() < 0.2:
            port, proto = rng.choice([(22, Proto.TCP), (443, Proto.TCP), (53, Proto.UDP)])
        else:
            port, proto = None, Proto.ANY
        edges.append(
            DependencyEdge(
                src=a,
                dst=b,
                weight=round(rng.uniform(0.05, 1.0), 3),
                port=port,
                proto=proto,
            )
        )
    return WorldState(
        services=services,
        edges=tuple(edges),
        orgs=orgs,
        net_prob_table=BASE_TABLE,
    )


def random_threat(
    rng: random.Random,
    world: WorldState,
    ttype: Optional[ThreatType] = None,
    tid: Optional[str] = None,
) -> ThreatRecord:
    levels = "NPC"
    triple = "".join(rng.choice(levels) for _ in range(3))
    chosen = ttype if ttype is not None else rng.choice(list(ThreatType))
    affected = (
        "".join(rng.choice(levels) for _ in range(3))
        if chosen is ThreatType.INCIDENT
        else None
    )
    if rng.random() < 0.15:
        port, proto = rng.choice([(22, Proto.TCP), (53, Proto.UDP)])
    else:
        port, proto = None, None
    return make_threat(
        sid=rng.choice(sorted(world.services)),
        ttype=chosen,
        cia=triple,
        affected=affected,
        p_a=round(rng.uniform(0.0, 1.0), 3),
        tid=tid or f"t{rng.randrange(10 ** 9)}",
        category=rng.choice(CATEGORY_POOL),
        cpe_id=rng.choice(CPE_POOL),
        port=port,
        proto=proto,
        received_at=float(rng.randrange(1, 10 ** 6)),
    )


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def fixture_world():
    from qrsacp.ingest import WorldBundle, load_world

    return load_world(WorldBundle.from_dir(FIXTURE_DIR))


@pytest.fixture(scope="session")
def fixture_records():
    from qrsacp.ingest import parse_threat_feed

    records, rejects = parse_threat_feed((FIXTURE_DIR / "feed.jsonl").read_text())
    assert not rejects
    return records
