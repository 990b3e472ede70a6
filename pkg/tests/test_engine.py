"""Engine behavior: conservation, durability wiring, resume."""

import pytest

from conftest import random_threat, random_world
from qrsacp.engine import DuplicateThreat, SaEngine
from qrsacp.model import SAVector, UnknownService
from qrsacp.savector import NotActive, ThreatStatus
from qrsacp.store import Ledger
import random


def _sum_active(engine):
    total = SAVector.zero()
    for _, sa in engine.world.active_threats.values():
        total = total + sa
    return total


def test_network_sa_is_sum_of_active_vectors(fixture_world, fixture_records):
    engine = SaEngine(fixture_world, clock=lambda: 0.0)
    for threat in fixture_records:
        engine.ingest(threat)
        assert engine.network_sa.close_to(_sum_active(engine))
    for tid in ("T01", "T02", "T03", "T04", "T05", "T06"):
        engine.feedback(tid)
        assert engine.network_sa.close_to(_sum_active(engine))
    assert len(engine.world.active_threats) == 19


def test_duplicate_and_unknown_are_rejected(fixture_world, fixture_records):
    engine = SaEngine(fixture_world, clock=lambda: 0.0)
    engine.ingest(fixture_records[0])
    with pytest.raises(DuplicateThreat):
        engine.ingest(fixture_records[0])

    import dataclasses

    ghost = dataclasses.replace(fixture_records[1], sid="S_999")
    with pytest.raises(UnknownService):
        engine.ingest(ghost)
    # The failed ingest left no trace.
    assert len(engine.world.active_threats) == 1


def test_feedback_requires_an_active_threat(fixture_world, fixture_records):
    engine = SaEngine(fixture_world, clock=lambda: 0.0)
    with pytest.raises(NotActive):
        engine.feedback("T01")
    engine.ingest(fixture_records[0])
    engine.feedback(fixture_records[0].tid)
    with pytest.raises(NotActive):
        engine.feedback(fixture_records[0].tid)
    resolved = engine.get(fixture_records[0].tid)
    assert resolved.status is ThreatStatus.RESOLVED


def test_engine_writes_world_loaded_once(tmp_path, fixture_world):
    ledger = Ledger(tmp_path / "ledger.jsonl")
    SaEngine(fixture_world, ledger=ledger, clock=lambda: 5.0)
    assert ledger.seq == 1

    # Resuming from the same ledger must not write a second one.
    resumed = SaEngine.resume(Ledger(tmp_path / "ledger.jsonl"), clock=lambda: 6.0)
    assert resumed.world.services.keys() == fixture_world.services.keys()


def test_resume_restores_live_state(tmp_path, fixture_world, fixture_records):
    path = tmp_path / "ledger.jsonl"
    live = SaEngine(fixture_world, ledger=Ledger(path), clock=lambda: 0.0)
    for threat in fixture_records[:8]:
        live.ingest(threat)
    live.feedback(fixture_records[2].tid)

    resumed = SaEngine.resume(Ledger(path), clock=lambda: 0.0)
    assert resumed.network_sa.close_to(live.network_sa)
    assert set(resumed.world.active_threats) == set(live.world.active_threats)
    assert len(resumed.history) == len(live.history)
    for (ts_a, label_a, sa_a), (ts_b, label_b, sa_b) in zip(live.history, resumed.history):
        assert (ts_a, label_a) == (ts_b, label_b)
        assert sa_a.close_to(sa_b)
    for threat in fixture_records[:8]:
        a, b = live.get(threat.tid), resumed.get(threat.tid)
        assert a.sa.close_to(b.sa)
        assert a.status is b.status

    # The resumed engine keeps appending where the old one stopped.
    resumed.ingest(fixture_records[8])
    assert SaEngine.resume(Ledger(path), clock=lambda: 0.0).network_sa.close_to(
        resumed.network_sa
    )


def test_resume_needs_a_world(tmp_path):
    bare = Ledger(tmp_path / "bare.jsonl")
    with pytest.raises(ValueError):
        SaEngine.resume(bare)


def test_ranked_filters_by_status(fixture_world, fixture_records):
    engine = SaEngine(fixture_world, clock=lambda: 0.0)
    for threat in fixture_records[:5]:
        engine.ingest(threat)
    engine.feedback("T02")
    active = engine.ranked(ThreatStatus.ACTIVE)
    resolved = engine.ranked(ThreatStatus.RESOLVED)
    assert {st.threat.tid for st in active} == {"T01", "T03", "T04", "T05"}
    assert [st.threat.tid for st in resolved] == ["T02"]
    priorities = [st.priority for st in active]
    assert priorities == sorted(priorities, reverse=True)


def test_randomized_ingest_feedback_cycles_conserve(tmp_path):
    rng = random.Random(20260601)
    world = random_world(rng, max_services=8, max_orgs=4)
    engine = SaEngine(world, ledger=Ledger(tmp_path / "ledger.jsonl"), clock=lambda: 0.0)
    alive = []
    for i in range(200):
        if alive and rng.random() < 0.4:
            tid = alive.pop(rng.randrange(len(alive)))
            engine.feedback(tid)
        else:
            threat = random_threat(rng, world, tid=f"r{i}")
            engine.ingest(threat)
            alive.append(threat.tid)
        assert engine.network_sa.close_to(_sum_active(engine))
    # And the ledger agrees with the live engine at the end.
    resumed = SaEngine.resume(Ledger(tmp_path / "ledger.jsonl"), clock=lambda: 0.0)
    assert resumed.network_sa.close_to(engine.network_sa)
