"""Durable event ledger with deterministic replay.

The ledger is an append-only ``ledger.jsonl``: one JSON object per line,
one line per event. Fields per line:

    seq        integer, 1-based, strictly increasing, gapless
    timestamp  seconds since the epoch (float)
    kind       "world_loaded" | "threat_scored" | "feedback_reduced"
    payload    kind-specific object, see below
    post_sa    [definite, procedural, network, infrastructural] after the event
    checksum   sha256 hex of the canonical JSON of the other five fields

Payloads:

    world_loaded      {"bundle": {filename: text}}: the six world files,
                      embedded so the ledger replays self-contained.
                      Legal only as the very first event.
    threat_scored     {"threat": feed-format record, "sa": [d, p, n, i]}
    feedback_reduced  {"tid": threat id}

Appends are durable before they return (flush + fsync). Every
``SNAPSHOT_INTERVAL`` events a ``snapshot.json`` with the rolled-up state
is written next to the ledger as a recovery convenience; replay always
re-verifies the full line sequence. Truncating the file at any line
boundary leaves a replayable prefix.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .ingest import load_world_from_texts, parse_threat_record, threat_to_dict
from .model import SAVector, ThreatRecord, WorldState
from .savector import accumulate, reduce

logger = logging.getLogger(__name__)

SNAPSHOT_INTERVAL = 1000
SNAPSHOT_NAME = "snapshot.json"


class EventKind(Enum):
    WORLD_LOADED = "world_loaded"
    THREAT_SCORED = "threat_scored"
    FEEDBACK_REDUCED = "feedback_reduced"


class IllegalTransition(ValueError):
    """The event is not legal in the current ledger state."""


class IoFailure(RuntimeError):
    """The underlying file could not be written or synced."""


class CorruptLedger(ValueError):
    """Replay hit a seq gap, checksum mismatch, or impossible transition."""

    def __init__(self, reason: str, last_good_seq: int):
        super().__init__(f"{reason} (last good seq {last_good_seq})")
        self.reason = reason
        self.last_good_seq = last_good_seq


@dataclass(frozen=True)
class LedgerEvent:
    seq: int
    timestamp: float
    kind: EventKind
    payload: dict
    post_sa: SAVector
    checksum: str

    def to_line(self) -> str:
        body = _event_body(self.seq, self.timestamp, self.kind, self.payload, self.post_sa)
        body["checksum"] = self.checksum
        return json.dumps(body, sort_keys=True, separators=(",", ":"))


def _event_body(seq: int, timestamp: float, kind: EventKind, payload: dict, post_sa: SAVector) -> dict:
    return {
        "seq": seq,
        "timestamp": timestamp,
        "kind": kind.value,
        "payload": payload,
        "post_sa": list(post_sa.as_tuple()),
    }


def _checksum(body: dict) -> str:
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass
class ReplayState:
    """Rolled-up ledger state: what a restarted process resumes from."""

    seq: int = 0
    network_sa: SAVector = field(default_factory=SAVector.zero)
    active: Dict[str, Tuple[ThreatRecord, SAVector]] = field(default_factory=dict)
    resolved: Dict[str, Tuple[ThreatRecord, SAVector]] = field(default_factory=dict)
    world: Optional[WorldState] = None
    history: List[Tuple[float, str, SAVector]] = field(default_factory=list)
    scored_order: List[str] = field(default_factory=list)

    def apply(self, event: LedgerEvent) -> None:
        """Advance by one event; raises IllegalTransition if it cannot
        follow from the current state."""
        label = event.kind.value
        if event.kind is EventKind.WORLD_LOADED:
            if self.seq != event.seq - 1 or event.seq != 1:
                raise IllegalTransition("world_loaded is only legal as the first event")
            self.world = load_world_from_texts(event.payload["bundle"])
        elif event.kind is EventKind.THREAT_SCORED:
            threat = parse_threat_record(event.payload["threat"])
            if threat.tid in self.active or threat.tid in self.resolved:
                raise IllegalTransition(f"threat {threat.tid} already recorded")
            sa = SAVector(*event.payload["sa"])
            self.active[threat.tid] = (threat, sa)
            self.scored_order.append(threat.tid)
            self.network_sa = accumulate(self.network_sa, sa)
            label = f"{label} {threat.tid}"
        elif event.kind is EventKind.FEEDBACK_REDUCED:
            tid = event.payload["tid"]
            if tid not in self.active:
                raise IllegalTransition(f"feedback for unknown or resolved threat {tid}")
            threat, sa = self.active.pop(tid)
            self.resolved[tid] = (threat, sa)
            self.network_sa = reduce(self.network_sa, sa)
            label = f"{label} {tid}"
        self.seq = event.seq
        self.history.append((event.timestamp, label, self.network_sa))

    def record(self, tid: str) -> Optional[Tuple[ThreatRecord, SAVector]]:
        """Look up one threat and its vector, active or resolved."""
        return self.active.get(tid) or self.resolved.get(tid)

    def snapshot_dict(self) -> dict:
        return {
            "seq": self.seq,
            "network_sa": list(self.network_sa.as_tuple()),
            "active": {
                tid: {"threat": threat_to_dict(t), "sa": list(sa.as_tuple())}
                for tid, (t, sa) in sorted(self.active.items())
            },
            "resolved": {
                tid: {"threat": threat_to_dict(t), "sa": list(sa.as_tuple())}
                for tid, (t, sa) in sorted(self.resolved.items())
            },
        }


class Ledger:
    """Single-writer append-only event log.

    Opening an existing file replays it first, so appends continue the
    sequence; a fresh path starts at seq 1.
    """

    def __init__(self, path: Union[str, Path], snapshot_interval: int = SNAPSHOT_INTERVAL):
        self.path = Path(path)
        self.snapshot_interval = snapshot_interval
        if self.path.exists() and self.path.stat().st_size > 0:
            self._state = replay(self.path)
        else:
            self._state = ReplayState()

    @property
    def seq(self) -> int:
        return self._state.seq

    @property
    def network_sa(self) -> SAVector:
        return self._state.network_sa

    @property
    def state(self) -> ReplayState:
        return self._state

    def append(self, kind: EventKind, payload: dict, timestamp: float) -> LedgerEvent:
        """Validate, persist, and apply one event; returns it with its seq.

        The write is flushed and fsynced before this returns, so an
        acknowledged event survives a crash.
        """
        seq = self._state.seq + 1
        post_sa = self._post_sa(kind, payload)
        body = _event_body(seq, timestamp, kind, payload, post_sa)
        event = LedgerEvent(seq, timestamp, kind, payload, post_sa, _checksum(body))
        try:
            self._write_line(event.to_line())
        except OSError as exc:
            raise IoFailure(f"cannot append to {self.path}: {exc}") from exc
        # _post_sa already vetted the transition, so apply cannot fail here
        # and memory only advances once the line is on disk.
        self._state.apply(event)
        if self.snapshot_interval > 0 and seq % self.snapshot_interval == 0:
            self._write_snapshot()
        return event

    def _post_sa(self, kind: EventKind, payload: dict) -> SAVector:
        """Validate the transition against current state and compute the
        vector the event will leave behind."""
        if kind is EventKind.THREAT_SCORED:
            if "sa" not in payload or "threat" not in payload:
                raise IllegalTransition("threat_scored payload needs threat and sa")
            tid = payload["threat"].get("tid") if isinstance(payload["threat"], dict) else None
            if tid in self._state.active or tid in self._state.resolved:
                raise IllegalTransition(f"threat {tid} already recorded")
            try:
                sa = SAVector(*payload["sa"])
            except (TypeError, ValueError) as exc:
                raise IllegalTransition(f"malformed sa payload: {exc}") from exc
            return accumulate(self._state.network_sa, sa)
        if kind is EventKind.FEEDBACK_REDUCED:
            tid = payload.get("tid")
            if tid not in self._state.active:
                raise IllegalTransition(f"feedback for unknown or resolved threat {tid}")
            return reduce(self._state.network_sa, self._state.active[tid][1])
        if kind is EventKind.WORLD_LOADED:
            if self._state.seq != 0:
                raise IllegalTransition("world_loaded is only legal as the first event")
            if "bundle" not in payload:
                raise IllegalTransition("world_loaded payload needs bundle texts")
            return self._state.network_sa
        raise IllegalTransition(f"unknown event kind {kind!r}")

    def _write_line(self, line: str) -> None:
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _write_snapshot(self) -> None:
        target = self.path.parent / SNAPSHOT_NAME
        tmp = target.with_suffix(".json.tmp")
        try:
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(self._state.snapshot_dict(), fh, sort_keys=True, indent=2)
                fh.write("\n")
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, target)
        except OSError as exc:
            raise IoFailure(f"cannot write snapshot next to {self.path}: {exc}") from exc
        logger.info("snapshot at seq %d -> %s", self._state.seq, target)


def replay(path: Union[str, Path]) -> ReplayState:
    """Rebuild state from a ledger file, verifying every line.

    Checksums, gapless 1-based seqs, and transition legality are all
    checked; the first violation raises CorruptLedger carrying the last
    seq that was still good. An empty or missing file replays to the
    zero state.
    """
    path = Path(path)
    state = ReplayState()
    if not path.exists():
        return state
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                raise CorruptLedger(f"line {lineno} is not valid JSON", state.seq)
            expected = {"seq", "timestamp", "kind", "payload", "post_sa", "checksum"}
            if not isinstance(obj, dict) or set(obj) != expected:
                raise CorruptLedger(f"line {lineno} has wrong fields", state.seq)
            body = {k: obj[k] for k in obj if k != "checksum"}
            if _checksum(body) != obj["checksum"]:
                raise CorruptLedger(f"checksum mismatch at line {lineno}", state.seq)
            if obj["seq"] != state.seq + 1:
                raise CorruptLedger(
                    f"seq gap at line {lineno}: expected {state.seq + 1}, found {obj['seq']}",
                    state.seq,
                )
            try:
                kind = EventKind(obj["kind"])
            except ValueError:
                raise CorruptLedger(f"unknown event kind at line {lineno}", state.seq)
            event = LedgerEvent(
                seq=obj["seq"],
                timestamp=obj["timestamp"],
                kind=kind,
                payload=obj["payload"],
                post_sa=SAVector(*obj["post_sa"]),
                checksum=obj["checksum"],
            )
            try:
                state.apply(event)
            except (IllegalTransition, ValueError) as exc:
                raise CorruptLedger(f"line {lineno}: {exc}", event.seq - 1)
            if not state.network_sa.close_to(event.post_sa):
                raise CorruptLedger(
                    f"post_sa mismatch at line {lineno}", event.seq - 1
                )
    return state
