"""Live scoring engine.

One SaEngine owns one world plus the running network SA. All mutation
(ingest, feedback) funnels through a single lock and, when a ledger is
attached, every mutation is durable before it is acknowledged. Scoring
itself is pure, so reads (get, ranked, network_sa) never block on the
writer beyond picking up the latest published state.

State is replaced functionally: each mutation builds a new WorldState
with ``dataclasses.replace``, so a reader holding the previous snapshot
keeps a consistent view.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import replace
from typing import Callable, List, Optional, Sequence, Tuple

from .ingest import serialize_world, threat_to_dict
from .model import SAVector, ThreatRecord, WorldState
from .savector import (
    DEFAULT_WEIGHTS,
    NotActive,
    ScoredThreat,
    ThreatStatus,
    accumulate,
    rank_threats,
    reduce,
    score_threat,
)
from .store import EventKind, Ledger

logger = logging.getLogger(__name__)


class DuplicateThreat(ValueError):
    """A tid was ingested twice; every report gets exactly one scoring."""


class SaEngine:
    """Scores threats against a world and maintains the network SA."""

    def __init__(
        self,
        world: WorldState,
        ledger: Optional[Ledger] = None,
        clock: Callable[[], float] = time.time,
        weights: Sequence[float] = DEFAULT_WEIGHTS,
    ):
        self._lock = threading.Lock()
        self._world = world
        self._ledger = ledger
        self._clock = clock
        self._weights = tuple(weights)
        self._scored: dict[str, ScoredThreat] = {}
        if ledger is not None and ledger.seq == 0:
            loaded_at = clock()
            ledger.append(
                EventKind.WORLD_LOADED,
                {"bundle": serialize_world(world)},
                timestamp=loaded_at,
            )
            # Mirror the ledger trail so a resumed engine sees the same
            # history a live one produced.
            self._world = replace(
                world,
                history=world.history + ((loaded_at, "world_loaded", world.network_sa),),
            )

    @classmethod
    def resume(
        cls,
        ledger: Ledger,
        clock: Callable[[], float] = time.time,
        weights: Sequence[float] = DEFAULT_WEIGHTS,
    ) -> "SaEngine":
        """Rebuild a live engine from a replayed ledger.

        The world comes from the embedded world_loaded bundle; per-threat
        graphs are rescored (scoring is deterministic, so the vectors
        land exactly where the ledger recorded them).
        """
        state = ledger.state
        if state.world is None:
            raise ValueError("ledger has no world_loaded event to resume from")
        engine = cls(state.world, ledger=None, clock=clock, weights=weights)
        engine._ledger = ledger
        active = {}
        for tid, (threat, sa) in state.active.items():
            scored = score_threat(state.world, threat, weights)
            if not scored.sa.close_to(sa):
                logger.warning("rescored %s differs from ledger vector", tid)
            engine._scored[tid] = replace(scored, sa=sa, priority=sa.weighted_sum(weights))
            active[tid] = (threat, sa)
        for tid, (threat, sa) in state.resolved.items():
            scored = score_threat(state.world, threat, weights)
            engine._scored[tid] = replace(
                scored, sa=sa, priority=sa.weighted_sum(weights)
            ).resolved()
        engine._world = replace(
            state.world,
            active_threats=active,
            network_sa=state.network_sa,
            history=tuple(state.history),
        )
        return engine

    @property
    def world(self) -> WorldState:
        return self._world

    @property
    def network_sa(self) -> SAVector:
        return self._world.network_sa

    @property
    def history(self) -> Tuple[Tuple[float, str, SAVector], ...]:
        return self._world.history

    def ingest(self, threat: ThreatRecord) -> ScoredThreat:
        """Score one report, fold it into the network SA, persist, return.

        Raises DuplicateThreat on a tid seen before (active or resolved)
        and UnknownService when the report names a service outside the
        world.
        """
        with self._lock:
            if threat.tid in self._scored:
                raise DuplicateThreat(f"threat {threat.tid} already ingested")
            scored = score_threat(self._world, threat, self._weights)
            if self._ledger is not None:
                self._ledger.append(
                    EventKind.THREAT_SCORED,
                    {
                        "threat": threat_to_dict(threat),
                        "sa": list(scored.sa.as_tuple()),
                    },
                    timestamp=threat.received_at,
                )
            new_sa = accumulate(self._world.network_sa, scored.sa)
            active = dict(self._world.active_threats)
            active[threat.tid] = (threat, scored.sa)
            self._world = replace(
                self._world,
                active_threats=active,
                network_sa=new_sa,
                history=self._world.history
                + ((threat.received_at, f"threat_scored {threat.tid}", new_sa),),
            )
            self._scored[threat.tid] = scored
            return scored

    def feedback(self, tid: str) -> SAVector:
        """Resolve one active threat and subtract its vector.

        Returns the network SA after removal. Raises NotActive when the
        tid is unknown or already resolved.
        """
        with self._lock:
            scored = self._scored.get(tid)
            if scored is None or scored.status is not ThreatStatus.ACTIVE:
                raise NotActive(tid)
            now = self._clock()
            if self._ledger is not None:
                self._ledger.append(EventKind.FEEDBACK_REDUCED, {"tid": tid}, timestamp=now)
            new_sa = reduce(self._world.network_sa, scored.sa)
            active = dict(self._world.active_threats)
            del active[tid]
            self._world = replace(
                self._world,
                active_threats=active,
                network_sa=new_sa,
                history=self._world.history
                + ((now, f"feedback_reduced {tid}", new_sa),),
            )
            self._scored[tid] = scored.resolved()
            return new_sa

    def get(self, tid: str) -> Optional[ScoredThreat]:
        return self._scored.get(tid)

    def ranked(
        self,
        status: ThreatStatus = ThreatStatus.ACTIVE,
        weights: Optional[Sequence[float]] = None,
    ) -> List[ScoredThreat]:
        """Triage queue for one status, highest weighted SA first."""
        chosen = [st for st in self._scored.values() if st.status is status]
        return rank_threats(chosen, self._weights if weights is None else weights)
