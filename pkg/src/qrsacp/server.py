"""HTTP API over a live engine.

JSON in, JSON out. Vectors travel as named-component objects, graphs as
the adjacency documents the scoring produced, and every error body is
``{"error": {"code": ..., "message": ...}}`` so clients can branch on
the code without parsing prose.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .engine import DuplicateThreat, SaEngine
from .ingest import parse_threat_record
from .model import SAVector, UnknownService
from .savector import NotActive, ScoredThreat, ThreatStatus

logger = logging.getLogger(__name__)


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": {"code": code, "message": message}},
    )


def _sa_obj(sa: SAVector) -> dict:
    return {
        "definite": sa.definite,
        "procedural": sa.procedural,
        "network": sa.network,
        "infrastructural": sa.infrastructural,
    }


def _graphs_obj(st: ScoredThreat) -> dict:
    return {
        "definite": st.graphs.definite.to_adjacency(),
        "procedural": st.graphs.procedural.to_adjacency(),
        "network": st.graphs.network.to_adjacency(),
        "infrastructural": st.graphs.infrastructural.to_adjacency(),
    }


def _row_obj(st: ScoredThreat) -> dict:
    return {
        "tid": st.threat.tid,
        "type": st.threat.ttype.value,
        "name": st.threat.name,
        "sid": st.threat.sid,
        "status": st.status.value,
        "priority": st.priority,
        "sa": _sa_obj(st.sa),
        "received_at": st.threat.received_at,
    }


def create_app(engine: SaEngine, console_dir: Optional[Path] = None) -> FastAPI:
    """Wire the endpoints around one engine instance."""
    app = FastAPI(title="qrsacp", docs_url=None, redoc_url=None)

    @app.post("/api/threats")
    async def post_threat(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "malformed_record", "request body is not valid JSON")
        try:
            threat = parse_threat_record(body)
        except ValueError as exc:
            return _error(400, "malformed_record", str(exc))
        try:
            scored = engine.ingest(threat)
        except DuplicateThreat as exc:
            return _error(409, "duplicate_threat", str(exc))
        except UnknownService as exc:
            return _error(404, "unknown_service", f"no such service: {exc.args[0]}")
        return {
            "tid": scored.threat.tid,
            "sa": _sa_obj(scored.sa),
            "priority": scored.priority,
            "graphs": _graphs_obj(scored),
        }

    @app.get("/api/threats")
    def list_threats(status: str = "active", sort: str = "priority"):
        try:
            wanted = ThreatStatus(status)
        except ValueError:
            return _error(400, "bad_status", f"status must be active or resolved, got {status!r}")
        if sort != "priority":
            return _error(400, "bad_sort", f"only sort=priority is supported, got {sort!r}")
        return {"threats": [_row_obj(st) for st in engine.ranked(status=wanted)]}

    @app.get("/api/threats/{tid}")
    def get_threat(tid: str):
        st = engine.get(tid)
        if st is None:
            return _error(404, "unknown_threat", f"no such threat: {tid}")
        body = _row_obj(st)
        body["graphs"] = _graphs_obj(st)
        return body

    @app.post("/api/threats/{tid}/feedback")
    def post_feedback(tid: str):
        st = engine.get(tid)
        if st is None:
            return _error(404, "unknown_threat", f"no such threat: {tid}")
        try:
            new_sa = engine.feedback(tid)
        except NotActive:
            return _error(409, "already_resolved", f"threat {tid} was already resolved")
        return {"tid": tid, "network_sa": _sa_obj(new_sa)}

    @app.get("/api/network-sa")
    def network_sa():
        return {
            "sa": _sa_obj(engine.network_sa),
            "history": [
                {"timestamp": ts, "event": event, "sa": _sa_obj(sa)}
                for ts, event, sa in engine.history
            ],
        }

    @app.get("/api/world")
    def world_summary():
        world = engine.world
        return {
            "services": [
                {
                    "sid": s.sid,
                    "oid": s.oid,
                    "crit": s.crit,
                    "p_e": s.p_e,
                }
                for _, s in sorted(world.services.items())
            ],
            "edges": [
                {
                    "src": e.src,
                    "dst": e.dst,
                    "weight": e.weight,
                    "port": e.port,
                    "proto": e.proto.value,
                }
                for e in sorted(world.edges, key=lambda e: (e.src, e.dst))
            ],
            "orgs": [
                {
                    "oid": o.oid,
                    "crit": o.crit,
                    "p_e": o.p_e,
                    "procedural_links": [
                        {"oid": target, "probability": prob}
                        for target, prob in o.procedural_links
                    ],
                    "cpe_count": len(o.cpe_inventory),
                }
                for _, o in sorted(world.orgs.items())
            ],
            "active_threats": len(world.active_threats),
        }

    if console_dir is not None and console_dir.is_dir():
        app.mount("/console", StaticFiles(directory=console_dir, html=True), name="console")
        logger.info("serving console from %s", console_dir)

    return app
