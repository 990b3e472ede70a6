"""Command line front: load, replay, report, serve.

`load` checks a world bundle and prints what it found. `replay` runs a
feed through a fresh world in order and writes the report CSV plus the
six charts; with a ledger path the run is persisted and can be resumed
or re-reported later. `report` regenerates report files from a ledger
alone. `serve` starts the HTTP API.

The bundle directory defaults to $QRSACP_DATA_DIR, then to the packaged
sample data; the serve port honors $QRSACP_PORT.
"""

from __future__ import annotations

import logging
import sys
from importlib import resources
from pathlib import Path

import click

from .engine import SaEngine
from .ingest import IntegrityError, ParseError, WorldBundle, load_world, parse_threat_feed
from .model import ThreatType
from .report import build_series, render_charts, write_report_csv
from .savector import score_threat
from .store import CorruptLedger, Ledger, replay as replay_ledger

logger = logging.getLogger(__name__)


def _default_bundle_dir() -> Path:
    return Path(str(resources.files("qrsacp") / "data"))


def _load_or_die(bundle_dir: Path):
    try:
        return load_world(WorldBundle.from_dir(bundle_dir))
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except ParseError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except IntegrityError as exc:
        click.echo("error: world bundle failed validation:", err=True)
        for violation in exc.violations:
            click.echo(f"  - {violation}", err=True)
        sys.exit(1)


def _fmt_sa(sa) -> str:
    return (
        f"definite={sa.definite:.6f} procedural={sa.procedural:.6f} "
        f"network={sa.network:.6f} infrastructural={sa.infrastructural:.6f}"
    )


@click.group()
@click.option("--verbose", is_flag=True, help="Log at INFO level.")
def main(verbose: bool):
    """Situational-awareness scoring over a service dependency graph."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option(
    "--bundle",
    "bundle_dir",
    envvar="QRSACP_DATA_DIR",
    type=click.Path(path_type=Path),
    default=None,
    help="World bundle directory (defaults to the packaged sample).",
)
def load(bundle_dir: Path | None):
    """Validate a world bundle and print a summary."""
    world = _load_or_die(bundle_dir or _default_bundle_dir())
    click.echo(f"services: {len(world.services)}")
    click.echo(f"edges: {len(world.edges)}")
    click.echo(f"organizations: {len(world.orgs)}")
    links = sum(len(o.procedural_links) for o in world.orgs.values())
    click.echo(f"procedural links: {links}")
    click.echo(f"classifications: {len(world.net_prob_table.entries)}")
    click.echo("ok")


@main.command()
@click.option(
    "--bundle",
    "bundle_dir",
    envvar="QRSACP_DATA_DIR",
    type=click.Path(path_type=Path),
    default=None,
    help="World bundle directory (defaults to the packaged sample).",
)
@click.option(
    "--feed",
    "feed_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Threat feed (newline-delimited JSON; defaults to the packaged sample).",
)
@click.option(
    "--report-dir",
    type=click.Path(path_type=Path),
    default=Path("report"),
    show_default=True,
    help="Where the CSV and charts go.",
)
@click.option(
    "--ledger",
    "ledger_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Persist events to this ledger file.",
)
@click.option("--strict", is_flag=True, help="Exit nonzero if any feed line is rejected.")
@click.option(
    "--scale-incident-tenth",
    is_flag=True,
    help="Divide incident series by ten in the charts (CSV is never rescaled).",
)
def replay(
    bundle_dir: Path | None,
    feed_path: Path | None,
    report_dir: Path,
    ledger_path: Path | None,
    strict: bool,
    scale_incident_tenth: bool,
):
    """Score a feed in order against a fresh world and write reports."""
    bundle_dir = bundle_dir or _default_bundle_dir()
    feed_path = feed_path or bundle_dir / "feed.jsonl"
    world = _load_or_die(bundle_dir)
    try:
        records, rejects = parse_threat_feed(feed_path.read_text())
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)

    ledger = Ledger(ledger_path) if ledger_path is not None else None
    # Fixed clock: replay output must not depend on when it ran. Threat
    # events take their timestamps from the records themselves.
    engine = SaEngine(world, ledger=ledger, clock=lambda: 0.0)
    scored = [engine.ingest(threat) for threat in records]

    report_dir.mkdir(parents=True, exist_ok=True)
    series = build_series(world, scored)
    csv_path = report_dir / "report.csv"
    write_report_csv(series, csv_path)
    charts = render_charts(series, report_dir, scale_incident_tenth=scale_incident_tenth)

    counts = {t: 0 for t in ThreatType}
    for st in scored:
        counts[st.threat.ttype] += 1
    click.echo(
        f"scored {len(scored)} threats "
        f"({counts[ThreatType.VULNERABILITY]} vulnerabilities, "
        f"{counts[ThreatType.ATTACK]} attacks, {counts[ThreatType.INCIDENT]} incidents)"
    )
    click.echo(f"network SA: {_fmt_sa(engine.network_sa)}")
    click.echo(f"report: {csv_path}")
    click.echo(f"charts: {len(charts)} files in {report_dir}")
    if rejects:
        click.echo(f"rejected {len(rejects)} feed lines:", err=True)
        for reject in rejects:
            click.echo(f"  line {reject.line}: {reject.reason}", err=True)
        if strict:
            sys.exit(1)


@main.command()
@click.option(
    "--ledger",
    "ledger_path",
    type=click.Path(path_type=Path),
    required=True,
    help="Ledger file to rebuild the report from.",
)
@click.option(
    "--report-dir",
    type=click.Path(path_type=Path),
    default=Path("report"),
    show_default=True,
    help="Where the CSV and charts go.",
)
@click.option(
    "--scale-incident-tenth",
    is_flag=True,
    help="Divide incident series by ten in the charts (CSV is never rescaled).",
)
def report(ledger_path: Path, report_dir: Path, scale_incident_tenth: bool):
    """Regenerate report files from a ledger, no bundle needed."""
    try:
        state = replay_ledger(ledger_path)
    except CorruptLedger as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    if state.world is None:
        click.echo("error: ledger carries no world, cannot rebuild scores", err=True)
        sys.exit(1)

    scored = []
    for tid in state.scored_order:
        threat, _ = state.record(tid)
        scored.append(score_threat(state.world, threat))

    report_dir.mkdir(parents=True, exist_ok=True)
    series = build_series(state.world, scored)
    csv_path = report_dir / "report.csv"
    write_report_csv(series, csv_path)
    charts = render_charts(series, report_dir, scale_incident_tenth=scale_incident_tenth)
    click.echo(f"replayed {state.seq} events, {len(scored)} threats")
    click.echo(f"report: {csv_path}")
    click.echo(f"charts: {len(charts)} files in {report_dir}")


@main.command()
@click.option(
    "--bundle",
    "bundle_dir",
    envvar="QRSACP_DATA_DIR",
    type=click.Path(path_type=Path),
    default=None,
    help="World bundle directory (defaults to the packaged sample).",
)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", envvar="QRSACP_PORT", default=8787, show_default=True, type=int)
@click.option(
    "--ledger",
    "ledger_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Persist events to this ledger file; resumes it when it already has events.",
)
@click.option(
    "--console-dir",
    type=click.Path(path_type=Path),
    default=None,
    help="Static console build to mount at /console (defaults to ./frontend/dist if present).",
)
def serve(
    bundle_dir: Path | None,
    host: str,
    port: int,
    ledger_path: Path | None,
    console_dir: Path | None,
):
    """Run the HTTP API."""
    import uvicorn

    from .server import create_app

    if ledger_path is not None and ledger_path.exists() and ledger_path.stat().st_size > 0:
        try:
            ledger = Ledger(ledger_path)
            engine = SaEngine.resume(ledger)
        except CorruptLedger as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        click.echo(f"resumed ledger at seq {ledger.seq}")
    else:
        world = _load_or_die(bundle_dir or _default_bundle_dir())
        ledger = Ledger(ledger_path) if ledger_path is not None else None
        engine = SaEngine(world, ledger=ledger)

    if console_dir is None:
        candidate = Path("frontend") / "dist"
        console_dir = candidate if candidate.is_dir() else None
    app = create_app(engine, console_dir=console_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
