"""Batch-replay reporting: the per-threat CSV and the six SVG charts.

The CSV carries one row per scored threat in feed order with the four
component values and the running network totals; the running columns are
exact prefix sums of the value columns, in the same float arithmetic the
engine used, so re-summing a report reproduces the totals bit-for-bit.

Charts are plain hand-built SVG with fixed fonts and two-decimal
coordinates: rendering the same series twice yields byte-identical
files. Per threat type there are two charts, component values per threat
and running totals, six files in all:

    vulnerability_components.svg   attack_components.svg   incident_components.svg
    vulnerability_running.svg      attack_running.svg      incident_running.svg
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from .model import SAVector, ThreatType, WorldState
from .savector import ScoredThreat, accumulate

logger = logging.getLogger(__name__)

COMPONENT_NAMES = ("definite", "procedural", "network", "infrastructural")
COMPONENT_COLORS = ("#c0392b", "#2980b9", "#27ae60", "#8e44ad")

CSV_HEADER = (
    "tid,type,sid,oid,definite,procedural,network,infrastructural,"
    "cum_definite,cum_procedural,cum_network,cum_infrastructural"
)


@dataclass(frozen=True)
class ReportRow:
    tid: str
    ttype: ThreatType
    sid: str
    oid: str
    sa: SAVector
    cumulative: SAVector


@dataclass(frozen=True)
class ReportSeries:
    """Per-threat vectors in feed order plus running network totals."""

    rows: Tuple[ReportRow, ...]

    def by_type(self) -> Dict[ThreatType, List[ReportRow]]:
        groups: Dict[ThreatType, List[ReportRow]] = {t: [] for t in ThreatType}
        for row in self.rows:
            groups[row.ttype].append(row)
        return groups


def build_series(world: WorldState, scored: Sequence[ScoredThreat]) -> ReportSeries:
    """Assemble the report rows in the order the threats were scored."""
    rows: List[ReportRow] = []
    running = SAVector.zero()
    for st in scored:
        running = accumulate(running, st.sa)
        rows.append(
            ReportRow(
                tid=st.threat.tid,
                ttype=st.threat.ttype,
                sid=st.threat.sid,
                oid=world.owner(st.threat.sid).oid,
                sa=st.sa,
                cumulative=running,
            )
        )
    return ReportSeries(tuple(rows))


def write_report_csv(series: ReportSeries, path: Path) -> None:
    """Write the report CSV; floats as their shortest exact repr."""
    lines = [CSV_HEADER]
    for row in series.rows:
        cells = [row.tid, row.ttype.value, row.sid, row.oid]
        cells += [repr(v) for v in row.sa.as_tuple()]
        cells += [repr(v) for v in row.cumulative.as_tuple()]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


# --- SVG rendering ---------------------------------------------------------

_WIDTH = 720
_HEIGHT = 420
_MARGIN_LEFT = 64
_MARGIN_RIGHT = 160
_MARGIN_TOP = 48
_MARGIN_BOTTOM = 48


def _svg_chart(
    title: str,
    labels: Sequence[str],
    series: Sequence[Tuple[str, str, Sequence[float]]],
    path: Path,
) -> None:
    """One line chart: labels along x, (name, color, values) per series."""
    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM
    n = len(labels)
    y_max = max((v for _, _, values in series for v in values), default=0.0)
    if y_max <= 0.0:
        y_max = 1.0
    y_max *= 1.05

    def x_of(i: int) -> float:
        if n <= 1:
            return _MARGIN_LEFT + plot_w / 2
        return _MARGIN_LEFT + plot_w * i / (n - 1)

    def y_of(v: float) -> float:
        return _MARGIN_TOP + plot_h * (1.0 - v / y_max)

    parts: List[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="monospace" font-size="11">'
    )
    parts.append(f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>')
    parts.append(
        f'<text x="{_MARGIN_LEFT}" y="24" font-size="14" fill="#111111">{title}</text>'
    )
    # Axes.
    x0, y0 = _MARGIN_LEFT, _MARGIN_TOP + plot_h
    parts.append(
        f'<line x1="{x0}" y1="{_MARGIN_TOP}" x2="{x0}" y2="{y0}" stroke="#333333"/>'
    )
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}" stroke="#333333"/>'
    )
    # Horizontal gridlines with tick labels, five of them.
    for k in range(5):
        v = y_max * k / 4
        y = y_of(v)
        parts.append(
            f'<line x1="{x0}" y1="{y:.2f}" x2="{x0 + plot_w}" y2="{y:.2f}" '
            f'stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{x0 - 6}" y="{y + 4:.2f}" text-anchor="end" fill="#333333">{v:.2f}</text>'
        )
    # X tick labels.
    for i, label in enumerate(labels):
        x = x_of(i)
        parts.append(
            f'<text x="{x:.2f}" y="{y0 + 16}" text-anchor="middle" fill="#333333">{label}</text>'
        )
    # Series polylines and markers.
    for name, color, values in series:
        if values:
            points = " ".join(f"{x_of(i):.2f},{y_of(v):.2f}" for i, v in enumerate(values))
            parts.append(
                f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
            for i, v in enumerate(values):
                parts.append(
                    f'<circle cx="{x_of(i):.2f}" cy="{y_of(v):.2f}" r="2.5" fill="{color}"/>'
                )
    # Legend.
    lx = _WIDTH - _MARGIN_RIGHT + 16
    for j, (name, color, _) in enumerate(series):
        ly = _MARGIN_TOP + 16 * j
        parts.append(f'<rect x="{lx}" y="{ly}" width="10" height="10" fill="{color}"/>')
        parts.append(f'<text x="{lx + 16}" y="{ly + 9}" fill="#333333">{name}</text>')
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")


def render_charts(
    series: ReportSeries,
    directory: Path,
    scale_incident_tenth: bool = False,
) -> List[Path]:
    """Write the six per-type charts into directory; returns the paths.

    With scale_incident_tenth the incident series are divided by ten in
    the charts only; CSV values are never rescaled.
    """
    directory.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    for ttype, rows in series.by_type().items():
        scale = 0.1 if scale_incident_tenth and ttype is ThreatType.INCIDENT else 1.0
        suffix = " (values / 10)" if scale != 1.0 else ""
        labels = [row.tid for row in rows]

        per_component = [
            (
                name,
                color,
                [getattr(row.sa, name) * scale for row in rows],
            )
            for name, color in zip(COMPONENT_NAMES, COMPONENT_COLORS)
        ]
        components_path = directory / f"{ttype.value}_components.svg"
        _svg_chart(
            f"{ttype.value} threats: SA components{suffix}",
            labels,
            per_component,
            components_path,
        )
        written.append(components_path)

        running: List[List[float]] = [[] for _ in COMPONENT_NAMES]
        totals = [0.0, 0.0, 0.0, 0.0]
        for row in rows:
            for k, name in enumerate(COMPONENT_NAMES):
                totals[k] += getattr(row.sa, name) * scale
                running[k].append(totals[k])
        running_path = directory / f"{ttype.value}_running.svg"
        _svg_chart(
            f"{ttype.value} threats: running network SA{suffix}",
            labels,
            [
                (name, color, values)
                for (name, color), values in zip(
                    zip(COMPONENT_NAMES, COMPONENT_COLORS), running
                )
            ],
            running_path,
        )
        written.append(running_path)
    logger.info("wrote %d charts to %s", len(written), directory)
    return written
