"""Trajectory evaluation: task time, commanded-vs-executed RMS, jerk norms.

Jerk is estimated by third-order forward differences of position.  Two
conventions are reported: the per-sample variant (mean |p[k+3] - 3 p[k+2]
+ 3 p[k+1] - p[k]|, no dt division, matching the scale of published result
tables) and the SI variant (divided by dt^3, m/s^3).  RMS uses positions
only; orientation error is a separate mean-geodesic-angle column.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

from .trajlog import TrajectoryLog

# commanded motion below this (m) between consecutive samples counts as idle
MOTION_THRESHOLD = 1e-4


def rms_error(log: TrajectoryLog) -> float:
    """RMS distance between commanded and executed positions, millimeters."""
    if len(log) < 1:
        raise ValueError("rms_error requires at least one sample")
    d = log.cmd_pos - log.exe_pos
    return float(np.sqrt(np.mean(np.sum(d * d, axis=1)))) * 1000.0


def avg_jerk_norm(positions, dt: float) -> float:
    """Mean third-difference norm of a position sequence, divided by dt^3.

    Pass dt=1.0 for the per-sample (dimensionless) convention.  The third
    difference annihilates quadratic-in-time motion, so constant-velocity
    and constant-acceleration stretches contribute zero.
    """
    p = np.asarray(positions, dtype=float)
    if p.ndim != 2 or p.shape[1] != 3:
        raise ValueError("positions must have shape (n, 3)")
    if p.shape[0] < 4:
        raise ValueError("avg_jerk_norm requires at least 4 samples")
    if not (dt > 0):
        raise ValueError("dt must be strictly positive")
    d3 = p[3:] - 3.0 * p[2:-1] + 3.0 * p[1:-2] - p[:-3]
    return float(np.mean(np.linalg.norm(d3, axis=1))) / dt**3


def _active_range(log: TrajectoryLog) -> tuple[int, int] | None:
    """First/last sample index with commanded motion above the idle threshold."""
    if len(log) < 2:
        return None
    steps = np.linalg.norm(np.diff(log.cmd_pos, axis=0), axis=1)
    active = np.flatnonzero(steps > MOTION_THRESHOLD) + 1
    if active.size == 0:
        return None
    return int(active[0]), int(active[-1])

def completion_time(log: TrajectoryLog) -> float:
    """Active task duration: last minus first commanded-motion timestamp,
    leading and trailing idle trimmed.  All-idle logs yield 0 with a warning."""
    if len(log) < 1:
        raise ValueError("completion_time requires a non-empty log")
    span = _active_range(log)
    if span is None:
        warnings.warn("log contains no commanded motion; completion time is 0", stacklevel=2)
        return 0.0
    first, last = span
    return float(log.t[last] - log.t[first])


def orientation_rms(log: TrajectoryLog) -> float:
    """Mean geodesic angle (rad) between commanded and executed orientations."""
    dots = np.abs(np.sum(log.cmd_quat * log.exe_quat, axis=1))
    return float(np.mean(2.0 * np.arccos(np.clip(dots, -1.0, 1.0))))


@dataclass(frozen=True)
class MetricsReport:
    """One result row: the four headline columns plus labeled extras."""

    task: str
    time_s: float
    rms_mm: float
    commanded_jerk: float  # per-sample convention (no dt division)
    executed_jerk: float
    sample_count: int = 0
    fault_count: int = 0
    commanded_jerk_si: float | None = None  # m/s^3
    executed_jerk_si: float | None = None
    orientation_rms_rad: float | None = None

    def __post_init__(self):
        if not self.task:
            raise ValueError("task name must be non-empty")
        for name in ("time_s", "rms_mm", "commanded_jerk", "executed_jerk"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
        if self.rms_mm < 0 or self.commanded_jerk < 0 or self.executed_jerk < 0:
            raise ValueError("rms and jerk values must be non-negative")


def log_metrics(log: TrajectoryLog, task: str) -> MetricsReport:
    """Compute the full report row for one trajectory log."""
    log.validate_uniform()
    dt = log.dt
    return MetricsReport(
        task=task,
        time_s=completion_time(log),
        rms_mm=rms_error(log),
        commanded_jerk=avg_jerk_norm(log.cmd_pos, 1.0),
        executed_jerk=avg_jerk_norm(log.exe_pos, 1.0),
        sample_count=len(log),
        fault_count=log.fault_count(),
        commanded_jerk_si=avg_jerk_norm(log.cmd_pos, dt),
        executed_jerk_si=avg_jerk_norm(log.exe_pos, dt),
        orientation_rms_rad=orientation_rms(log),
    )


def _fmt(value: float, decimals: int) -> str:
    text = f"{value:.{decimals}f}"
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text or "0"


_HEADLINE = ("Task", "Time (s)", "RMS (mm)", "Comm. Jerk", "Exe. Jerk")
_EXTRAS = ("Comm. Jerk (m/s^3)", "Exe. Jerk (m/s^3)", "Orient. RMS (rad)")


def _report_cells(report: MetricsReport, extras: bool) -> list[str]:
    cells = [
        report.task,
        _fmt(report.time_s, 3),
        _fmt(report.rms_mm, 3),
        _fmt(report.commanded_jerk, 6),
        _fmt(report.executed_jerk, 6),
    ]
    if extras:
        for value in (report.commanded_jerk_si, report.executed_jerk_si, report.orientation_rms_rad):
            cells.append("" if value is None else _fmt(value, 6))
    return cells


def render_report(reports: list[MetricsReport]) -> str:
    """Fixed-width text table, one row per log."""
    if not reports:
        raise ValueError("render_report requires at least one report")
    extras = any(
        r.commanded_jerk_si is not None
        or r.executed_jerk_si is not None
        or r.orientation_rms_rad is not None
        for r in reports
    )
    headers = list(_HEADLINE) + (list(_EXTRAS) if extras else [])
    rows = [_report_cells(r, extras) for r in reports]
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(headers)]
    lines = []
    lines.append(" | ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip())
    lines.append("-+-".join("-" * w for w in widths))
    for row in rows:
        cells = [row[0].ljust(widths[0])]
        cells.extend(c.rjust(widths[i + 1]) for i, c in enumerate(row[1:]))
        lines.append(" | ".join(cells).rstrip())
    lines.append("")
    lines.append(
        "Jerk columns: mean |third difference of position| per sample (no dt division)."
    )
    if extras:
        lines.append("(m/s^3) columns: same statistic divided by dt^3; Orient. RMS: mean geodesic angle.")
    return "\n".join(lines) + "\n"


_CSV_FIELDS = (
    "task",
    "time_s",
    "rms_mm",
    "commanded_jerk",
    "executed_jerk",
    "sample_count",
    "fault_count",
    "commanded_jerk_si",
    "executed_jerk_si",
    "orientation_rms_rad",
)


def reports_to_csv(reports: list[MetricsReport]) -> str:
    """Full-precision CSV (RFC 4180); re-parsing reproduces the reports."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_FIELDS)
    for r in reports:
        writer.writerow(
            [
                r.task,
                repr(r.time_s),
                repr(r.rms_mm),
                repr(r.commanded_jerk),
                repr(r.executed_jerk),
                r.sample_count,
                r.fault_count,
                "" if r.commanded_jerk_si is None else repr(r.commanded_jerk_si),
                "" if r.executed_jerk_si is None else repr(r.executed_jerk_si),
                "" if r.orientation_rms_rad is None else repr(r.orientation_rms_rad),
            ]
        )
    return buf.getvalue()


def parse_reports_csv(text: str) -> list[MetricsReport]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != _CSV_FIELDS:
        raise ValueError("unrecognized metrics CSV header")
    reports = []
    for row in reader:
        if not row:
            continue
        reports.append(
            MetricsReport(
                task=row[0],
                time_s=float(row[1]),
                rms_mm=float(row[2]),
                commanded_jerk=float(row[3]),
                executed_jerk=float(row[4]),
                sample_count=int(row[5]),
                fault_count=int(row[6]),
                commanded_jerk_si=float(row[7]) if row[7] else None,
                executed_jerk_si=float(row[8]) if row[8] else None,
                orientation_rms_rad=float(row[9]) if row[9] else None,
            )
        )
    return reports


def export_plot_data(log: TrajectoryLog) -> str:
    """CSV of (t, commanded xyz, executed xyz) for external plotting.

    One row per sample plus a final marker row (kind="start") duplicating
    the sample where commanded motion begins.
    """
    if len(log) < 1:
        raise ValueError("export_plot_data requires a non-empty log")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("t", "cmd_x", "cmd_y", "cmd_z", "exe_x", "exe_y", "exe_z", "kind"))

    def row(i: int, kind: str) -> list:
        return [
            repr(float(log.t[i])),
            *(repr(float(v)) for v in log.cmd_pos[i]),
            *(repr(float(v)) for v in log.exe_pos[i]),
            kind,
        ]

    for i in range(len(log)):
        writer.writerow(row(i, "sample"))
    span = _active_range(log)
    start = span[0] if span is not None else 0
    writer.writerow(row(start, "start"))
    return buf.getvalue()
