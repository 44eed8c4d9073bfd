"""Synthetic operator hand traces and the command-log file format.

Traces model a desk-scale operator hand path sampled at the command
frequency: a smooth waypoint path plus Gaussian tracking jitter, emitted as
per-period increments of the operator's virtual-copy pose.  (These are hand
motions, not wire commands: the replay driver and the live console integrate
them into a copy pose and send the remaining error to the gateway each
period.)  The jittery-pick-place kind deliberately contains fast "snap"
repositions whose deltas exceed the arm's feasible per-period motion, so
replaying it with the filter bypassed trips the fault system while the
filtered pipeline does not.

Command logs are JSON Lines: an optional header line describing the
generator, then one delta_pose message per line.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import quat_multiply, quat_conjugate, quat_to_rotvec, rotvec_to_quat
from .protocol import CommandMessage, ProtocolError, parse_command

COMMAND_LOG_FORMAT = "telefilter.command_log"
COMMAND_LOG_VERSION = 1

KINDS = ("line", "arc", "jittery-pick-place", "noise-hold")

# tracking-glitch model for the jittery kind: occasional one-period spikes,
# sized around the noise gate so most are absorbed by the deadband
SPIKE_PROBABILITY = 0.02
SPIKE_SCALE = 3.5


@dataclass(frozen=True)
class SyntheticTraceSpec:
    kind: str
    duration_s: float = 60.0
    amplitude_m: float = 0.25
    jitter_std_m: float = 0.0006
    rot_jitter_std_rad: float = 0.0015
    seed: int = 0
    command_hz: float = 20.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not (self.duration_s > 0):
            raise ValueError("duration_s must be strictly positive")
        if self.amplitude_m < 0 or self.jitter_std_m < 0 or self.rot_jitter_std_rad < 0:
            raise ValueError("amplitudes and jitter levels must be non-negative")
        if not (self.command_hz > 0):
            raise ValueError("command_hz must be strictly positive")
        if not isinstance(self.seed, int):
            raise ValueError("seed must be an integer")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "duration_s": self.duration_s,
            "amplitude_m": self.amplitude_m,
            "jitter_std_m": self.jitter_std_m,
            "rot_jitter_std_rad": self.rot_jitter_std_rad,
            "seed": self.seed,
            "command_hz": self.command_hz,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticTraceSpec":
        return cls(**d)


def _piecewise_knots(spec: SyntheticTraceSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Waypoint schedule for jittery-pick-place: times, positions, wrist yaw."""
    a = spec.amplitude_m
    period = 1.0 / spec.command_hz
    snap = 2.0 * period  # fast reposition: large per-period deltas
    waypoints = {
        "start": (np.zeros(3), 0.0),
        "above_pick": (np.array([0.4 * a, -0.5 * a, 0.15 * a]), -0.3),
        "pick": (np.array([0.4 * a, -0.5 * a, -0.15 * a]), -0.3),
        "above_place": (np.array([0.4 * a, 0.5 * a, 0.15 * a]), 0.3),
        "place": (np.array([0.4 * a, 0.5 * a, -0.15 * a]), 0.3),
    }
    cycle = [
        ("above_pick", 1.5),
        ("pick", 1.2),
        ("pick", 0.5),  # dwell while "grasping"
        ("above_pick", 1.0),
        ("above_place", snap),
        ("place", 1.2),
        ("place", 0.5),
        ("above_place", 1.0),
        ("start", snap),
        ("start", 0.8),
    ]
    times = [0.0]
    positions = [waypoints["start"][0]]
    yaws = [waypoints["start"][1]]
    t = 0.0
    while t < spec.duration_s + 1.0:
        for name, seg_duration in cycle:
            t += seg_duration
            pos, yaw = waypoints[name]
            times.append(t)
            positions.append(pos)
            yaws.append(yaw)
    return np.array(times), np.array(positions), np.array(yaws)


def _path(spec: SyntheticTraceSpec, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Noise-free target path: positions (n,3) and rotation vectors (n,3)."""
    n = times.shape[0]
    positions = np.zeros((n, 3))
    rotvecs = np.zeros((n, 3))
    if spec.kind == "line":
        positions[:, 0] = spec.amplitude_m * times / spec.duration_s
    elif spec.kind == "arc":
        radius = spec.amplitude_m / 2.0
        theta = 2.0 * np.pi * times / spec.duration_s
        positions[:, 0] = radius * np.sin(theta)
        positions[:, 1] = radius * (1.0 - np.cos(theta))
        rotvecs[:, 2] = 0.2 * np.sin(theta)
    elif spec.kind == "jittery-pick-place":
        knot_t, knot_p, knot_yaw = _piecewise_knots(spec)
        for axis in range(3):
            positions[:, axis] = np.interp(times, knot_t, knot_p[:, axis])
        rotvecs[:, 2] = np.interp(times, knot_t, knot_yaw)
    elif spec.kind == "noise-hold":
        pass  # stationary target; jitter supplies all motion
    return positions, rotvecs


def generate_trace(spec: SyntheticTraceSpec) -> list[CommandMessage]:
    """Deterministic command stream for a trace description (same seed, same bytes)."""
    rng = np.random.default_rng(spec.seed)
    period_ms = 1000.0 / spec.command_hz
    n = int(round(spec.duration_s * spec.command_hz))
    times = np.arange(n) / spec.command_hz
    positions, rotvecs = _path(spec, times)

    if spec.jitter_std_m > 0:
        noise = rng.normal(0.0, spec.jitter_std_m, (n, 3))
        if spec.kind == "jittery-pick-place":
            spikes = rng.random(n) < SPIKE_PROBABILITY
            noise[spikes] += rng.normal(0.0, SPIKE_SCALE * spec.jitter_std_m, (int(spikes.sum()), 3))
        positions = positions + noise
    if spec.rot_jitter_std_rad > 0:
        rotvecs = rotvecs + rng.normal(0.0, spec.rot_jitter_std_rad, (n, 3))

    commands = []
    prev_pos = np.zeros(3)
    prev_quat = np.array([1.0, 0.0, 0.0, 0.0])
    for k in range(n):
        quat = rotvec_to_quat(rotvecs[k])
        translation = positions[k] - prev_pos
        rotation = quat_to_rotvec(quat_multiply(quat_conjugate(prev_quat), quat))
        commands.append(
            CommandMessage(
                seq=k,
                translation=translation,
                rotation=rotation,
                client_time_ms=int(round(k * period_ms)),
            )
        )
        prev_pos = positions[k]
        prev_quat = quat
    return commands


# -- command-log files ----------------------------------------------------


class CommandLogError(ValueError):
    pass


def dumps_command_log(commands: list[CommandMessage], spec: SyntheticTraceSpec | None = None) -> str:
    header: dict = {"type": COMMAND_LOG_FORMAT, "version": COMMAND_LOG_VERSION}
    if spec is not None:
        header["spec"] = spec.to_dict()
    lines = [json.dumps(header, separators=(",", ":"))]
    lines.extend(json.dumps(c.to_json_obj(), separators=(",", ":")) for c in commands)
    return "\n".join(lines) + "\n"


def write_command_log(path, commands: list[CommandMessage], spec: SyntheticTraceSpec | None = None) -> None:
    Path(path).write_text(dumps_command_log(commands, spec), encoding="utf-8")


def loads_command_log(text: str) -> tuple[list[CommandMessage], dict | None]:
    """Parse a command log; returns (commands, header or None).

    Raises CommandLogError naming the 1-based line number of the first
    malformed line.
    """
    commands: list[CommandMessage] = []
    header = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CommandLogError(f"line {lineno}: invalid JSON: {exc.msg}") from exc
        if lineno == 1 and isinstance(obj, dict) and obj.get("type") == COMMAND_LOG_FORMAT:
            header = obj
            continue
        try:
            commands.append(parse_command(obj))
        except ProtocolError as exc:
            raise CommandLogError(f"line {lineno}: {exc}") from exc
    return commands, header


def load_command_log(path) -> tuple[list[CommandMessage], dict | None]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CommandLogError(f"cannot read {path}: {exc}") from exc
    return loads_command_log(text)
