"""Trajectory log: per-tick (commanded, executed) pose pairs plus fault flags.

File format is JSON Lines.  The first line is a header carrying the config
hash and the two pipeline frequencies; every following line is one control
tick:

    {"t": ..., "cmd_pos": [x,y,z], "cmd_quat": [w,x,y,z],
     "exe_pos": [x,y,z], "exe_quat": [w,x,y,z],
     "fault": null | "<reason>", "seq_active": null | <int>}

Timestamps are the logical tick clock (tick_index / control_hz), so logs are
uniform by construction and byte-reproducible for identical runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FORMAT_NAME = "telefilter.trajectory_log"
FORMAT_VERSION = 1


class TrajectoryLogError(ValueError):
    pass


@dataclass
class LogHeader:
    config_hash: str
    control_hz: float
    command_hz: float

    def to_json_obj(self) -> dict:
        return {
            "type": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "config_hash": self.config_hash,
            "control_hz": self.control_hz,
            "command_hz": self.command_hz,
        }


@dataclass(eq=False)
class TrajectoryLog:
    """Column-oriented view of a finished log."""

    header: LogHeader
    t: np.ndarray  # (N,)
    cmd_pos: np.ndarray  # (N, 3)
    cmd_quat: np.ndarray  # (N, 4)
    exe_pos: np.ndarray  # (N, 3)
    exe_quat: np.ndarray  # (N, 4)
    fault: list = field(default_factory=list)  # str reason or None, per tick
    seq_active: list = field(default_factory=list)  # int or None, per tick

    def __len__(self) -> int:
        return int(self.t.shape[0])

    @property
    def dt(self) -> float:
        return 1.0 / self.header.control_hz

    def validate_uniform(self, tol: float = 1e-9) -> float:
        """Check timestamps are strictly increasing and uniform; returns dt."""
        if len(self) < 2:
            return self.dt
        gaps = np.diff(self.t)
        if not np.all(gaps > 0):
            raise TrajectoryLogError("timestamps must be strictly increasing")
        if float(np.max(np.abs(gaps - self.dt))) > tol:
            raise TrajectoryLogError(
                f"timestamps deviate from uniform 1/control_hz grid by more than {tol}"
            )
        return self.dt

    def fault_count(self) -> int:
        """Number of fault trip events (ok -> tripped transitions)."""
        count = 0
        previous = None
        for reason in self.fault:
            if reason is not None and previous is None:
                count += 1
            previous = reason
        return count

    @classmethod
    def from_records(cls, header: LogHeader, records: list[dict]) -> "TrajectoryLog":
        n = len(records)
        t = np.empty(n)
        cmd_pos = np.empty((n, 3))
        cmd_quat = np.empty((n, 4))
        exe_pos = np.empty((n, 3))
        exe_quat = np.empty((n, 4))
        fault: list = []
        seq_active: list = []
        for i, rec in enumerate(records):
            t[i] = rec["t"]
            cmd_pos[i] = rec["cmd_pos"]
            cmd_quat[i] = rec["cmd_quat"]
            exe_pos[i] = rec["exe_pos"]
            exe_quat[i] = rec["exe_quat"]
            fault.append(rec["fault"])
            seq_active.append(rec["seq_active"])
        return cls(header, t, cmd_pos, cmd_quat, exe_pos, exe_quat, fault, seq_active)

    def records(self):
        for i in range(len(self)):
            yield {
                "t": float(self.t[i]),
                "cmd_pos": self.cmd_pos[i].tolist(),
                "cmd_quat": self.cmd_quat[i].tolist(),
                "exe_pos": self.exe_pos[i].tolist(),
                "exe_quat": self.exe_quat[i].tolist(),
                "fault": self.fault[i],
                "seq_active": self.seq_active[i],
            }

    def dumps(self) -> str:
        lines = [json.dumps(self.header.to_json_obj(), separators=(",", ":"))]
        lines.extend(json.dumps(rec, separators=(",", ":")) for rec in self.records())
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, text: str) -> "TrajectoryLog":
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines:
            raise TrajectoryLogError("empty trajectory log")
        try:
            head = json.loads(lines[0])
        except json.JSONDecodeError as exc:
            raise TrajectoryLogError(f"header line is not valid JSON: {exc}") from exc
        if head.get("type") != FORMAT_NAME:
            raise TrajectoryLogError(f"not a trajectory log (header type {head.get('type')!r})")
        header = LogHeader(
            config_hash=head["config_hash"],
            control_hz=float(head["control_hz"]),
            command_hz=float(head["command_hz"]),
        )
        records = []
        for lineno, line in enumerate(lines[1:], start=2):
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise TrajectoryLogError(f"line {lineno}: invalid JSON: {exc}") from exc
        return cls.from_records(header, records)

    @classmethod
    def load(cls, path) -> "TrajectoryLog":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise TrajectoryLogError(f"cannot read {path}: {exc}") from exc
        return cls.loads(text)
