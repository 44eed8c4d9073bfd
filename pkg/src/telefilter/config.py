"""Gateway configuration: one JSON file describing the filter, the arm, the
controller thresholds and the server.

Validation happens eagerly at load time; any invalid field aborts with a
diagnostic naming the offending field path (JSON syntax errors carry the
line/column from the parser).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .controller import StiffnessParams, WrenchSchedule
from .filtering import FilterParams
from .kinematics import DHParams, JointLimits, as_joint_vector

DEFAULT_HOME = [0.0, 1.1, -1.8, 0.0, -1.0, 0.0]


class ConfigError(ValueError):
    """Invalid configuration; message names the field (or file location)."""


@dataclass(eq=False)
class GatewayConfig:
    filter: FilterParams = field(default_factory=FilterParams)
    dh: DHParams = field(default_factory=DHParams.default)
    limits: JointLimits = field(default_factory=JointLimits.default)
    stiffness: StiffnessParams = field(default_factory=StiffnessParams.default)
    home: np.ndarray = field(default_factory=lambda: as_joint_vector(DEFAULT_HOME))
    damping: float = 1e-3
    tracking_bound: float = 5e-3
    tracking_streak: int = 10
    host: str = "127.0.0.1"
    port: int = 8765
    telemetry_decimation: int = 1
    # how long the session survives an operator drop awaiting reconnection;
    # 0 ends it immediately
    reconnect_grace_s: float = 0.0
    log_path: str | None = None
    wrench_schedule: WrenchSchedule = field(default_factory=WrenchSchedule)

    def to_dict(self) -> dict:
        return {
            "filter": {
                "command_hz": self.filter.command_hz,
                "control_hz": self.filter.control_hz,
                "max_position_step_m": self.filter.max_position_step,
                "max_rotation_step_rad": self.filter.max_rotation_step,
                "position_deadband_m": self.filter.position_deadband,
                "rotation_deadband_rad": self.filter.rotation_deadband,
            },
            "arm": {
                "dh": self.dh.rows(),
                "joint_limits": {
                    "q_min": self.limits.q_min.tolist(),
                    "q_max": self.limits.q_max.tolist(),
                    "v_max": self.limits.v_max.tolist(),
                },
                "home": self.home.tolist(),
                "damping": self.damping,
            },
            "stiffness": {
                "enabled": self.stiffness.enabled,
                "diagonal": self.stiffness.diagonal.tolist(),
            },
            "tracking": {
                "divergence_bound_m": self.tracking_bound,
                "divergence_streak": self.tracking_streak,
            },
            "server": {
                "host": self.host,
                "port": self.port,
                "telemetry_decimation": self.telemetry_decimation,
                "reconnect_grace_s": self.reconnect_grace_s,
            },
            "log_path": self.log_path,
            "wrench_schedule": [
                {"start_s": p.start_s, "end_s": p.end_s, "wrench": p.wrench.tolist()}
                for p in self.wrench_schedule.phases
            ],
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, data: dict) -> "GatewayConfig":
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        known = {
            "filter",
            "arm",
            "stiffness",
            "tracking",
            "server",
            "log_path",
            "wrench_schedule",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")

        cfg = cls()
        fil = data.get("filter", {})
        with _field_context("filter"):
            cfg.filter = FilterParams(
                command_hz=_num(fil, "command_hz", 20.0),
                control_hz=_num(fil, "control_hz", 100.0),
                max_position_step=_num(fil, "max_position_step_m", 0.005),
                max_rotation_step=_num(fil, "max_rotation_step_rad", 0.02),
                position_deadband=_num(fil, "position_deadband_m", 0.0025),
                rotation_deadband=_num(fil, "rotation_deadband_rad", 0.01),
            )
        arm = data.get("arm", {})
        with _field_context("arm.dh"):
            cfg.dh = DHParams.from_rows(arm["dh"]) if "dh" in arm else DHParams.default()
        with _field_context("arm.joint_limits"):
            if "joint_limits" in arm:
                jl = arm["joint_limits"]
                cfg.limits = JointLimits(q_min=jl["q_min"], q_max=jl["q_max"], v_max=jl["v_max"])
            else:
                cfg.limits = JointLimits.default()
        with _field_context("arm.home"):
            cfg.home = as_joint_vector(arm.get("home", DEFAULT_HOME))
        with _field_context("arm.damping"):
            cfg.damping = _num(arm, "damping", 1e-3)
            if cfg.damping <= 0:
                raise ValueError("must be strictly positive")
        sti = data.get("stiffness", {})
        with _field_context("stiffness"):
            cfg.stiffness = StiffnessParams(
                diagonal=sti.get("diagonal", StiffnessParams.default().diagonal),
                enabled=bool(sti.get("enabled", True)),
            )
        tra = data.get("tracking", {})
        with _field_context("tracking"):
            cfg.tracking_bound = _num(tra, "divergence_bound_m", 5e-3)
            cfg.tracking_streak = int(tra.get("divergence_streak", 10))
            if cfg.tracking_bound <= 0 or cfg.tracking_streak < 1:
                raise ValueError("divergence bound/streak must be positive")
        srv = data.get("server", {})
        with _field_context("server"):
            cfg.host = str(srv.get("host", "127.0.0.1"))
            cfg.port = int(srv.get("port", 8765))
            if not (0 <= cfg.port <= 65535):
                raise ValueError("port out of range")
            cfg.telemetry_decimation = int(srv.get("telemetry_decimation", 1))
            if cfg.telemetry_decimation < 1:
                raise ValueError("telemetry_decimation must be >= 1")
            cfg.reconnect_grace_s = _num(srv, "reconnect_grace_s", 0.0)
            if cfg.reconnect_grace_s < 0:
                raise ValueError("reconnect_grace_s must be >= 0")
        log_path = data.get("log_path")
        cfg.log_path = str(log_path) if log_path is not None else None
        with _field_context("wrench_schedule"):
            schedule = data.get("wrench_schedule", [])
            if isinstance(schedule, str):
                # path to a standalone schedule file (JSON list of phases)
                try:
                    schedule = json.loads(Path(schedule).read_text(encoding="utf-8"))
                except OSError as exc:
                    raise ValueError(f"cannot read schedule file: {exc}") from exc
            cfg.wrench_schedule = WrenchSchedule.from_json(schedule)
        return cfg

    @classmethod
    def load(cls, path) -> "GatewayConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
        return cls.from_dict(data)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


class _field_context:
    """Re-raise ValueError/KeyError/TypeError as ConfigError naming the field."""

    def __init__(self, path: str):
        self.path = path

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None or issubclass(exc_type, ConfigError):
            return False
        if issubclass(exc_type, KeyError):
            raise ConfigError(f"{self.path}: missing required key {exc}") from exc
        if issubclass(exc_type, (ValueError, TypeError)):
            raise ConfigError(f"{self.path}: {exc}") from exc
        return False


def _num(section: dict, key: str, default: float) -> float:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{key} must be a number, got {value!r}")
    return float(value)
