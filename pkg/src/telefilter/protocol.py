"""Wire protocol: UTF-8 JSON text frames, one message per frame.

Client -> server: delta_pose | reset | describe
Server -> client: state | description | reject | error

Numbers are plain decimal JSON (NaN/Inf are rejected on parse).  The
websocket endpoint lives at PATH with subprotocol SUBPROTOCOL; JSON schema
files for every message live in protocol/ at the repository root and are
shared with the browser console.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

SUBPROTOCOL = "telefilter.v1"
PATH = "/teleop"


class ProtocolError(ValueError):
    pass


def _reject_constant(name: str):
    raise ProtocolError(f"non-finite JSON number {name!r} not allowed")


def loads_strict(text: str) -> dict:
    """Parse one JSON frame; NaN/Infinity literals are protocol errors."""
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"invalid JSON frame: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ProtocolError("frame must be a JSON object")
    return obj


def _finite_triple(obj: dict, key: str) -> np.ndarray:
    value = obj.get(key)
    if not isinstance(value, list) or len(value) != 3:
        raise ProtocolError(f"{key} must be a list of 3 numbers")
    out = np.empty(3)
    for i, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise ProtocolError(f"{key}[{i}] must be a finite number")
        out[i] = float(x)
    return out


@dataclass(frozen=True, eq=False)
class CommandMessage:
    """Operator delta-pose command."""

    seq: int
    translation: np.ndarray  # meters
    rotation: np.ndarray  # rotation vector, radians
    client_time_ms: int
    gripper: bool | None = None

    def to_json_obj(self) -> dict:
        obj = {
            "type": "delta_pose",
            "seq": self.seq,
            "translation": [float(x) for x in self.translation],
            "rotation": [float(x) for x in self.rotation],
            "client_time_ms": self.client_time_ms,
        }
        if self.gripper is not None:
            obj["gripper"] = self.gripper
        return obj


def parse_command(obj: dict) -> CommandMessage:
    if obj.get("type") != "delta_pose":
        raise ProtocolError(f"expected type 'delta_pose', got {obj.get('type')!r}")
    seq = obj.get("seq")
    if isinstance(seq, bool) or not isinstance(seq, int) or seq < 0:
        raise ProtocolError("seq must be a non-negative integer")
    time_ms = obj.get("client_time_ms")
    if isinstance(time_ms, bool) or not isinstance(time_ms, int):
        raise ProtocolError("client_time_ms must be an integer")
    gripper = obj.get("gripper")
    if gripper is not None and not isinstance(gripper, bool):
        raise ProtocolError("gripper must be a boolean")
    return CommandMessage(
        seq=seq,
        translation=_finite_triple(obj, "translation"),
        rotation=_finite_triple(obj, "rotation"),
        client_time_ms=time_ms,
        gripper=gripper,
    )


def parse_client_frame(text: str) -> tuple[str, CommandMessage | None]:
    """Parse a client frame into (kind, payload). Raises ProtocolError."""
    obj = loads_strict(text)
    kind = obj.get("type")
    if kind == "delta_pose":
        return kind, parse_command(obj)
    if kind in ("reset", "describe"):
        return kind, None
    raise ProtocolError(f"unknown message type {kind!r}")


def pose_to_json_obj(position, quaternion) -> dict:
    return {
        "position": [float(x) for x in position],
        "quaternion": [float(x) for x in quaternion],
    }


def fault_to_json_obj(fault) -> dict:
    if not fault.tripped:
        return {"status": "ok"}
    obj = {"status": "tripped", "reason": fault.reason.value}
    if fault.joint is not None:
        obj["joint"] = fault.joint
    if fault.at_time is not None:
        obj["at_time"] = fault.at_time
    return obj


def build_reject(reason: str, seq: int | None = None, detail: str | None = None) -> dict:
    obj: dict = {"type": "reject", "reason": reason}
    if seq is not None:
        obj["seq"] = seq
    if detail is not None:
        obj["detail"] = detail
    return obj


def build_error(reason: str) -> dict:
    return {"type": "error", "reason": reason}


def build_description(config) -> dict:
    """Arm/filter geometry served on {type:"describe"} so clients can render
    the schematic and rate-limit commands without a second config channel."""
    return {
        "type": "description",
        "protocol": SUBPROTOCOL,
        "dh": config.dh.rows(),
        "home": config.home.tolist(),
        "joint_limits": {
            "q_min": config.limits.q_min.tolist(),
            "q_max": config.limits.q_max.tolist(),
            "v_max": config.limits.v_max.tolist(),
        },
        "command_hz": config.filter.command_hz,
        "control_hz": config.filter.control_hz,
        "max_position_step_m": config.filter.max_position_step,
        "max_rotation_step_rad": config.filter.max_rotation_step,
        "position_deadband_m": config.filter.position_deadband,
        "rotation_deadband_rad": config.filter.rotation_deadband,
    }


def dumps(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)
