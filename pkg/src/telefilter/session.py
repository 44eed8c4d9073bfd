"""Deterministic teleop session core.

Owns the controller state, the operator's target pose, the active substep
plan and the trajectory log.  A wire delta is the operator's remaining error
to target (virtual-copy pose minus executed pose, computed client-side
against telemetry), so the session reconstructs the commanded pose as
executed (+) delta at ingest.  Ingestion goes through a single-slot
latest-wins mailbox: a fresh command discards both any pending unconsumed
command and the unexecuted remainder of the active plan at the next tick
boundary, keeping the arm reactive and the queue depth bounded at one.

The session is pure state-machine logic (no clocks, no sockets): the
websocket gateway drives it in real time, the replay driver drives it from a
recorded hand-motion trace on a simulated clock, so identical inputs produce
bit-identical logs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Mapping

from .config import GatewayConfig
from .controller import ArmController
from .filtering import interpolate, process_command
from .geometry import DeltaPose, pose_apply, pose_diff
from .protocol import (
    CommandMessage,
    ProtocolError,
    fault_to_json_obj,
    parse_command,
    pose_to_json_obj,
)
from .trajlog import LogHeader, TrajectoryLog

_ZERO_DELTA = DeltaPose.zero()


@dataclass(frozen=True)
class IngestResult:
    status: str  # accepted | replaced | rejected
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.status != "rejected"


class TeleopSession:
    """One operator session against the simulated arm."""

    def __init__(self, config: GatewayConfig, *, apply_filter: bool = True):
        self.config = config
        self.params = config.filter
        self.apply_filter = apply_filter
        self.arm = ArmController(
            dh=config.dh,
            limits=config.limits,
            stiffness=config.stiffness,
            home=config.home,
            damping=config.damping,
            tracking_bound=config.tracking_bound,
            tracking_streak=config.tracking_streak,
        )
        self.state = self.arm.reset()
        # operator-intent pose (the virtual copy): reconstructed at every
        # ingest as executed (+) delta; this is the "commanded" column of the
        # log, against which tracking error and jerk are evaluated
        self.operator_target = self.state.executed_pose
        self.pending: CommandMessage | None = None
        self.pending_reset = False
        self.plan: deque[DeltaPose] = deque()
        self.active_seq: int | None = None
        self.last_seq = -1
        self.gripper = False
        self.tick_index = 0
        self._records: list[dict] = []

    # -- ingestion (latest-wins mailbox) ---------------------------------

    def ingest_command(self, message) -> IngestResult:
        """Accept an operator command; newest command wins.

        `message` may be a parsed CommandMessage or a raw JSON object.
        Malformed input and stale sequence numbers are rejected without
        touching session state.
        """
        if isinstance(message, CommandMessage):
            cmd = message
        elif isinstance(message, Mapping):
            try:
                cmd = parse_command(dict(message))
            except ProtocolError as exc:
                return IngestResult("rejected", f"malformed: {exc}")
        else:
            return IngestResult("rejected", "malformed: unsupported message payload")
        if cmd.seq <= self.last_seq:
            return IngestResult("rejected", "stale")
        self.last_seq = cmd.seq
        delta = DeltaPose(cmd.translation, cmd.rotation)
        self.operator_target = pose_apply(self.state.executed_pose, delta)
        if cmd.gripper is not None:
            self.gripper = cmd.gripper
        replaced = self.pending is not None or bool(self.plan)
        self.pending = cmd
        return IngestResult("replaced" if replaced else "accepted")

    def request_reset(self) -> None:
        """Queue a reset; applied at the next tick boundary."""
        self.pending_reset = True

    def queue_depth(self) -> int:
        """Commands awaiting installation; bounded at 1 by the mailbox."""
        return 1 if self.pending is not None else 0

    # -- control loop -----------------------------------------------------

    def control_tick(self, emit_state: bool = True) -> dict | None:
        """Run one control period; returns the state telemetry message
        (suppressed with emit_state=False for headless batch replay)."""
        if self.pending_reset:
            self.pending_reset = False
            self.state = self.arm.reset()
            self.plan.clear()
            self.active_seq = None
            self.pending = None
            self.operator_target = self.state.executed_pose
        if self.pending is not None:
            cmd = self.pending
            self.pending = None
            delta = DeltaPose(cmd.translation, cmd.rotation)
            if self.apply_filter:
                plan = process_command(delta, self.params)
            else:
                plan = interpolate(delta, self.params)
            self.plan = deque(plan.substeps)
            self.active_seq = cmd.seq

        if self.plan:
            substep = self.plan.popleft()
            seq_used = self.active_seq
        else:
            substep = _ZERO_DELTA
            seq_used = None

        t = self.tick_index / self.params.control_hz
        wrench = self.config.wrench_schedule.wrench_at(t)
        self.state = self.arm.step(self.state, substep, self.params.control_period, wrench)

        fault_reason = self.state.fault.reason.value if self.state.fault.tripped else None
        self._records.append(
            {
                "t": t,
                "cmd_pos": self.operator_target.position.tolist(),
                "cmd_quat": self.operator_target.orientation.tolist(),
                "exe_pos": self.state.executed_pose.position.tolist(),
                "exe_quat": self.state.executed_pose.orientation.tolist(),
                "fault": fault_reason,
                "seq_active": seq_used,
            }
        )
        message = self._state_message(t) if emit_state else None
        self.tick_index += 1
        return message

    def _state_message(self, t: float) -> dict:
        return {
            "type": "state",
            "tick": self.tick_index,
            "t": t,
            "sim_time_s": self.state.sim_time,
            "executed_pose": pose_to_json_obj(
                self.state.executed_pose.position, self.state.executed_pose.orientation
            ),
            "commanded_pose": pose_to_json_obj(
                self.operator_target.position, self.operator_target.orientation
            ),
            "joint_positions": self.state.q.tolist(),
            "fault": fault_to_json_obj(self.state.fault),
            "active_plan_remaining": len(self.plan),
            "seq_active": self.active_seq if self.plan else None,
            "gripper": self.gripper,
        }

    # -- results ----------------------------------------------------------

    def finish(self) -> TrajectoryLog:
        header = LogHeader(
            config_hash=self.config.config_hash(),
            control_hz=self.params.control_hz,
            command_hz=self.params.command_hz,
        )
        return TrajectoryLog.from_records(header, self._records)


def run_replay(
    config: GatewayConfig,
    hand_commands: list[CommandMessage],
    *,
    apply_filter: bool = True,
    duration_s: float | None = None,
    settle_periods: int = 1,
) -> tuple[TrajectoryLog, TeleopSession]:
    """Drive a session from a recorded hand-motion trace on the simulated clock.

    Plays the VR-client role: the trace's deltas are increments of the
    operator's virtual-copy pose; each command period the copy advances and
    the wire delta sent to the session is the remaining error
    pose_diff(copy, executed), just as a live client computes it from
    telemetry.  Command k goes in immediately before the first tick whose
    time is >= its client_time_ms.  The run extends past the last command by
    one command period (to drain its plan) plus `settle_periods` idle
    periods, unless an explicit duration is given.
    """
    session = TeleopSession(config, apply_filter=apply_filter)
    control_hz = config.filter.control_hz
    k = config.filter.substeps_per_command
    if duration_s is not None:
        total_ticks = int(round(duration_s * control_hz))
    elif hand_commands:
        t_last = hand_commands[-1].client_time_ms / 1000.0
        total_ticks = int(math.floor(t_last * control_hz + 1e-9)) + k + settle_periods * k
    else:
        total_ticks = max(1, settle_periods) * k
    copy_pose = session.state.executed_pose
    idx = 0
    n = len(hand_commands)
    for i in range(total_ticks):
        t = i / control_hz
        while idx < n and hand_commands[idx].client_time_ms / 1000.0 <= t + 1e-9:
            hand = hand_commands[idx]
            copy_pose = pose_apply(copy_pose, DeltaPose(hand.translation, hand.rotation))
            error = pose_diff(copy_pose, session.state.executed_pose)
            session.ingest_command(
                CommandMessage(
                    seq=hand.seq,
                    translation=error.translation,
                    rotation=error.rotation,
                    client_time_ms=hand.client_time_ms,
                    gripper=hand.gripper,
                )
            )
            idx += 1
        session.control_tick(emit_state=False)
    return session.finish(), session
