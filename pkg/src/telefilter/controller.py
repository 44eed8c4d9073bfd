"""Simulated black-box position controller with a fault system.

Consumes substep pose targets at the control frequency, tracks them through
damped least-squares resolved-rate control, trips a latching fault when a
command is infeasible (per-joint velocity budget or joint limits), and
applies the stiffness-mode compliance offset to the published pose.

Everything outside this module is expected to treat the controller as
opaque: consumers read (executed_pose, fault) and nothing else.  All fault
thresholds here are simulator stand-ins; the real vendor controller hides
its internal law and limits.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .geometry import DeltaPose, Pose, pose_apply, pose_diff
from .kinematics import (
    DHParams,
    JointLimits,
    as_joint_vector,
    forward_kinematics,
    resolved_rate_step,
)

DEFAULT_HOME = np.array([0.0, 1.1, -1.8, 0.0, -1.0, 0.0])


class FaultReason(enum.Enum):
    JOINT_VELOCITY_EXCEEDED = "joint_velocity_exceeded"
    JOINT_LIMIT_VIOLATED = "joint_limit_violated"
    TRACKING_DIVERGED = "tracking_diverged"


@dataclass(frozen=True)
class FaultStatus:
    tripped: bool
    reason: FaultReason | None = None
    joint: int | None = None
    at_time: float | None = None

    def __post_init__(self):
        if self.tripped and self.reason is None:
            raise ValueError("tripped fault must carry a reason")
        if not self.tripped and self.reason is not None:
            raise ValueError("ok status must not carry a reason")

    @staticmethod
    def ok() -> "FaultStatus":
        return _FAULT_OK


_FAULT_OK = FaultStatus(tripped=False)


@dataclass(frozen=True, eq=False)
class StiffnessParams:
    """Diagonal Cartesian stiffness: N/m for the translation rows, N*m/rad
    for the rotation rows."""

    diagonal: np.ndarray
    enabled: bool = True

    def __post_init__(self):
        d = np.array(self.diagonal, dtype=float).reshape(-1)
        if d.shape != (6,):
            raise ValueError(f"stiffness diagonal must have 6 entries, got {d.shape}")
        if self.enabled and not np.all(d > 0):
            raise ValueError("stiffness diagonal entries must be positive when enabled")
        d.setflags(write=False)
        object.__setattr__(self, "diagonal", d)

    @classmethod
    def default(cls) -> "StiffnessParams":
        return cls(diagonal=np.array([2000.0, 2000.0, 2000.0, 50.0, 50.0, 50.0]), enabled=True)

    @classmethod
    def disabled(cls) -> "StiffnessParams":
        return cls(diagonal=np.ones(6), enabled=False)


def compliance_offset(stiffness: StiffnessParams, wrench) -> DeltaPose:
    """Linear spring deflection offset = K^-1 * wrench (zero when disabled)."""
    if not stiffness.enabled:
        return DeltaPose.zero()
    w = np.asarray(wrench, dtype=float).reshape(-1)
    if w.shape != (6,):
        raise ValueError(f"wrench must have 6 components, got {w.shape}")
    deflection = w / stiffness.diagonal
    return DeltaPose(deflection[:3], deflection[3:])


@dataclass(frozen=True, eq=False)
class ArmState:
    """Immutable controller state snapshot published after every step."""

    q: np.ndarray
    dq: np.ndarray  # rad/s, velocities of the last executed step
    commanded_pose: Pose  # controller-side target (integrated substeps)
    executed_pose: Pose  # FK(q) composed with the compliance offset
    nominal_pose: Pose  # FK(q), no compliance offset
    fault: FaultStatus
    external_wrench: np.ndarray
    sim_time: float
    # consecutive steps with tracking residual above the divergence bound
    residual_streak: int = 0


class ArmController:
    """The black-box simulation: pose substeps in, (executed pose, fault) out."""

    def __init__(
        self,
        dh: DHParams | None = None,
        limits: JointLimits | None = None,
        stiffness: StiffnessParams | None = None,
        home=None,
        damping: float = 1e-3,
        tracking_bound: float = 5e-3,
        tracking_streak: int = 10,
    ):
        self.dh = dh if dh is not None else DHParams.default()
        self.limits = limits if limits is not None else JointLimits.default()
        self.stiffness = stiffness if stiffness is not None else StiffnessParams.default()
        if not (damping > 0):
            raise ValueError("damping must be strictly positive")
        self.damping = float(damping)
        self.tracking_bound = float(tracking_bound)
        self.tracking_streak = int(tracking_streak)
        home = DEFAULT_HOME if home is None else home
        self.home = as_joint_vector(home)
        if not self.limits.contains(self.home):
            raise ValueError("home configuration violates joint limits")

    def reset(self, home=None) -> ArmState:
        """Fresh state at the home configuration (clears any fault)."""
        home = self.home if home is None else as_joint_vector(home)
        if not self.limits.contains(home):
            raise ValueError("home configuration violates joint limits")
        zero_wrench = np.zeros(6)
        nominal = forward_kinematics(self.dh, home)
        executed = nominal  # zero wrench, so no compliance deflection
        return ArmState(
            q=home,
            dq=np.zeros(6),
            commanded_pose=nominal,
            executed_pose=executed,
            nominal_pose=nominal,
            fault=FaultStatus.ok(),
            external_wrench=zero_wrench,
            sim_time=0.0,
        )

    def step(
        self, state: ArmState, substep: DeltaPose, dt: float, external_wrench=None
    ) -> ArmState:
        """Advance one control period.

        Stepping a tripped state is a no-op returning the same state: the
        caller must reset.  On a new fault the joints stay where they were
        and the fault latches.
        """
        if dt <= 0:
            raise ValueError("dt must be strictly positive")
        if state.fault.tripped:
            return state
        wrench = (
            state.external_wrench
            if external_wrench is None
            else np.asarray(external_wrench, dtype=float).reshape(6)
        )

        commanded = pose_apply(state.commanded_pose, substep)
        # servo on the full error to the updated target (substep plus any
        # accumulated shortfall), like a position loop: open-loop integration
        # of substeps alone would slowly drift away from the target
        error = pose_diff(commanded, state.nominal_pose)
        if error.translation_norm < 1e-14 and error.rotation_norm < 1e-14:
            # below float noise; solving would only stir the last bits
            dq = np.zeros(6)
        else:
            dq = resolved_rate_step(self.dh, state.q, error, self.damping).dq

        over = np.flatnonzero(np.abs(dq) / dt > self.limits.v_max)
        if over.size:
            return self._trip(state, FaultReason.JOINT_VELOCITY_EXCEEDED, int(over[0]))
        q_new = state.q + dq
        bad = self.limits.first_violation(q_new)
        if bad is not None:
            return self._trip(state, FaultReason.JOINT_LIMIT_VIOLATED, bad)

        nominal = forward_kinematics(self.dh, q_new)
        if self.stiffness.enabled and wrench.any():
            executed = pose_apply(nominal, compliance_offset(self.stiffness, wrench))
        else:
            executed = nominal
        # tracking residual is measured on the nominal pose: in stiffness
        # mode the compliance deflection is intended, not a servo error
        residual = float(np.linalg.norm(commanded.position - nominal.position))
        streak = state.residual_streak + 1 if residual > self.tracking_bound else 0
        next_state = ArmState(
            q=q_new,
            dq=dq / dt,
            commanded_pose=commanded,
            executed_pose=executed,
            nominal_pose=nominal,
            fault=FaultStatus.ok(),
            external_wrench=wrench,
            sim_time=state.sim_time + dt,
            residual_streak=streak,
        )
        if streak >= self.tracking_streak:
            return self._trip(next_state, FaultReason.TRACKING_DIVERGED, None)
        return next_state

    @staticmethod
    def _trip(state: ArmState, reason: FaultReason, joint: int | None) -> ArmState:
        fault = FaultStatus(tripped=True, reason=reason, joint=joint, at_time=state.sim_time)
        return replace(state, fault=fault)


@dataclass(frozen=True)
class WrenchPhase:
    start_s: float
    end_s: float
    wrench: np.ndarray

    def __post_init__(self):
        w = np.array(self.wrench, dtype=float).reshape(-1)
        if w.shape != (6,):
            raise ValueError("wrench must have 6 components")
        if not (self.end_s > self.start_s):
            raise ValueError("wrench phase must have end_s > start_s")
        w.setflags(write=False)
        object.__setattr__(self, "wrench", w)


class WrenchSchedule:
    """Piecewise-constant external wrench over time; zero outside phases."""

    def __init__(self, phases: list[WrenchPhase] | None = None):
        self.phases = list(phases or [])

    @classmethod
    def from_json(cls, entries) -> "WrenchSchedule":
        phases = [
            WrenchPhase(float(e["start_s"]), float(e["end_s"]), e["wrench"]) for e in entries
        ]
        return cls(phases)

    def wrench_at(self, t: float) -> np.ndarray:
        for phase in self.phases:
            if phase.start_s <= t < phase.end_s:
                return phase.wrench
        return np.zeros(6)
