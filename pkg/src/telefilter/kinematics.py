"""Kinematics of a configurable 6-DoF serial arm.

The arm is defined by a classic DH table (rows [a, alpha, d, theta_offset]).
The bundled default geometry is an articulated 6R arm of industrial-cobot
scale (reach ~0.9 m); its link values and joint limits are stand-ins, not
vendor data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .geometry import DeltaPose, Pose, matrix_to_quat

NUM_JOINTS = 6


def as_joint_vector(q) -> np.ndarray:
    a = np.array(q, dtype=float).reshape(-1)
    if a.shape != (NUM_JOINTS,):
        raise ValueError(f"expected {NUM_JOINTS} joint values, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("joint values must be finite")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DHParams:
    """DH table of the 6-joint arm, shape (6, 4): a (m), alpha (rad), d (m),
    theta_offset (rad) per row."""

    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.shape != (NUM_JOINTS, 4):
            raise ValueError(f"DH table must have shape ({NUM_JOINTS}, 4), got {t.shape}")
        if not np.all(np.isfinite(t)):
            raise ValueError("DH parameters must be finite")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @classmethod
    def from_rows(cls, rows) -> "DHParams":
        """Build from a list of {a, alpha, d, theta_offset} mappings."""
        table = [[r["a"], r["alpha"], r["d"], r["theta_offset"]] for r in rows]
        return cls(np.array(table, dtype=float))

    def rows(self) -> list[dict]:
        return [
            {"a": a, "alpha": alpha, "d": d, "theta_offset": off}
            for a, alpha, d, off in self.table.tolist()
        ]

    @classmethod
    def default(cls) -> "DHParams":
        # Articulated 6R: shoulder / elbow / 3-axis wrist, reach ~0.95 m.
        return cls(
            np.array(
                [
                    [0.00, np.pi / 2, 0.18, 0.0],
                    [0.45, 0.0, 0.00, 0.0],
                    [0.40, 0.0, 0.00, 0.0],
                    [0.00, np.pi / 2, 0.13, 0.0],
                    [0.00, -np.pi / 2, 0.12, 0.0],
                    [0.00, 0.0, 0.10, 0.0],
                ]
            )
        )


@dataclass(frozen=True, eq=False)
class JointLimits:
    """Per-joint position range (rad) and velocity cap (rad/s)."""

    q_min: np.ndarray
    q_max: np.ndarray
    v_max: np.ndarray

    def __post_init__(self):
        q_min = as_joint_vector(self.q_min)
        q_max = as_joint_vector(self.q_max)
        v_max = as_joint_vector(self.v_max)
        if not np.all(q_min < q_max):
            raise ValueError("q_min must be strictly below q_max for every joint")
        if not np.all(v_max > 0):
            raise ValueError("v_max must be strictly positive for every joint")
        object.__setattr__(self, "q_min", q_min)
        object.__setattr__(self, "q_max", q_max)
        object.__setattr__(self, "v_max", v_max)

    @classmethod
    def default(cls) -> "JointLimits":
        return cls(
            q_min=np.full(NUM_JOINTS, -2.96),
            q_max=np.full(NUM_JOINTS, 2.96),
            v_max=np.array([2.0, 2.0, 2.0, 3.0, 3.0, 3.0]),
        )

    def contains(self, q) -> bool:
        q = np.asarray(q, dtype=float)
        return bool(np.all(q >= self.q_min) and np.all(q <= self.q_max))

    def first_violation(self, q) -> int | None:
        """Index of the first joint outside its range, or None."""
        q = np.asarray(q, dtype=float)
        bad = np.flatnonzero((q < self.q_min) | (q > self.q_max))
        return int(bad[0]) if bad.size else None


def fk_chain(table: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Forward kinematics of an arbitrary-length DH chain: (R 3x3, p 3)."""
    return kernels.fk(np.asarray(table, dtype=float), np.asarray(q, dtype=float))


def forward_kinematics(dh: DHParams, q) -> Pose:
    """End-effector pose at configuration q."""
    rot, pos = kernels.fk(dh.table, as_joint_vector(q))
    return Pose(pos, matrix_to_quat(rot))


def geometric_jacobian(dh: DHParams, q) -> np.ndarray:
    """6x6 base-frame geometric Jacobian (linear rows 0-2, angular rows 3-5)."""
    return kernels.jacobian(dh.table, as_joint_vector(q))


class ResolvedRateResult(NamedTuple):
    dq: np.ndarray
    # linearized Cartesian shortfall |J dq - dx| introduced by damping
    residual_pos: float
    residual_rot: float


def resolved_rate_step(dh: DHParams, q, dx: DeltaPose, damping: float) -> ResolvedRateResult:
    """Damped least-squares joint step toward the Cartesian delta dx.

    Damping keeps the normal matrix positive definite, so the solve never
    blows up near singularities; it under-achieves the command instead, which
    the residuals report.
    """
    if not (damping > 0):
        raise ValueError("damping must be strictly positive")
    twist = np.concatenate([dx.translation, dx.rotation])
    dq, err = kernels.resolved_rate(dh.table, as_joint_vector(q), twist, float(damping))
    return ResolvedRateResult(
        dq=dq,
        residual_pos=float(np.linalg.norm(err[:3])),
        residual_rot=float(np.linalg.norm(err[3:])),
    )
