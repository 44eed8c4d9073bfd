"""Minimal 3D pose algebra shared by the whole pipeline.

Conventions:
    - Quaternions are scalar-first ``[w, x, y, z]`` unit quaternions with the
      canonical sign ``w >= 0`` (``q`` and ``-q`` encode the same rotation, so
      the sign is fixed to make equality tests well defined).
    - Orientation deltas are rotation vectors (axis * angle, radians), wrapped
      to magnitude <= pi on construction.
    - Deltas compose in the body frame of the current orientation: the
      translation part is a world-frame offset, the rotation part is relative
      to the current end-effector orientation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Below this angle (rad) the exp/log maps switch to second-order series
# branches to avoid 0/0.
SMALL_ANGLE = 1e-8


def as_vec3(v) -> np.ndarray:
    """Validate and freeze a 3-vector. Rejects NaN/Inf and wrong shapes.

    Already-frozen float64 arrays pass through without copying, which keeps
    pose construction cheap on the control-loop hot path.
    """
    if isinstance(v, np.ndarray) and v.dtype == np.float64 and v.shape == (3,):
        a = v
    else:
        a = np.array(v, dtype=float).reshape(-1)
        if a.shape != (3,):
            raise ValueError(f"expected 3 components, got shape {a.shape}")
    if not (math.isfinite(a[0]) and math.isfinite(a[1]) and math.isfinite(a[2])):
        raise ValueError("vector components must be finite")
    if a.flags.writeable:
        if a is v:
            a = a.copy()
        a.setflags(write=False)
    return a


def as_unit_quat(q, tol: float = 1e-6) -> np.ndarray:
    """Validate, renormalize and sign-canonicalize a quaternion [w,x,y,z].

    Inputs whose norm deviates from 1 by more than `tol` are rejected rather
    than silently rescaled; small drift from float arithmetic is absorbed.
    """
    if isinstance(q, np.ndarray) and q.dtype == np.float64 and q.shape == (4,):
        a = q
    else:
        a = np.array(q, dtype=float).reshape(-1)
        if a.shape != (4,):
            raise ValueError(f"expected 4 components, got shape {a.shape}")
    w, x, y, z = a
    n2 = w * w + x * x + y * y + z * z
    if not math.isfinite(n2):
        raise ValueError("quaternion components must be finite")
    # |n - 1| <= tol corresponds to |n^2 - 1| <= ~2 tol near 1
    if abs(n2 - 1.0) > 2.0 * tol:
        raise ValueError(f"quaternion norm {math.sqrt(n2)} too far from 1")
    if n2 == 1.0 and w >= 0.0:
        if a.flags.writeable:
            if a is q:
                a = a.copy()
            a.setflags(write=False)
        return a
    inv = 1.0 / math.sqrt(n2)
    if w < 0.0:
        inv = -inv
    out = np.array([w * inv, x * inv, y * inv, z * inv])
    out.setflags(write=False)
    return out


def quat_multiply(q1, q2) -> np.ndarray:
    """Hamilton product q1 (x) q2, sign-canonicalized."""
    w1, x1, y1, z1 = q1
    w2, x2, y2, z2 = q2
    out = np.array(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]
    )
    if out[0] < 0.0:
        out = -out
    return out


def quat_conjugate(q) -> np.ndarray:
    w, x, y, z = q
    return np.array([w, -x, -y, -z])


def quat_rotate(q, v) -> np.ndarray:
    """Rotate vector v by quaternion q (q v q*)."""
    w = q[0]
    u = np.asarray(q[1:4], dtype=float)
    v = np.asarray(v, dtype=float)
    t = 2.0 * np.cross(u, v)
    return v + w * t + np.cross(u, t)


def rotvec_to_quat(r) -> np.ndarray:
    """Exponential map: rotation vector (axis * angle, rad) -> unit quaternion."""
    r = np.asarray(r, dtype=float)
    angle = math.sqrt(float(r @ r))
    if angle < SMALL_ANGLE:
        # sin(a/2)/a ~= 1/2 - a^2/48, cos(a/2) ~= 1 - a^2/8
        w = 1.0 - angle * angle / 8.0
        xyz = r * (0.5 - angle * angle / 48.0)
    else:
        half = 0.5 * angle
        w = math.cos(half)
        xyz = r * (math.sin(half) / angle)
    q = np.array([w, xyz[0], xyz[1], xyz[2]])
    q /= math.sqrt(float(q @ q))
    if q[0] < 0.0:
        q = -q
    return q


def quat_to_rotvec(q) -> np.ndarray:
    """Log map: unit quaternion -> rotation vector with magnitude <= pi."""
    q = np.asarray(q, dtype=float)
    if q[0] < 0.0:
        q = -q
    w = q[0]
    xyz = q[1:4]
    s = math.sqrt(float(xyz @ xyz))
    if s < SMALL_ANGLE:
        # 2*atan2(s, w)/s ~= 2/w - 2 s^2 / (3 w^3)
        factor = 2.0 / w - 2.0 * s * s / (3.0 * w**3)
        return xyz * factor
    angle = 2.0 * math.atan2(s, w)
    return xyz * (angle / s)


def wrap_rotvec(r) -> np.ndarray:
    """Wrap a rotation vector to the equivalent one with magnitude <= pi."""
    r = np.asarray(r, dtype=float)
    angle = math.sqrt(float(r @ r))
    if angle <= math.pi:
        return r
    wrapped = math.fmod(angle, 2.0 * math.pi)
    if wrapped > math.pi:
        wrapped -= 2.0 * math.pi
    return r * (wrapped / angle)


def quat_to_matrix(q) -> np.ndarray:
    """Unit quaternion -> 3x3 rotation matrix."""
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def matrix_to_quat(mat) -> np.ndarray:
    """3x3 rotation matrix -> canonical unit quaternion (Shepperd's method)."""
    m = np.asarray(mat, dtype=float)
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    if tr > 0.0:
        s = math.sqrt(tr + 1.0) * 2.0
        q = np.array(
            [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
        )
    elif m[0, 0] >= m[1, 1] and m[0, 0] >= m[2, 2]:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = np.array(
            [(m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s]
        )
    elif m[1, 1] >= m[2, 2]:
        s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        q = np.array(
            [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s]
        )
    else:
        s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        q = np.array(
            [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s]
        )
    q /= math.sqrt(float(q @ q))
    if q[0] < 0.0:
        q = -q
    return q


@dataclass(frozen=True, eq=False)
class Pose:
    """End-effector pose: position (m) + orientation (unit quaternion)."""

    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", as_vec3(self.position))
        object.__setattr__(self, "orientation", as_unit_quat(self.orientation))

    @staticmethod
    def identity() -> "Pose":
        return Pose(np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0]))

    def matrix(self) -> np.ndarray:
        """Homogeneous 4x4 transform."""
        t = np.eye(4)
        t[:3, :3] = quat_to_matrix(self.orientation)
        t[:3, 3] = self.position
        return t


@dataclass(frozen=True, eq=False)
class DeltaPose:
    """Relative pose change: world-frame translation (m) + body-frame
    rotation vector (rad). The rotation is wrapped to magnitude <= pi."""

    translation: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "translation", as_vec3(self.translation))
        object.__setattr__(self, "rotation", as_vec3(wrap_rotvec(as_vec3(self.rotation))))

    @staticmethod
    def zero() -> "DeltaPose":
        return DeltaPose(np.zeros(3), np.zeros(3))

    @property
    def translation_norm(self) -> float:
        return float(np.linalg.norm(self.translation))

    @property
    def rotation_norm(self) -> float:
        return float(np.linalg.norm(self.rotation))

    def is_zero(self) -> bool:
        return not (self.translation.any() or self.rotation.any())


def pose_diff(target: Pose, current: Pose) -> DeltaPose:
    """Delta taking `current` to `target`: pose_apply(current, result) == target."""
    translation = target.position - current.position
    q_rel = quat_multiply(quat_conjugate(current.orientation), target.orientation)
    return DeltaPose(translation, quat_to_rotvec(q_rel))


def pose_apply(base: Pose, delta: DeltaPose) -> Pose:
    """Apply a delta to a pose (inverse of pose_diff)."""
    position = base.position + delta.translation
    orientation = quat_multiply(base.orientation, rotvec_to_quat(delta.rotation))
    return Pose(position, orientation)
