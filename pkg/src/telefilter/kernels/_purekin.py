"""Pure numpy implementations of the hot per-tick kernels.

Fallback backend used when the compiled extension is unavailable (or forced
via TELEFILTER_PURE_PYTHON=1).  Must stay semantically identical to
``_fastkin``: the parity suite holds fk/jacobian to 1e-12 and the
resolved-rate step to 1e-12 away from singularities (the two backends use
different 6x6 solvers, so agreement degrades with the conditioning of
J J^T + damping^2 I).

DH convention is the classic one: link transform
Rz(theta) * Tz(d) * Tx(a) * Rx(alpha) with theta = q[i] + theta_offset[i].
Table rows are [a, alpha, d, theta_offset].
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"


def _chain(table: np.ndarray, q: np.ndarray):
    """Walk the DH chain; returns (origins (n+1,3), axes (n+1,3), R, p)."""
    n = table.shape[0]
    origins = np.zeros((n + 1, 3))
    axes = np.zeros((n + 1, 3))
    axes[0, 2] = 1.0
    t = np.eye(4)
    link = np.empty((4, 4))
    link[3] = (0.0, 0.0, 0.0, 1.0)
    for i in range(n):
        a, alpha, d, off = table[i]
        theta = q[i] + off
        ct, st = math.cos(theta), math.sin(theta)
        ca, sa = math.cos(alpha), math.sin(alpha)
        link[0, 0] = ct
        link[0, 1] = -st * ca
        link[0, 2] = st * sa
        link[0, 3] = a * ct
        link[1, 0] = st
        link[1, 1] = ct * ca
        link[1, 2] = -ct * sa
        link[1, 3] = a * st
        link[2, 0] = 0.0
        link[2, 1] = sa
        link[2, 2] = ca
        link[2, 3] = d
        t = t @ link
        origins[i + 1] = t[:3, 3]
        axes[i + 1] = t[:3, 2]
    return origins, axes, t[:3, :3], t[:3, 3]


def fk(table: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Forward kinematics. Returns (R 3x3, p 3) of the last frame in base."""
    _, _, rot, pos = _chain(np.asarray(table, dtype=float), np.asarray(q, dtype=float))
    return rot.copy(), pos.copy()


def _jacobian_from_chain(origins, axes, n: int) -> np.ndarray:
    jac = np.empty((6, n))
    tx, ty, tz = origins[n]
    for i in range(n):
        zx, zy, zz = axes[i]
        dx = tx - origins[i, 0]
        dy = ty - origins[i, 1]
        dz = tz - origins[i, 2]
        jac[0, i] = zy * dz - zz * dy
        jac[1, i] = zz * dx - zx * dz
        jac[2, i] = zx * dy - zy * dx
        jac[3, i] = zx
        jac[4, i] = zy
        jac[5, i] = zz
    return jac


def jacobian(table: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Base-frame geometric Jacobian, linear rows on top of angular rows.

    Revolute joint i rotates about the z axis of frame i-1.
    """
    table = np.asarray(table, dtype=float)
    origins, axes, _, _ = _chain(table, np.asarray(q, dtype=float))
    return _jacobian_from_chain(origins, axes, table.shape[0])


def resolved_rate(
    table: np.ndarray, q: np.ndarray, dx: np.ndarray, damping: float
) -> tuple[np.ndarray, np.ndarray]:
    """Damped least-squares step dq = J^T (J J^T + damping^2 I)^-1 dx.

    dx is [world-frame translation; body-frame rotation vector]; the rotation
    part is mapped through the end-effector rotation before the solve, since
    the geometric Jacobian works in world-frame angular velocity.  To first
    order the step then satisfies fk(q + dq) = pose_apply(fk(q), dx) in the
    body-frame delta convention.

    Returns (dq, err) where err = J dq - dx_world is the linearized Cartesian
    shortfall introduced by the damping (world frame; norms are
    frame-independent).
    """
    table = np.asarray(table, dtype=float)
    dx = np.asarray(dx, dtype=float)
    origins, axes, rot, _ = _chain(table, np.asarray(q, dtype=float))
    n = table.shape[0]
    jac = _jacobian_from_chain(origins, axes, n)
    dx_world = np.empty(6)
    dx_world[:3] = dx[:3]
    dx_world[3:] = rot @ dx[3:]
    m = jac @ jac.T
    m[np.diag_indices_from(m)] += damping * damping
    y = np.linalg.solve(m, dx_world)
    dq = jac.T @ y
    err = jac @ dq - dx_world
    return dq, err
