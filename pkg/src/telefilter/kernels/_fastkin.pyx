# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-tick kernels: DH chain forward kinematics, geometric Jacobian
and the damped least-squares resolved-rate step.

Semantics mirror ``_purekin`` exactly (same DH convention, same formulas);
the parity tests compare both backends to 1e-12.  Supports chains of up to
16 joints, which covers the 6-DoF arm plus test fixtures.
"""

from libc.math cimport cos, sin, sqrt

import numpy as np

BACKEND_NAME = "cython"

# chain buffers are sized for (16 + 1) frames * 3 components
cdef enum:
    MAX_JOINTS = 16


cdef void _chain(const double[:, ::1] table, const double[::1] q, int n,
                 double* origins, double* axes, double* r_fin, double* p_fin) noexcept nogil:
    """Walk the DH chain; record each frame's origin and z axis (flat n+1 x 3)."""
    cdef double r[9]
    cdef double p[3]
    cdef double rn[9]
    cdef double pn[3]
    cdef double ar[9]
    cdef double ap[3]
    cdef double a, d, th, ct, st, ca, sa
    cdef int i, j, k
    for i in range(9):
        r[i] = 0.0
    r[0] = r[4] = r[8] = 1.0
    p[0] = p[1] = p[2] = 0.0
    origins[0] = origins[1] = origins[2] = 0.0
    axes[0] = axes[1] = 0.0
    axes[2] = 1.0
    for i in range(n):
        a = table[i, 0]
        ca = cos(table[i, 1])
        sa = sin(table[i, 1])
        d = table[i, 2]
        th = q[i] + table[i, 3]
        ct = cos(th)
        st = sin(th)
        ar[0] = ct; ar[1] = -st * ca; ar[2] = st * sa
        ar[3] = st; ar[4] = ct * ca;  ar[5] = -ct * sa
        ar[6] = 0.0; ar[7] = sa;      ar[8] = ca
        ap[0] = a * ct; ap[1] = a * st; ap[2] = d
        for j in range(3):
            for k in range(3):
                rn[3 * j + k] = r[3 * j] * ar[k] + r[3 * j + 1] * ar[3 + k] + r[3 * j + 2] * ar[6 + k]
            pn[j] = r[3 * j] * ap[0] + r[3 * j + 1] * ap[1] + r[3 * j + 2] * ap[2] + p[j]
        for j in range(9):
            r[j] = rn[j]
        for j in range(3):
            p[j] = pn[j]
        origins[3 * (i + 1)] = p[0]
        origins[3 * (i + 1) + 1] = p[1]
        origins[3 * (i + 1) + 2] = p[2]
        axes[3 * (i + 1)] = r[2]
        axes[3 * (i + 1) + 1] = r[5]
        axes[3 * (i + 1) + 2] = r[8]
    for i in range(9):
        r_fin[i] = r[i]
    for i in range(3):
        p_fin[i] = p[i]


cdef void _jacobian_flat(const double[:, ::1] table, const double[::1] q, int n,
                         double* jac) noexcept nogil:
    """Geometric Jacobian into a flat row-major (6, n) buffer."""
    cdef double origins[(MAX_JOINTS + 1) * 3]
    cdef double axes[(MAX_JOINTS + 1) * 3]
    cdef double rf[9]
    cdef double pf[3]
    cdef double zx, zy, zz, dx, dy, dz
    cdef int i
    _chain(table, q, n, origins, axes, rf, pf)
    for i in range(n):
        zx = axes[3 * i]
        zy = axes[3 * i + 1]
        zz = axes[3 * i + 2]
        dx = pf[0] - origins[3 * i]
        dy = pf[1] - origins[3 * i + 1]
        dz = pf[2] - origins[3 * i + 2]
        jac[0 * n + i] = zy * dz - zz * dy
        jac[1 * n + i] = zz * dx - zx * dz
        jac[2 * n + i] = zx * dy - zy * dx
        jac[3 * n + i] = zx
        jac[4 * n + i] = zy
        jac[5 * n + i] = zz


cdef int _check(object table, object q) except -1:
    cdef int n = table.shape[0]
    if table.ndim != 2 or table.shape[1] != 4:
        raise ValueError("DH table must have shape (n, 4)")
    if n < 1 or n > MAX_JOINTS:
        raise ValueError(f"joint count {n} outside supported range 1..{MAX_JOINTS}")
    if q.shape[0] != n:
        raise ValueError("q length must match DH table rows")
    return n


def fk(table, q):
    """Forward kinematics. Returns (R 3x3, p 3) of the last frame in base."""
    t = np.ascontiguousarray(table, dtype=np.float64)
    qq = np.ascontiguousarray(q, dtype=np.float64).reshape(-1)
    cdef int n = _check(t, qq)
    cdef const double[:, ::1] tv = t
    cdef const double[::1] qv = qq
    cdef double origins[(MAX_JOINTS + 1) * 3]
    cdef double axes[(MAX_JOINTS + 1) * 3]
    cdef double rf[9]
    cdef double pf[3]
    _chain(tv, qv, n, origins, axes, rf, pf)
    r_out = np.empty((3, 3))
    p_out = np.empty(3)
    cdef double[:, ::1] rv = r_out
    cdef double[::1] pv = p_out
    cdef int i, j
    for i in range(3):
        for j in range(3):
            rv[i, j] = rf[3 * i + j]
        pv[i] = pf[i]
    return r_out, p_out


def jacobian(table, q):
    """Base-frame geometric Jacobian (6, n), linear rows on top."""
    t = np.ascontiguousarray(table, dtype=np.float64)
    qq = np.ascontiguousarray(q, dtype=np.float64).reshape(-1)
    cdef int n = _check(t, qq)
    cdef const double[:, ::1] tv = t
    cdef const double[::1] qv = qq
    cdef double buf[6 * MAX_JOINTS]
    _jacobian_flat(tv, qv, n, buf)
    jac = np.empty((6, n))
    cdef double[:, ::1] jv = jac
    cdef int r, c
    for r in range(6):
        for c in range(n):
            jv[r, c] = buf[r * n + c]
    return jac


def resolved_rate(table, q, dx, damping):
    """Damped least-squares step dq = J^T (J J^T + damping^2 I)^-1 dx.

    dx is [world-frame translation; body-frame rotation vector]; the rotation
    part is mapped through the end-effector rotation before the solve.
    Returns (dq, err) with err = J dq - dx_world.
    """
    t = np.ascontiguousarray(table, dtype=np.float64)
    qq = np.ascontiguousarray(q, dtype=np.float64).reshape(-1)
    xx = np.ascontiguousarray(dx, dtype=np.float64).reshape(-1)
    if xx.shape[0] != 6:
        raise ValueError("dx must have 6 components")
    cdef int n = _check(t, qq)
    cdef const double[:, ::1] tv = t
    cdef const double[::1] qv = qq
    cdef const double[::1] xv = xx
    cdef double lam = damping
    cdef double origins[(MAX_JOINTS + 1) * 3]
    cdef double axes[(MAX_JOINTS + 1) * 3]
    cdef double rf[9]
    cdef double pf[3]
    cdef double jac[6 * MAX_JOINTS]
    cdef double xw[6]
    cdef double m[36]
    cdef double low[36]
    cdef double y[6]
    cdef double sol[6]
    cdef double dq_buf[MAX_JOINTS]
    cdef double zx, zy, zz, ddx, ddy, ddz
    cdef double s
    cdef int i, j, k
    _chain(tv, qv, n, origins, axes, rf, pf)
    for i in range(n):
        zx = axes[3 * i]
        zy = axes[3 * i + 1]
        zz = axes[3 * i + 2]
        ddx = pf[0] - origins[3 * i]
        ddy = pf[1] - origins[3 * i + 1]
        ddz = pf[2] - origins[3 * i + 2]
        jac[0 * n + i] = zy * ddz - zz * ddy
        jac[1 * n + i] = zz * ddx - zx * ddz
        jac[2 * n + i] = zx * ddy - zy * ddx
        jac[3 * n + i] = zx
        jac[4 * n + i] = zy
        jac[5 * n + i] = zz
    for i in range(3):
        xw[i] = xv[i]
        xw[3 + i] = rf[3 * i] * xv[3] + rf[3 * i + 1] * xv[4] + rf[3 * i + 2] * xv[5]
    # m = J J^T + lam^2 I
    for i in range(6):
        for j in range(6):
            s = 0.0
            for k in range(n):
                s += jac[i * n + k] * jac[j * n + k]
            m[6 * i + j] = s
        m[6 * i + i] += lam * lam
    # Cholesky m = L L^T; damping > 0 makes m positive definite
    for i in range(6):
        for j in range(i + 1):
            s = m[6 * i + j]
            for k in range(j):
                s -= low[6 * i + k] * low[6 * j + k]
            if i == j:
                low[6 * i + i] = sqrt(s)
            else:
                low[6 * i + j] = s / low[6 * j + j]
    for i in range(6):
        s = xw[i]
        for k in range(i):
            s -= low[6 * i + k] * y[k]
        y[i] = s / low[6 * i + i]
    for i in range(5, -1, -1):
        s = y[i]
        for k in range(i + 1, 6):
            s -= low[6 * k + i] * sol[k]
        sol[i] = s / low[6 * i + i]
    for j in range(n):
        s = 0.0
        for i in range(6):
            s += jac[i * n + j] * sol[i]
        dq_buf[j] = s
    dq = np.empty(n)
    err = np.empty(6)
    cdef double[::1] dqv = dq
    cdef double[::1] ev = err
    for j in range(n):
        dqv[j] = dq_buf[j]
    for i in range(6):
        s = 0.0
        for j in range(n):
            s += jac[i * n + j] * dq_buf[j]
        ev[i] = s - xw[i]
    return dq, err
