/** Minimal vector/quaternion helpers for the console.
 *
 * Quaternions are scalar-first [w, x, y, z], canonical sign w >= 0, matching
 * the gateway's telemetry. Rotation deltas are rotation vectors (axis *
 * angle, radians) composed in the body frame of the current orientation.
 */

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number];

const SMALL_ANGLE = 1e-8;

export function vecAdd(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function vecSub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

export function vecNorm(a: Vec3): number {
  return Math.hypot(a[0], a[1], a[2]);
}

export function quatCanonical(q: Quat): Quat {
  const n = Math.hypot(q[0], q[1], q[2], q[3]);
  const s = (q[0] < 0 ? -1 : 1) / n;
  return [q[0] * s, q[1] * s, q[2] * s, q[3] * s];
}

export function quatMultiply(a: Quat, b: Quat): Quat {
  const [w1, x1, y1, z1] = a;
  const [w2, x2, y2, z2] = b;
  return quatCanonical([
    w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
    w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
    w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
    w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
  ]);
}

export function quatConjugate(q: Quat): Quat {
  return [q[0], -q[1], -q[2], -q[3]];
}

export function rotvecToQuat(r: Vec3): Quat {
  const angle = vecNorm(r);
  if (angle < SMALL_ANGLE) {
    const w = 1 - (angle * angle) / 8;
    const k = 0.5 - (angle * angle) / 48;
    return quatCanonical([w, r[0] * k, r[1] * k, r[2] * k]);
  }
  const half = angle / 2;
  const k = Math.sin(half) / angle;
  return quatCanonical([Math.cos(half), r[0] * k, r[1] * k, r[2] * k]);
}

export function quatToRotvec(q: Quat): Vec3 {
  const c = quatCanonical(q);
  const s = Math.hypot(c[1], c[2], c[3]);
  if (s < SMALL_ANGLE) {
    const k = 2 / c[0] - (2 * s * s) / (3 * c[0] ** 3);
    return [c[1] * k, c[2] * k, c[3] * k];
  }
  const angle = 2 * Math.atan2(s, c[0]);
  const k = angle / s;
  return [c[1] * k, c[2] * k, c[3] * k];
}

/** Body-frame delta taking `current` to `target` (world-frame translation). */
export function poseDiff(
  targetPos: Vec3,
  targetQuat: Quat,
  currentPos: Vec3,
  currentQuat: Quat,
): { translation: Vec3; rotation: Vec3 } {
  return {
    translation: vecSub(targetPos, currentPos),
    rotation: quatToRotvec(quatMultiply(quatConjugate(currentQuat), targetQuat)),
  };
}
