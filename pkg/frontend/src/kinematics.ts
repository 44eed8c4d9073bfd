/** DH forward kinematics for the schematic: the joint-frame origins the
 * 2-view renderer draws. Same classic convention as the gateway
 * (Rz(theta) Tz(d) Tx(a) Rx(alpha), theta = q + theta_offset). */

import type { Vec3 } from "./math3.js";

export interface DhRow {
  a: number;
  alpha: number;
  d: number;
  theta_offset: number;
}

type Mat4 = number[]; // row-major, 16

const IDENTITY: Mat4 = [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1];

function matMul(a: Mat4, b: Mat4): Mat4 {
  const out = new Array<number>(16).fill(0);
  for (let i = 0; i < 4; i++) {
    for (let j = 0; j < 4; j++) {
      let s = 0;
      for (let k = 0; k < 4; k++) s += a[i * 4 + k]! * b[k * 4 + j]!;
      out[i * 4 + j] = s;
    }
  }
  return out;
}

function dhLink(row: DhRow, q: number): Mat4 {
  const th = q + row.theta_offset;
  const ct = Math.cos(th);
  const st = Math.sin(th);
  const ca = Math.cos(row.alpha);
  const sa = Math.sin(row.alpha);
  return [
    ct, -st * ca, st * sa, row.a * ct,
    st, ct * ca, -ct * sa, row.a * st,
    0, sa, ca, row.d,
    0, 0, 0, 1,
  ];
}

/** Origins of the base frame plus every joint frame (n+1 points, meters). */
export function chainOrigins(dh: DhRow[], q: number[]): Vec3[] {
  if (dh.length !== q.length) {
    throw new Error(`DH rows (${dh.length}) and joint count (${q.length}) differ`);
  }
  const points: Vec3[] = [[0, 0, 0]];
  let t = IDENTITY;
  for (let i = 0; i < dh.length; i++) {
    t = matMul(t, dhLink(dh[i]!, q[i]!));
    points.push([t[3]!, t[7]!, t[11]!]);
  }
  return points;
}

/** End-effector position (last chain origin). */
export function tipPosition(dh: DhRow[], q: number[]): Vec3 {
  const points = chainOrigins(dh, q);
  return points[points.length - 1]!;
}
