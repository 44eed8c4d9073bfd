/** Two-view orthographic schematic + commanded/executed trail overlay.
 *
 * Pure geometry here (projection, trail bookkeeping, scaling); canvas
 * drawing lives in drawView so tests can cover the data path without a DOM.
 * Top view projects world (x, y); side view projects world (x, z).
 */

import type { Vec3 } from "./math3.js";
import { chainOrigins, type DhRow } from "./kinematics.js";
import type { StateMessage } from "./protocol.js";

export type ViewPlane = "top" | "side";

export interface TrailSample {
  tick: number;
  cmd: Vec3;
  exe: Vec3;
}

export class TrailBuffer {
  readonly samples: TrailSample[] = [];

  constructor(readonly capacity = 600) {}

  push(state: StateMessage): void {
    this.samples.push({
      tick: state.tick,
      cmd: [...state.commanded_pose.position] as Vec3,
      exe: [...state.executed_pose.position] as Vec3,
    });
    if (this.samples.length > this.capacity) {
      this.samples.splice(0, this.samples.length - this.capacity);
    }
  }

  clear(): void {
    this.samples.length = 0;
  }
}

export function project(point: Vec3, plane: ViewPlane): [number, number] {
  return plane === "top" ? [point[0], point[1]] : [point[0], point[2]];
}

export interface Viewport {
  width: number;
  height: number;
  scale: number; // px per meter
  centerX: number; // world coords at canvas center, in the projected plane
  centerY: number;
}

export function toCanvas(point: Vec3, plane: ViewPlane, vp: Viewport): [number, number] {
  const [u, v] = project(point, plane);
  return [
    vp.width / 2 + (u - vp.centerX) * vp.scale,
    vp.height / 2 - (v - vp.centerY) * vp.scale, // canvas y points down
  ];
}

/** Joint polyline for one view, in canvas pixels. */
export function schematicPolyline(
  dh: DhRow[],
  jointPositions: number[],
  plane: ViewPlane,
  vp: Viewport,
): [number, number][] {
  return chainOrigins(dh, jointPositions).map((p) => toCanvas(p, plane, vp));
}

export interface CanvasContextLike {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
}

function drawPolyline(ctx: CanvasContextLike, points: [number, number][]): void {
  if (points.length < 2) return;
  ctx.beginPath();
  ctx.moveTo(points[0]![0], points[0]![1]);
  for (let i = 1; i < points.length; i++) ctx.lineTo(points[i]![0], points[i]![1]);
  ctx.stroke();
}

export function drawView(
  ctx: CanvasContextLike,
  plane: ViewPlane,
  vp: Viewport,
  dh: DhRow[] | null,
  state: StateMessage | null,
  trail: TrailBuffer,
  cursor: Vec3 | null,
): void {
  ctx.clearRect(0, 0, vp.width, vp.height);
  ctx.font = "12px sans-serif";
  ctx.fillStyle = "#888";
  ctx.fillText(plane === "top" ? "top (x-y)" : "side (x-z)", 8, 16);

  if (trail.samples.length >= 2) {
    ctx.lineWidth = 1;
    ctx.strokeStyle = "#d08770";
    drawPolyline(ctx, trail.samples.map((s) => toCanvas(s.cmd, plane, vp)));
    ctx.strokeStyle = "#5e81ac";
    drawPolyline(ctx, trail.samples.map((s) => toCanvas(s.exe, plane, vp)));
  }
  if (dh !== null && state !== null) {
    ctx.lineWidth = 3;
    ctx.strokeStyle = "#3b4252";
    const polyline = schematicPolyline(dh, state.joint_positions, plane, vp);
    drawPolyline(ctx, polyline);
    const tip = polyline[polyline.length - 1]!;
    ctx.fillStyle = "#5e81ac";
    ctx.beginPath();
    ctx.arc(tip[0], tip[1], 4, 0, 2 * Math.PI);
    ctx.fill();
  }
  if (cursor !== null) {
    const [cx, cy] = toCanvas(cursor, plane, vp);
    ctx.fillStyle = "#a3be8c";
    ctx.beginPath();
    ctx.arc(cx, cy, 3, 0, 2 * Math.PI);
    ctx.fill();
  }
}
