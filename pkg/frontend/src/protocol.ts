/** Wire messages for the gateway's "telefilter.v1" protocol.
 *
 * Shapes mirror the JSON Schemas under protocol/ at the repository root;
 * the test suite validates every builder output against those files, and
 * the parser narrows incoming frames so render code never touches
 * unchecked JSON.
 */

import type { Quat, Vec3 } from "./math3.js";
import type { DhRow } from "./kinematics.js";

export const SUBPROTOCOL = "telefilter.v1";
export const PATH = "/teleop";

export interface DeltaPoseMessage {
  type: "delta_pose";
  seq: number;
  translation: [number, number, number];
  rotation: [number, number, number];
  client_time_ms: number;
  gripper?: boolean;
}

export interface ResetMessage {
  type: "reset";
}

export interface DescribeMessage {
  type: "describe";
}

export interface PoseJson {
  position: [number, number, number];
  quaternion: [number, number, number, number];
}

export interface FaultJson {
  status: "ok" | "tripped";
  reason?: string;
  joint?: number;
  at_time?: number;
}

export interface StateMessage {
  type: "state";
  tick: number;
  t: number;
  sim_time_s: number;
  executed_pose: PoseJson;
  commanded_pose: PoseJson;
  joint_positions: number[];
  fault: FaultJson;
  active_plan_remaining: number;
  seq_active: number | null;
  gripper: boolean;
}

export interface DescriptionMessage {
  type: "description";
  protocol: string;
  dh: DhRow[];
  home: number[];
  joint_limits: { q_min: number[]; q_max: number[]; v_max: number[] };
  command_hz: number;
  control_hz: number;
  max_position_step_m: number;
  max_rotation_step_rad: number;
  position_deadband_m: number;
  rotation_deadband_rad: number;
}

export interface RejectMessage {
  type: "reject";
  reason: "malformed" | "stale";
  seq?: number;
  detail?: string;
}

export interface ErrorMessage {
  type: "error";
  reason: string;
}

export type ServerMessage = StateMessage | DescriptionMessage | RejectMessage | ErrorMessage;
export type ClientMessage = DeltaPoseMessage | ResetMessage | DescribeMessage;

function finiteTriple(v: Vec3): [number, number, number] {
  for (const x of v) {
    if (!Number.isFinite(x)) throw new Error("non-finite component in delta");
  }
  return [v[0], v[1], v[2]];
}

export function buildDeltaPose(
  seq: number,
  translation: Vec3,
  rotation: Vec3,
  clientTimeMs: number,
  gripper?: boolean,
): DeltaPoseMessage {
  if (!Number.isInteger(seq) || seq < 0) throw new Error("seq must be a non-negative integer");
  const msg: DeltaPoseMessage = {
    type: "delta_pose",
    seq,
    translation: finiteTriple(translation),
    rotation: finiteTriple(rotation),
    client_time_ms: Math.round(clientTimeMs),
  };
  if (gripper !== undefined) msg.gripper = gripper;
  return msg;
}

export function buildReset(): ResetMessage {
  return { type: "reset" };
}

export function buildDescribe(): DescribeMessage {
  return { type: "describe" };
}

export function posePosition(pose: PoseJson): Vec3 {
  return [pose.position[0], pose.position[1], pose.position[2]];
}

export function poseQuaternion(pose: PoseJson): Quat {
  return [pose.quaternion[0], pose.quaternion[1], pose.quaternion[2], pose.quaternion[3]];
}

/** Parse one server frame; returns null for frames we don't understand
 * (forward compatibility) and throws on malformed JSON. */
export function parseServerMessage(raw: string): ServerMessage | null {
  const obj = JSON.parse(raw);
  if (typeof obj !== "object" || obj === null) return null;
  switch (obj.type) {
    case "state": {
      if (
        typeof obj.tick !== "number" ||
        !Array.isArray(obj.joint_positions) ||
        typeof obj.executed_pose !== "object" ||
        typeof obj.fault !== "object"
      ) {
        return null;
      }
      return obj as StateMessage;
    }
    case "description":
      if (!Array.isArray(obj.dh) || typeof obj.command_hz !== "number") return null;
      return obj as DescriptionMessage;
    case "reject":
      return obj as RejectMessage;
    case "error":
      return obj as ErrorMessage;
    default:
      return null;
  }
}
