/** Pointer and keyboard input mapping.
 *
 * Screen-space drags become cursor increments in the selected plane/axis:
 *   translate-xy: right = +x, up = +y (screen y points down, so negate)
 *   translate-z:  up = +z
 *   rotate:       horizontal drag yaws about the tool axis
 * Magnitude is gain * pixels (meters per pixel, or radians per pixel in
 * rotate mode).
 */

import type { Vec3 } from "./math3.js";

export type InputMode = "translate-xy" | "translate-z" | "rotate";

export interface CursorDelta {
  translation: Vec3;
  rotation: Vec3;
}

export const ZERO_DELTA: CursorDelta = {
  translation: [0, 0, 0],
  rotation: [0, 0, 0],
};

export function pointerToDelta(
  dragPxX: number,
  dragPxY: number,
  mode: InputMode,
  gain: number,
): CursorDelta {
  switch (mode) {
    case "translate-xy":
      // 0 - x avoids emitting -0 for a zero drag
      return { translation: [dragPxX * gain, 0 - dragPxY * gain, 0], rotation: [0, 0, 0] };
    case "translate-z":
      return { translation: [0, 0, 0 - dragPxY * gain], rotation: [0, 0, 0] };
    case "rotate":
      return { translation: [0, 0, 0], rotation: [0, 0, dragPxX * gain] };
  }
}

/** One keyboard nudge: a fixed-size step along a world axis (or yaw). */
export function keyToDelta(key: string, stepM: number, stepRad: number): CursorDelta | null {
  switch (key) {
    case "ArrowRight":
      return { translation: [stepM, 0, 0], rotation: [0, 0, 0] };
    case "ArrowLeft":
      return { translation: [-stepM, 0, 0], rotation: [0, 0, 0] };
    case "ArrowUp":
      return { translation: [0, stepM, 0], rotation: [0, 0, 0] };
    case "ArrowDown":
      return { translation: [0, -stepM, 0], rotation: [0, 0, 0] };
    case "PageUp":
      return { translation: [0, 0, stepM], rotation: [0, 0, 0] };
    case "PageDown":
      return { translation: [0, 0, -stepM], rotation: [0, 0, 0] };
    case "[":
      return { translation: [0, 0, 0], rotation: [0, 0, -stepRad] };
    case "]":
      return { translation: [0, 0, 0], rotation: [0, 0, stepRad] };
    default:
      return null;
  }
}
