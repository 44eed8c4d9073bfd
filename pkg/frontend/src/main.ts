/** Browser wiring: connect the session to the canvas views and the DOM. */

import { ConsoleSession } from "./session.js";
import { keyToDelta, pointerToDelta, type InputMode } from "./input.js";
import { drawView, TrailBuffer, type Viewport } from "./render.js";
import type { Vec3 } from "./math3.js";

const DRAG_GAIN_M_PER_PX = 1e-3;
const DRAG_GAIN_RAD_PER_PX = 5e-3;
const NUDGE_M = 0.005;
const NUDGE_RAD = 0.02;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

export function startConsole(): void {
  const urlInput = el<HTMLInputElement>("gateway-url");
  const connectButton = el<HTMLButtonElement>("connect");
  const resetButton = el<HTMLButtonElement>("reset");
  const gripperBox = el<HTMLInputElement>("gripper");
  const statusLine = el<HTMLSpanElement>("status");
  const banner = el<HTMLDivElement>("fault-banner");
  const lagLine = el<HTMLSpanElement>("lag");
  const modeSelect = el<HTMLSelectElement>("mode");
  const topCanvas = el<HTMLCanvasElement>("view-top");
  const sideCanvas = el<HTMLCanvasElement>("view-side");

  const trail = new TrailBuffer();
  let session: ConsoleSession | null = null;

  function viewport(canvas: HTMLCanvasElement): Viewport {
    return {
      width: canvas.width,
      height: canvas.height,
      scale: 320,
      centerX: 0.45,
      centerY: canvas === topCanvas ? 0.0 : 0.25,
    };
  }

  function redraw(): void {
    if (session === null) return;
    const dh = session.description?.dh ?? null;
    const state = session.lastState;
    const cursor: Vec3 | null = session.lastState ? session.cursor.position : null;
    for (const canvas of [topCanvas, sideCanvas]) {
      const ctx = canvas.getContext("2d");
      if (ctx === null) continue;
      drawView(
        ctx,
        canvas === topCanvas ? "top" : "side",
        viewport(canvas),
        dh,
        state,
        trail,
        cursor,
      );
    }
    requestAnimationFrame(redraw);
  }

  connectButton.addEventListener("click", () => {
    session?.close();
    trail.clear();
    session = new ConsoleSession({
      url: urlInput.value,
      onStatus: (status) => {
        statusLine.textContent = status;
        banner.classList.toggle("busy", status === "busy");
        if (status === "busy") banner.textContent = "session busy";
      },
      onState: (state) => {
        trail.push(state);
        if (session?.lastState) {
          const cmd = state.commanded_pose.position;
          const exe = state.executed_pose.position;
          const lag = Math.hypot(cmd[0] - exe[0], cmd[1] - exe[1], cmd[2] - exe[2]);
          lagLine.textContent = `${(lag * 1000).toFixed(1)} mm`;
        }
      },
      onFaultBanner: (active, reason) => {
        banner.classList.toggle("tripped", active);
        banner.textContent = active ? `FAULT: ${reason} — reset to continue` : "";
      },
    });
    session.connect();
    requestAnimationFrame(redraw);
  });

  resetButton.addEventListener("click", () => session?.requestReset());
  gripperBox.addEventListener("change", () => session?.setGripper(gripperBox.checked));

  let dragging = false;
  let lastX = 0;
  let lastY = 0;
  for (const canvas of [topCanvas, sideCanvas]) {
    canvas.addEventListener("pointerdown", (event) => {
      dragging = true;
      lastX = event.clientX;
      lastY = event.clientY;
      canvas.setPointerCapture(event.pointerId);
    });
    canvas.addEventListener("pointermove", (event) => {
      if (!dragging || session === null) return;
      const mode = modeSelect.value as InputMode;
      const gain = mode === "rotate" ? DRAG_GAIN_RAD_PER_PX : DRAG_GAIN_M_PER_PX;
      session.applyInput(pointerToDelta(event.clientX - lastX, event.clientY - lastY, mode, gain));
      lastX = event.clientX;
      lastY = event.clientY;
    });
    canvas.addEventListener("pointerup", () => {
      dragging = false;
    });
  }

  window.addEventListener("keydown", (event) => {
    if (session === null) return;
    const delta = keyToDelta(event.key, NUDGE_M, NUDGE_RAD);
    if (delta !== null) {
      session.applyInput(delta);
      session.pump(); // keyboard nudges send one command each (rate-capped)
      event.preventDefault();
    }
  });
}

startConsole();
