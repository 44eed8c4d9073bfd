/** Console session: socket lifecycle, command pacing, fault lockout.
 *
 * The console keeps a virtual target cursor (the operator's copy of the end
 * effector). Pointer/keyboard input moves the cursor; at most once per
 * command period the session sends the remaining error between the cursor
 * and the latest executed pose from telemetry as a delta_pose command, so
 * the gateway's filter always sees error-to-target deltas.
 *
 * Faults lock input: between a tripped state frame and the ok frame that
 * acknowledges a reset, no delta_pose leaves the session. On unlock (and on
 * first telemetry) the cursor re-anchors to the executed pose so no stale
 * error fires.
 *
 * Reconnects use exponential backoff and keep the seq counter, which must
 * stay strictly monotonic for the gateway session's lifetime.
 */

import {
  poseDiff,
  quatMultiply,
  rotvecToQuat,
  vecAdd,
  vecNorm,
  type Quat,
  type Vec3,
} from "./math3.js";
import type { CursorDelta } from "./input.js";
import {
  buildDeltaPose,
  buildDescribe,
  buildReset,
  parseServerMessage,
  posePosition,
  poseQuaternion,
  SUBPROTOCOL,
  type ClientMessage,
  type DescriptionMessage,
  type StateMessage,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: ((event: unknown) => void) | null;
}

export type SocketFactory = (url: string, protocols: string[]) => SocketLike;

export type ConsoleStatus = "idle" | "connecting" | "live" | "busy" | "reconnecting" | "closed";

export interface ConsoleEvents {
  onStatus?: (status: ConsoleStatus) => void;
  onState?: (state: StateMessage) => void;
  onDescription?: (description: DescriptionMessage) => void;
  onFaultBanner?: (active: boolean, reason: string | null) => void;
  onSend?: (message: ClientMessage) => void;
  onReject?: (reason: string) => void;
}

export interface ConsoleOptions extends ConsoleEvents {
  url: string;
  makeSocket?: SocketFactory;
  now?: () => number;
  reconnectBaseMs?: number;
  reconnectMaxMs?: number;
  reconnect?: boolean;
}

const defaultFactory: SocketFactory = (url, protocols) =>
  new WebSocket(url, protocols) as unknown as SocketLike;

export class ConsoleSession {
  status: ConsoleStatus = "idle";
  description: DescriptionMessage | null = null;
  lastState: StateMessage | null = null;
  faultActive = false;
  faultReason: string | null = null;
  inputLocked = false;

  private readonly options: ConsoleOptions;
  private readonly now: () => number;
  private socket: SocketLike | null = null;
  private seq = 0;
  private lastSendMs = -Infinity;
  private sendTimer: ReturnType<typeof setInterval> | null = null;
  private reconnectDelayMs: number;
  private closedByUser = false;
  private awaitingResetAck = false;

  private cursorPos: Vec3 = [0, 0, 0];
  private cursorQuat: Quat = [1, 0, 0, 0];
  private cursorLive = false;
  private cursorDirty = false;
  private gripper = false;
  private gripperDirty = false;

  constructor(options: ConsoleOptions) {
    this.options = options;
    this.now = options.now ?? (() => Date.now());
    this.reconnectDelayMs = options.reconnectBaseMs ?? 250;
  }

  /** Command period in ms (from the gateway's description, 20 Hz until known). */
  get commandPeriodMs(): number {
    const hz = this.description?.command_hz ?? 20;
    return 1000 / hz;
  }

  get nextSeq(): number {
    return this.seq;
  }

  connect(): void {
    this.closedByUser = false;
    this.openSocket();
  }

  close(): void {
    this.closedByUser = true;
    this.stopSendLoop();
    this.socket?.close();
    this.setStatus("closed");
  }

  private openSocket(): void {
    const factory = this.options.makeSocket ?? defaultFactory;
    this.setStatus(this.status === "idle" || this.status === "closed" ? "connecting" : "reconnecting");
    const socket = factory(this.options.url, [SUBPROTOCOL]);
    this.socket = socket;
    socket.onopen = () => {
      this.reconnectDelayMs = this.options.reconnectBaseMs ?? 250;
      this.sendRaw(buildDescribe());
      this.startSendLoop();
    };
    socket.onmessage = (event) => {
      this.handleFrame(String(event.data));
    };
    socket.onerror = () => {
      /* onclose follows; backoff handles it */
    };
    socket.onclose = () => {
      this.stopSendLoop();
      if (this.closedByUser) return;
      this.setStatus("reconnecting");
      const delay = this.reconnectDelayMs;
      this.reconnectDelayMs = Math.min(
        this.reconnectDelayMs * 2,
        this.options.reconnectMaxMs ?? 4000,
      );
      if (this.options.reconnect === false) {
        this.setStatus("closed");
        return;
      }
      setTimeout(() => {
        if (!this.closedByUser) this.openSocket();
      }, delay);
    };
  }

  private handleFrame(raw: string): void {
    let message;
    try {
      message = parseServerMessage(raw);
    } catch {
      return; // unparseable frame; ignore
    }
    if (message === null) return;
    switch (message.type) {
      case "state":
        this.handleState(message);
        break;
      case "description":
        this.description = message;
        this.startSendLoop(); // period may have changed
        this.options.onDescription?.(message);
        break;
      case "error":
        if (message.reason === "session busy") this.setStatus("busy");
        break;
      case "reject":
        this.options.onReject?.(message.reason);
        break;
    }
  }

  private handleState(state: StateMessage): void {
    this.lastState = state;
    if (this.status !== "busy") this.setStatus("live");
    if (!this.cursorLive) {
      this.anchorCursor(state);
    }
    const tripped = state.fault.status === "tripped";
    if (tripped && !this.faultActive) {
      this.faultActive = true;
      this.faultReason = state.fault.reason ?? "fault";
      this.inputLocked = true;
      this.options.onFaultBanner?.(true, this.faultReason);
    } else if (!tripped && this.faultActive && this.awaitingResetAck) {
      // reset acknowledged: clear the banner, unlock, re-anchor
      this.faultActive = false;
      this.faultReason = null;
      this.inputLocked = false;
      this.awaitingResetAck = false;
      this.anchorCursor(state);
      this.options.onFaultBanner?.(false, null);
    }
    this.options.onState?.(state);
  }

  private anchorCursor(state: StateMessage): void {
    this.cursorPos = posePosition(state.executed_pose);
    this.cursorQuat = poseQuaternion(state.executed_pose);
    this.cursorLive = true;
    this.cursorDirty = false;
  }

  /** Apply an input increment to the target cursor (no-op while locked). */
  applyInput(delta: CursorDelta): void {
    if (this.inputLocked || !this.cursorLive) return;
    this.cursorPos = vecAdd(this.cursorPos, delta.translation);
    this.cursorQuat = quatMultiply(this.cursorQuat, rotvecToQuat(delta.rotation));
    this.cursorDirty = true;
  }

  setGripper(closed: boolean): void {
    if (this.inputLocked) return;
    if (closed !== this.gripper) {
      this.gripper = closed;
      this.gripperDirty = true;
      this.cursorDirty = true;
    }
  }

  requestReset(): void {
    this.awaitingResetAck = true;
    this.sendRaw(buildReset());
  }

  get cursor(): { position: Vec3; quaternion: Quat } {
    return { position: this.cursorPos, quaternion: this.cursorQuat };
  }

  private startSendLoop(): void {
    this.stopSendLoop();
    this.sendTimer = setInterval(() => this.pump(), this.commandPeriodMs);
  }

  private stopSendLoop(): void {
    if (this.sendTimer !== null) {
      clearInterval(this.sendTimer);
      this.sendTimer = null;
    }
  }

  /** One command-period heartbeat: stream the remaining error to target. */
  pump(): void {
    if (this.inputLocked || !this.cursorLive || this.lastState === null) return;
    const deadband = this.description ? this.description.position_deadband_m : 0.0025;
    const rotDeadband = this.description ? this.description.rotation_deadband_rad : 0.01;
    const { translation, rotation } = this.errorToTarget();
    const engaged =
      this.cursorDirty ||
      vecNorm(translation) > 0.25 * deadband ||
      vecNorm(rotation) > 0.25 * rotDeadband;
    if (!engaged) return;
    const nowMs = this.now();
    if (nowMs - this.lastSendMs < this.commandPeriodMs - 1e-6) return; // rate cap at f
    this.lastSendMs = nowMs;
    this.cursorDirty = false;
    const message = buildDeltaPose(
      this.seq,
      translation,
      rotation,
      nowMs,
      this.gripperDirty ? this.gripper : undefined,
    );
    this.gripperDirty = false;
    this.seq += 1;
    this.sendRaw(message);
  }

  private errorToTarget(): { translation: Vec3; rotation: Vec3 } {
    const state = this.lastState!;
    const exePos = posePosition(state.executed_pose);
    const exeQuat = poseQuaternion(state.executed_pose);
    return poseDiff(this.cursorPos, this.cursorQuat, exePos, exeQuat);
  }

  private sendRaw(message: ClientMessage): void {
    if (this.socket === null) return;
    try {
      this.socket.send(JSON.stringify(message));
      this.options.onSend?.(message);
    } catch {
      /* socket mid-close; reconnect path takes over */
    }
  }

  private setStatus(status: ConsoleStatus): void {
    if (status !== this.status) {
      this.status = status;
      this.options.onStatus?.(status);
    }
  }
}

