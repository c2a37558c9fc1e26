import { keyboardToAction } from "./input.js";
import type { ActionMessage, ActionSpec, Snapshot } from "./types.js";

export interface SocketLike {
  send(data: string): void;
}

/**
 * Event-driven play state machine with strict backpressure: exactly one
 * action message is sent per received snapshot, never more.  Keyboard and
 * recording state are sampled at snapshot time.
 */
export class PlaySession {
  readonly pressed = new Set<string>();
  recording = false;
  lastSnapshot: Snapshot | null = null;
  sent = 0;
  received = 0;

  constructor(
    private readonly spec: ActionSpec,
    private readonly socket: SocketLike,
    private readonly onSnapshot: (snapshot: Snapshot) => void = () => {},
  ) {}

  keyDown(key: string): void {
    if (key === "r" || key === "R") {
      this.recording = !this.recording;
      return;
    }
    this.pressed.add(key);
  }

  keyUp(key: string): void {
    this.pressed.delete(key);
  }

  /** Feed one server text frame into the machine. */
  handleMessage(data: string): void {
    let snapshot: Snapshot;
    try {
      snapshot = JSON.parse(data) as Snapshot;
    } catch {
      return; // not a snapshot; ignore
    }
    this.received += 1;
    this.lastSnapshot = snapshot;
    this.onSnapshot(snapshot);
    // one send per snapshot: the only send path is this handler, so the
    // sent counter can never lead the received counter
    const message: ActionMessage = {
      action: keyboardToAction(this.pressed, this.spec),
      record: this.recording,
    };
    this.socket.send(JSON.stringify(message));
    this.sent += 1;
  }
}
