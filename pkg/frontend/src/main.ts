import { renderSnapshot, type Canvas2D } from "./render.js";
import { PlaySession } from "./session.js";
import type { ActionSpec } from "./types.js";

/** Browser bootstrap: canvas + keyboard against ws://host/play.  The
 * first branch cardinality is unknown until play starts, so the keymap
 * assumes a five-way branch and lets the server clip. */
export function start(canvas: HTMLCanvasElement): void {
  const ctx = canvas.getContext("2d") as CanvasRenderingContext2D;
  const spec: ActionSpec = { kind: "discrete", branches: [5] };
  const ws = new WebSocket(`ws://${location.host}/play`);
  const session = new PlaySession(spec, ws, (snapshot) => {
    renderSnapshot(snapshot, ctx as unknown as Canvas2D,
                   canvas.width, canvas.height);
  });
  ws.onmessage = (event) => session.handleMessage(String(event.data));
  addEventListener("keydown", (e) => session.keyDown(e.key));
  addEventListener("keyup", (e) => session.keyUp(e.key));
}
