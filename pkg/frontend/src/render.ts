import type { Snapshot } from "./types.js";

export const PALETTE: Record<string, string> = {
  agent: "#4cc2ff",
  goal: "#46d160",
  goal_large: "#46d160",
  goal_small: "#a6e22e",
  obstacle: "#e5484d",
  wall: "#555b66",
  block: "#d8a657",
  goal_strip: "#46d160",
  target_west: "#a277ff",
  target_east: "#ff9e64",
  cue_a: "#a277ff",
  cue_b: "#ff9e64",
  food_good: "#f4d03f",
  food_bad: "#5d6d7e",
  paddle: "#d8dce2",
  ball: "#f4d03f",
  striker: "#4cc2ff",
  goalie: "#e5484d",
  cell: "#30343c",
};

export const FALLBACK_COLOR = "#ff00ff";
export const BACKGROUND_COLOR = "#1d2026";

/** Minimal slice of CanvasRenderingContext2D used by the renderer, so
 * tests can substitute a recording double. */
export interface Canvas2D {
  fillStyle: string;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
}

export interface Transform {
  scale: number;
  toX(wx: number): number;
  toY(wy: number): number;
}

/** Uniform world→canvas transform fitting the entity bounding box (plus
 * padding) with the box center on the canvas center; y points up in the
 * world and down on the canvas. */
export function worldTransform(
  snapshot: Snapshot,
  width: number,
  height: number,
  pad = 0.5,
): Transform {
  let xmin = Infinity, xmax = -Infinity, ymin = Infinity, ymax = -Infinity;
  for (const e of snapshot.entities) {
    xmin = Math.min(xmin, e.position[0] - e.extents[0]);
    xmax = Math.max(xmax, e.position[0] + e.extents[0]);
    ymin = Math.min(ymin, e.position[1] - e.extents[1]);
    ymax = Math.max(ymax, e.position[1] + e.extents[1]);
  }
  if (!isFinite(xmin)) {
    xmin = -1; xmax = 1; ymin = -1; ymax = 1;
  }
  xmin -= pad; xmax += pad; ymin -= pad; ymax += pad;
  const scale = Math.min(width / (xmax - xmin), height / (ymax - ymin));
  const cx = (xmin + xmax) / 2;
  const cy = (ymin + ymax) / 2;
  return {
    scale,
    toX: (wx) => width / 2 + (wx - cx) * scale,
    toY: (wy) => height / 2 - (wy - cy) * scale,
  };
}

export function renderSnapshot(
  snapshot: Snapshot,
  ctx: Canvas2D,
  width: number,
  height: number,
  warn: (msg: string) => void = (msg) => console.warn(msg),
): void {
  ctx.fillStyle = BACKGROUND_COLOR;
  ctx.fillRect(0, 0, width, height);
  const t = worldTransform(snapshot, width, height);
  for (const e of snapshot.entities) {
    let color = PALETTE[e.tag];
    if (color === undefined) {
      color = FALLBACK_COLOR;
      warn(`unknown entity tag ${JSON.stringify(e.tag)}`);
    }
    ctx.fillStyle = color;
    const [ex, ey] = e.extents;
    if (e.shape === "circle") {
      ctx.beginPath();
      ctx.arc(t.toX(e.position[0]), t.toY(e.position[1]), ex * t.scale,
              0, 2 * Math.PI);
      ctx.fill();
    } else {
      ctx.fillRect(t.toX(e.position[0] - ex), t.toY(e.position[1] + ey),
                   2 * ex * t.scale, 2 * ey * t.scale);
    }
  }
  ctx.fillStyle = "#d8dce2";
  const rec = snapshot.recording ? " REC" : "";
  ctx.fillText(
    `${snapshot.env} tick ${snapshot.tick} ` +
    `step ${snapshot.hud.episode_step} ` +
    `reward ${snapshot.hud.cumulative_reward.toFixed(3)}${rec}`,
    8, 16);
}
