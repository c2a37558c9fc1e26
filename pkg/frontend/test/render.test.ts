import { describe, expect, it } from "vitest";

import {
  BACKGROUND_COLOR,
  FALLBACK_COLOR,
  renderSnapshot,
  worldTransform,
  type Canvas2D,
} from "../src/render.js";
import type { Snapshot } from "../src/types.js";

function snapshot(entities: Snapshot["entities"]): Snapshot {
  return {
    env: "Test",
    tick: 0,
    entities,
    hud: { cumulative_reward: 0, episode_step: 0 },
    recording: false,
  };
}

interface Op {
  op: string;
  style: string;
  args: number[];
}

function recordingContext(): { ctx: Canvas2D; ops: Op[] } {
  const ops: Op[] = [];
  const ctx: Canvas2D = {
    fillStyle: "",
    fillRect(...args) { ops.push({ op: "rect", style: this.fillStyle, args }); },
    beginPath() {},
    arc(...args) { ops.push({ op: "arc", style: this.fillStyle, args }); },
    fill() {},
    fillText() {},
  };
  return { ctx, ops };
}

describe("renderSnapshot", () => {
  it("draws only the background for an empty snapshot", () => {
    const { ctx, ops } = recordingContext();
    renderSnapshot(snapshot([]), ctx, 100, 80);
    expect(ops).toHaveLength(1);
    expect(ops[0].style).toBe(BACKGROUND_COLOR);
    expect(ops[0].args).toEqual([0, 0, 100, 80]);
  });

  it("puts a centered entity at the canvas center within a pixel", () => {
    const { ctx, ops } = recordingContext();
    const e = { id: 0, tag: "ball", position: [3, -2] as [number, number],
                extents: [0.5, 0.5] as [number, number],
                shape: "circle" as const };
    renderSnapshot(snapshot([e]), ctx, 200, 100, () => {});
    const arc = ops.find((o) => o.op === "arc")!;
    expect(Math.abs(arc.args[0] - 100)).toBeLessThanOrEqual(1);
    expect(Math.abs(arc.args[1] - 50)).toBeLessThanOrEqual(1);
  });

  it("falls back to magenta with a warning for unknown tags", () => {
    const { ctx, ops } = recordingContext();
    const warnings: string[] = [];
    const e = { id: 0, tag: "???", position: [0, 0] as [number, number],
                extents: [1, 1] as [number, number],
                shape: "aabb" as const };
    renderSnapshot(snapshot([e]), ctx, 100, 100, (m) => warnings.push(m));
    const rects = ops.filter((o) => o.op === "rect");
    expect(rects[rects.length - 1].style).toBe(FALLBACK_COLOR);
    expect(warnings).toHaveLength(1);
    expect(warnings[0]).toContain("???");
  });

  it("uses a uniform scale on both axes", () => {
    const wide = snapshot([
      { id: 0, tag: "wall", position: [-4, 0], extents: [1, 1],
        shape: "aabb" },
      { id: 1, tag: "wall", position: [4, 0], extents: [1, 1],
        shape: "aabb" },
    ]);
    const t = worldTransform(wide, 100, 100);
    const dx = t.toX(1) - t.toX(0);
    const dy = t.toY(0) - t.toY(1);
    expect(dx).toBeCloseTo(dy, 10);
    expect(dx).toBeCloseTo(t.scale, 10);
  });
});
