import { describe, expect, it } from "vitest";

import { PlaySession } from "../src/session.js";
import type { Snapshot } from "../src/types.js";

const spec = { kind: "discrete" as const, branches: [3] };

function snap(step: number): string {
  const doc: Snapshot = {
    env: "Basic",
    tick: step * 5,
    entities: [],
    hud: { cumulative_reward: -0.01 * step, episode_step: step },
    recording: false,
  };
  return JSON.stringify(doc);
}

function harness() {
  const sent: string[] = [];
  const session = new PlaySession(spec, { send: (d) => sent.push(d) });
  return { sent, session };
}

describe("PlaySession", () => {
  it("sends exactly one action per snapshot", () => {
    const { sent, session } = harness();
    for (let i = 0; i < 5; i++) session.handleMessage(snap(i));
    expect(sent).toHaveLength(5);
    expect(session.sent).toBe(session.received);
  });

  it("reflects held keys in the action", () => {
    const { sent, session } = harness();
    session.keyDown("ArrowRight");
    session.handleMessage(snap(0));
    session.keyUp("ArrowRight");
    session.handleMessage(snap(1));
    expect(JSON.parse(sent[0]).action).toEqual([2]);
    expect(JSON.parse(sent[1]).action).toEqual([0]);
  });

  it("toggles recording with the r key", () => {
    const { sent, session } = harness();
    session.keyDown("r");
    session.handleMessage(snap(0));
    session.keyDown("R");
    session.handleMessage(snap(1));
    expect(JSON.parse(sent[0]).record).toBe(true);
    expect(JSON.parse(sent[1]).record).toBe(false);
  });

  it("ignores non-JSON frames without sending", () => {
    const { sent, session } = harness();
    session.handleMessage("not json");
    expect(sent).toHaveLength(0);
    expect(session.received).toBe(0);
  });

  it("exposes the latest snapshot to the observer", () => {
    const seen: number[] = [];
    const session = new PlaySession(spec, { send: () => {} },
                                    (s) => seen.push(s.hud.episode_step));
    session.handleMessage(snap(0));
    session.handleMessage(snap(1));
    expect(seen).toEqual([0, 1]);
    expect(session.lastSnapshot?.hud.episode_step).toBe(1);
  });
});
