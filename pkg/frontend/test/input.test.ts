import { describe, expect, it } from "vitest";

import { keyboardToAction } from "../src/input.js";

const d3 = { kind: "discrete" as const, branches: [3] };
const d5 = { kind: "discrete" as const, branches: [5] };

describe("keyboardToAction discrete", () => {
  it("maps no key to the no-op", () => {
    expect(keyboardToAction(new Set(), d3)).toEqual([0]);
  });

  it("maps ArrowLeft to 1 and ArrowRight to 2", () => {
    expect(keyboardToAction(new Set(["ArrowLeft"]), d3)).toEqual([1]);
    expect(keyboardToAction(new Set(["ArrowRight"]), d3)).toEqual([2]);
  });

  it("maps vertical arrows only when the branch size permits", () => {
    expect(keyboardToAction(new Set(["ArrowUp"]), d3)).toEqual([0]);
    expect(keyboardToAction(new Set(["ArrowDown"]), d3)).toEqual([0]);
    expect(keyboardToAction(new Set(["ArrowUp"]), d5)).toEqual([3]);
    expect(keyboardToAction(new Set(["ArrowDown"]), d5)).toEqual([4]);
  });

  it("gives horizontal arrows precedence over vertical", () => {
    expect(keyboardToAction(new Set(["ArrowLeft", "ArrowUp"]), d5))
      .toEqual([1]);
  });

  it("zero-fills extra branches", () => {
    const spec = { kind: "discrete" as const, branches: [3, 2] };
    expect(keyboardToAction(new Set(["ArrowRight"]), spec)).toEqual([2, 0]);
  });
});

describe("keyboardToAction continuous", () => {
  const c2 = { kind: "continuous" as const, dim: 2 };

  it("maps arrows to +/-1 on axes 0 and 1", () => {
    expect(keyboardToAction(new Set(), c2)).toEqual([0, 0]);
    expect(keyboardToAction(new Set(["ArrowRight"]), c2)).toEqual([1, 0]);
    expect(keyboardToAction(new Set(["ArrowLeft"]), c2)).toEqual([-1, 0]);
    expect(keyboardToAction(new Set(["ArrowUp"]), c2)).toEqual([0, 1]);
    expect(keyboardToAction(new Set(["ArrowDown"]), c2)).toEqual([0, -1]);
    expect(keyboardToAction(new Set(["ArrowRight", "ArrowUp"]), c2))
      .toEqual([1, 1]);
  });

  it("truncates to the spec dimension", () => {
    const c1 = { kind: "continuous" as const, dim: 1 };
    expect(keyboardToAction(new Set(["ArrowUp"]), c1)).toEqual([0]);
  });
});
