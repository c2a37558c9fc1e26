import type { ActionSpec } from "./types.js";

/**
 * Fold the currently pressed keys into one action row.
 *
 * Discrete specs use the first branch: no key -> 0 (no-op),
 * ArrowLeft -> 1, ArrowRight -> 2, and ArrowUp/ArrowDown -> 3/4 when the
 * branch is large enough.  Continuous specs map the horizontal arrows to
 * +/-1 on axis 0 and the vertical arrows to +/-1 on axis 1.
 */
export function keyboardToAction(
  pressed: ReadonlySet<string>,
  spec: ActionSpec,
): number[] {
  if (spec.kind === "continuous") {
    const row = new Array<number>(spec.dim).fill(0);
    if (spec.dim > 0) {
      if (pressed.has("ArrowLeft")) row[0] = -1;
      else if (pressed.has("ArrowRight")) row[0] = 1;
    }
    if (spec.dim > 1) {
      if (pressed.has("ArrowDown")) row[1] = -1;
      else if (pressed.has("ArrowUp")) row[1] = 1;
    }
    return row;
  }
  const row = new Array<number>(spec.branches.length).fill(0);
  if (row.length === 0) return row;
  const size = spec.branches[0];
  let choice = 0;
  if (pressed.has("ArrowLeft") && size > 1) choice = 1;
  else if (pressed.has("ArrowRight") && size > 2) choice = 2;
  else if (pressed.has("ArrowUp") && size > 3) choice = 3;
  else if (pressed.has("ArrowDown") && size > 4) choice = 4;
  row[0] = choice;
  return row;
}
