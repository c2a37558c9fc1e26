/** Wire-level JSON documents exchanged with the play endpoint. */

export interface Entity {
  id: number;
  tag: string;
  position: [number, number];
  extents: [number, number];
  shape: "aabb" | "circle";
}

export interface Snapshot {
  env: string;
  tick: number;
  entities: Entity[];
  hud: { cumulative_reward: number; episode_step: number };
  recording: boolean;
}

export type ActionSpec =
  | { kind: "discrete"; branches: number[] }
  | { kind: "continuous"; dim: number };

export interface ActionMessage {
  action: number[];
  record: boolean;
}
