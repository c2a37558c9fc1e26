"""Hallway: read the colored cue in the central room, then walk the
corridor to the matching end target.

Corridor spans x in [-6, 6], y in [-1, 1].  A ceiling cue block over the
central room (x in [-3, 3]) carries tag cue_a or cue_b per episode; cue_a
means the west target pays +1, cue_b the east one.  Wrong target -0.1,
both terminal; -0.0003 per tick.  Raycast observation stacked 3 deep.
"""

from __future__ import annotations

import numpy as np

from ..kernel import Academy, BehaviorSpec, Discrete, Environment
from ..sensors import ObservationSpec, ObservationStacker, RaycastConfig, raycast_sense
from ..worldsim import AABB, Circle, World

X_LIMIT = 6.0
ROOM_HALF = 3.0
SPEED = 3.0
TICK_PENALTY = -0.0003
CORRECT_REWARD = 1.0
WRONG_REWARD = -0.1
TARGET_DEPTH = 0.8

RAYCAST = RaycastConfig(
    angles=(0.0, np.pi, np.pi / 2, np.pi / 4, 3 * np.pi / 4),
    max_length=12.0,
    detectable_tags=("cue_a", "cue_b", "target_west", "target_east", "wall"),
)


class HallwayEnv(Environment):
    name = "Hallway"

    def setup(self, academy: Academy) -> None:
        self.academy = academy
        spec = BehaviorSpec(
            "Hallway",
            (ObservationSpec("raycast", (RAYCAST.output_size,), stack=3),),
            Discrete((3,)),
        )
        self.handle = academy.register_agent(spec, decision_interval=5,
                                             max_step=1000)
        self.stacker = ObservationStacker(spec.obs_specs[0])
        self._build()

    def _build(self) -> None:
        rng = self.academy.episode_stream("hallway")
        self.cue_is_a = bool(rng.integers(2))
        self.agent_x = float(rng.uniform(-0.5, 0.5))
        self._vx = 0.0
        self.world = World()
        self.world.add_body("wall", AABB(0.2, 1.0), (-X_LIMIT - 0.2, 0.0),
                            kinematic=True)
        self.world.add_body("wall", AABB(0.2, 1.0), (X_LIMIT + 0.2, 0.0),
                            kinematic=True)
        cue_tag = "cue_a" if self.cue_is_a else "cue_b"
        self.world.add_body(cue_tag, AABB(ROOM_HALF, 0.15), (0.0, 1.0),
                            kinematic=True)
        self.world.add_body("target_west", AABB(TARGET_DEPTH, 1.0),
                            (-X_LIMIT + TARGET_DEPTH, 0.0), kinematic=True)
        self.world.add_body("target_east", AABB(TARGET_DEPTH, 1.0),
                            (X_LIMIT - TARGET_DEPTH, 0.0), kinematic=True)
        self.agent_body = self.world.add_body("agent", Circle(0.4),
                                              (self.agent_x, 0.0))
        self.stacker.reset()

    def reset_world(self) -> None:
        self._build()

    def respawn(self, handle) -> None:
        self._build()

    def observe(self, handle) -> list[np.ndarray]:
        sense = raycast_sense(self.world, (self.agent_x, 0.0), 0.0, RAYCAST,
                              ignore_ids={self.agent_body.id})
        return [self.stacker.push(sense)]

    def apply_action(self, handle, action) -> None:
        move = int(action[0])
        self._vx = {0: 0.0, 1: -SPEED, 2: SPEED}[move]

    def tick(self, dt: float) -> None:
        self.handle.add_reward(TICK_PENALTY)
        self.agent_x = float(np.clip(self.agent_x + self._vx * dt,
                                     -X_LIMIT + 0.4, X_LIMIT - 0.4))
        self.agent_body.position = (self.agent_x, 0.0)
        in_west = self.agent_x <= -X_LIMIT + 2 * TARGET_DEPTH
        in_east = self.agent_x >= X_LIMIT - 2 * TARGET_DEPTH
        if in_west or in_east:
            correct = (in_west and self.cue_is_a) or (in_east and not self.cue_is_a)
            self.handle.add_reward(CORRECT_REWARD if correct else WRONG_REWARD)
            self.academy.end_episode(self.handle)
