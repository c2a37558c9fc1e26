"""PushBlock: shove the block into the goal strip on the right edge.

Arena x in [0, 12], y in [0, 8]; goal strip x >= 11.  Agent contact moves
the block by the overlap (a rigid shove).  Rewards: +5 when the block
center enters the strip (terminal), -0.0025 per tick.
"""

from __future__ import annotations

import numpy as np

from ..kernel import Academy, BehaviorSpec, Discrete, Environment
from ..sensors import ObservationSpec, RaycastConfig, raycast_sense
from ..worldsim import AABB, Circle, World, resolve_against_static

ARENA_W = 12.0
ARENA_H = 8.0
GOAL_X = 11.0
SPEED = 3.0
TICK_PENALTY = -0.0025
GOAL_REWARD = 5.0
AGENT_R = 0.4
BLOCK_HALF = 0.6

RAYCAST = RaycastConfig(
    angles=tuple(i * np.pi / 6 for i in range(12)),
    max_length=14.0,
    detectable_tags=("block", "goal", "wall"),
)
MOVES = {0: (0.0, 0.0), 1: (0.0, 1.0), 2: (0.0, -1.0),
         3: (-1.0, 0.0), 4: (1.0, 0.0)}


class PushBlockEnv(Environment):
    name = "PushBlock"

    def setup(self, academy: Academy) -> None:
        self.academy = academy
        spec = BehaviorSpec(
            "PushBlock",
            (ObservationSpec("raycast", (RAYCAST.output_size,)),),
            Discrete((5,)),
        )
        self.handle = academy.register_agent(spec, decision_interval=5,
                                             max_step=500)
        self._build()

    def _build(self) -> None:
        rng = self.academy.episode_stream("pushblock")
        self.world = World()
        for pos, half in (((ARENA_W / 2, -0.5), AABB(ARENA_W / 2 + 1, 0.5)),
                          ((ARENA_W / 2, ARENA_H + 0.5), AABB(ARENA_W / 2 + 1, 0.5)),
                          ((-0.5, ARENA_H / 2), AABB(0.5, ARENA_H / 2 + 1)),
                          ((ARENA_W + 0.5, ARENA_H / 2), AABB(0.5, ARENA_H / 2 + 1))):
            self.world.add_body("wall", half, pos, kinematic=True)
        self.world.add_body("goal", AABB(0.5, ARENA_H / 2),
                            (ARENA_W - 0.5, ARENA_H / 2), kinematic=True,
                            z_order=-1)
        block_y = float(rng.uniform(2.0, ARENA_H - 2.0))
        self.block = self.world.add_body("block", AABB(BLOCK_HALF, BLOCK_HALF),
                                         (float(rng.uniform(4.0, 6.0)), block_y))
        agent_y = float(np.clip(block_y + rng.uniform(-1.0, 1.0),
                                1.0, ARENA_H - 1.0))
        self.agent = self.world.add_body("agent", Circle(AGENT_R),
                                         (float(rng.uniform(1.0, 3.0)), agent_y))
        self._v = (0.0, 0.0)

    def reset_world(self) -> None:
        self._build()

    def respawn(self, handle) -> None:
        self._build()

    def observe(self, handle) -> list[np.ndarray]:
        return [raycast_sense(self.world, self.agent.position, 0.0, RAYCAST,
                              ignore_ids={self.agent.id})]

    def apply_action(self, handle, action) -> None:
        dx, dy = MOVES[int(action[0])]
        self._v = (dx * SPEED, dy * SPEED)

    def tick(self, dt: float) -> None:
        self.handle.add_reward(TICK_PENALTY)
        ax, ay = self.agent.position
        self.agent.position = (ax + self._v[0] * dt, ay + self._v[1] * dt)
        self._shove_block()
        self._clamp_arena(self.agent, AGENT_R)
        self._clamp_arena(self.block, BLOCK_HALF)
        if self.block.position[0] >= GOAL_X:
            self.handle.add_reward(GOAL_REWARD)
            self.academy.end_episode(self.handle)

    def _shove_block(self) -> None:
        # treat the block as static for the MTV, then transfer the push
        before = self.agent.position
        contact = resolve_against_static(self.agent, self.block)
        if contact is not None:
            pushed = (before[0] - self.agent.position[0],
                      before[1] - self.agent.position[1])
            self.agent.position = before
            bx, by = self.block.position
            self.block.position = (bx + pushed[0], by + pushed[1])

    def _clamp_arena(self, body, margin: float) -> None:
        x, y = body.position
        body.position = (min(max(x, margin), ARENA_W - margin),
                         min(max(y, margin), ARENA_H - margin))
