"""FoodCollector: four agents under one behavior compete for food.

10x10 arena, 8 good foods (+1) and 4 bad foods (-1); eaten food respawns
at a random spot.  Episodes run a fixed 500 decisions (2500 ticks) and end
interrupted for every agent simultaneously.
"""

from __future__ import annotations

import math

import numpy as np

from ..kernel import Academy, BehaviorSpec, Discrete, Environment
from ..sensors import ObservationSpec, RaycastConfig, raycast_sense
from ..worldsim import AABB, Circle, World

ARENA = 10.0
SPEED = 3.0
AGENT_R = 0.4
FOOD_R = 0.3
N_GOOD = 8
N_BAD = 4
GOOD_REWARD = 1.0
BAD_REWARD = -1.0

RAYCAST = RaycastConfig(
    angles=tuple(i * np.pi / 6 for i in range(12)),
    max_length=12.0,
    detectable_tags=("food_good", "food_bad", "agent", "wall"),
)
MOVES = {0: (0.0, 0.0), 1: (0.0, 1.0), 2: (0.0, -1.0),
         3: (-1.0, 0.0), 4: (1.0, 0.0)}


class FoodCollectorEnv(Environment):
    name = "FoodCollector"

    def setup(self, academy: Academy) -> None:
        self.academy = academy
        spec = BehaviorSpec(
            "FoodCollector",
            (ObservationSpec("raycast", (RAYCAST.output_size,)),),
            Discrete((5,)),
        )
        self.handles = [academy.register_agent(spec, decision_interval=5,
                                               max_step=2500)
                        for _ in range(4)]
        self._build()

    def _build(self) -> None:
        rng = self.academy.episode_stream("foodcollector")
        self.world = World()
        for pos, half in (((ARENA / 2, -0.5), AABB(ARENA / 2 + 1, 0.5)),
                          ((ARENA / 2, ARENA + 0.5), AABB(ARENA / 2 + 1, 0.5)),
                          ((-0.5, ARENA / 2), AABB(0.5, ARENA / 2 + 1)),
                          ((ARENA + 0.5, ARENA / 2), AABB(0.5, ARENA / 2 + 1))):
            self.world.add_body("wall", half, pos, kinematic=True)
        self._respawn_rng = rng
        self.bodies = {}
        self.velocities = {}
        for handle in self.handles:
            body = self.world.add_body(
                "agent", Circle(AGENT_R),
                (float(rng.uniform(1, ARENA - 1)), float(rng.uniform(1, ARENA - 1))))
            self.bodies[handle.agent_id] = body
            self.velocities[handle.agent_id] = (0.0, 0.0)
        self.foods = []
        for tag in ["food_good"] * N_GOOD + ["food_bad"] * N_BAD:
            self.foods.append(self.world.add_body(
                tag, Circle(FOOD_R),
                (float(rng.uniform(0.5, ARENA - 0.5)),
                 float(rng.uniform(0.5, ARENA - 0.5))), kinematic=True))

    def reset_world(self) -> None:
        self._build()

    def respawn(self, handle) -> None:
        # all four agents terminate on the same tick; rebuild once
        if handle.agent_id == min(h.agent_id for h in self.handles):
            self._build()

    def observe(self, handle) -> list[np.ndarray]:
        body = self.bodies[handle.agent_id]
        return [raycast_sense(self.world, body.position, 0.0, RAYCAST,
                              ignore_ids={body.id})]

    def apply_action(self, handle, action) -> None:
        dx, dy = MOVES[int(action[0])]
        self.velocities[handle.agent_id] = (dx * SPEED, dy * SPEED)

    def tick(self, dt: float) -> None:
        for handle in self.handles:
            body = self.bodies[handle.agent_id]
            vx, vy = self.velocities[handle.agent_id]
            x = min(max(body.position[0] + vx * dt, AGENT_R), ARENA - AGENT_R)
            y = min(max(body.position[1] + vy * dt, AGENT_R), ARENA - AGENT_R)
            body.position = (x, y)
            for food in self.foods:
                fx, fy = food.position
                if math.hypot(fx - x, fy - y) <= AGENT_R + FOOD_R:
                    handle.add_reward(GOOD_REWARD if food.tag == "food_good"
                                      else BAD_REWARD)
                    food.position = (
                        float(self._respawn_rng.uniform(0.5, ARENA - 0.5)),
                        float(self._respawn_rng.uniform(0.5, ARENA - 0.5)))
