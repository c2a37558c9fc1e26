"""GridWorld: reach the goal cell, avoid obstacle cells.

N x N grid (env_param grid_size, default 5) with one goal and
num_obstacles obstacles placed on distinct random cells each episode.
Actions: 0 up, 1 down, 2 left, 3 right.  Rewards: +1 goal (terminal),
-1 obstacle (terminal), -0.01 per decision.  Top-down visual observation.
"""

from __future__ import annotations

import numpy as np

from ..kernel import Academy, BehaviorSpec, Discrete, Environment
from ..sensors import ObservationSpec, grid_render
from ..worldsim import AABB, World
from . import clamp_param

RESOLUTION = (36, 36)
PALETTE = {
    "agent": (0.2, 0.4, 1.0),
    "goal": (0.2, 1.0, 0.2),
    "obstacle": (1.0, 0.2, 0.2),
}
STEP_PENALTY = -0.01
GOAL_REWARD = 1.0
OBSTACLE_REWARD = -1.0
MOVES = {0: (0, 1), 1: (0, -1), 2: (-1, 0), 3: (1, 0)}


class GridWorldEnv(Environment):
    name = "GridWorld"

    def setup(self, academy: Academy) -> None:
        self.academy = academy
        spec = BehaviorSpec(
            "GridWorld",
            (ObservationSpec("visual", (*RESOLUTION, 3)),),
            Discrete((4,)),
        )
        self.handle = academy.register_agent(spec, decision_interval=1,
                                             max_step=100)
        self._layout()

    def _layout(self) -> None:
        self.size = int(clamp_param(
            "grid_size", self.academy.get_parameter("grid_size", 5.0), 3, 16))
        n_cells = self.size * self.size
        max_obs = n_cells - 2
        self.n_obstacles = int(clamp_param(
            "num_obstacles",
            self.academy.get_parameter("num_obstacles", 1.0), 0, max_obs))
        rng = self.academy.episode_stream("gridworld/layout")
        cells = rng.permutation(n_cells)[: 2 + self.n_obstacles]
        to_xy = lambda c: (int(c) % self.size, int(c) // self.size)
        self.agent_cell = to_xy(cells[0])
        self.goal_cell = to_xy(cells[1])
        self.obstacle_cells = {to_xy(c) for c in cells[2:]}
        self._move = None

    def reset_world(self) -> None:
        self._layout()

    def respawn(self, handle) -> None:
        self._layout()

    def observe(self, handle) -> list[np.ndarray]:
        world = World()
        half = AABB(0.5, 0.5)
        for cell in sorted(self.obstacle_cells):
            world.add_body("obstacle", half,
                           (cell[0] + 0.5, cell[1] + 0.5), kinematic=True)
        world.add_body("goal", half,
                       (self.goal_cell[0] + 0.5, self.goal_cell[1] + 0.5),
                       kinematic=True)
        world.add_body("agent", half,
                       (self.agent_cell[0] + 0.5, self.agent_cell[1] + 0.5),
                       kinematic=True, z_order=1)
        img = grid_render(world, RESOLUTION,
                          (0.0, 0.0, float(self.size), float(self.size)),
                          PALETTE)
        return [img]

    def apply_action(self, handle, action) -> None:
        handle.add_reward(STEP_PENALTY)
        self._move = MOVES[int(action[0])]

    def tick(self, dt: float) -> None:
        if self._move is None:
            return
        dx, dy = self._move
        self._move = None
        x = min(max(self.agent_cell[0] + dx, 0), self.size - 1)
        y = min(max(self.agent_cell[1] + dy, 0), self.size - 1)
        self.agent_cell = (x, y)
        if self.agent_cell == self.goal_cell:
            self.handle.add_reward(GOAL_REWARD)
            self.academy.end_episode(self.handle)
        elif self.agent_cell in self.obstacle_cells:
            self.handle.add_reward(OBSTACLE_REWARD)
            self.academy.end_episode(self.handle)
