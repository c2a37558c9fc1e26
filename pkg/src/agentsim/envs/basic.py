"""Basic: linear chain with a small near goal and a large far goal.

21 cells (0..20), start at 10.  Actions: 0 no-op, 1 left, 2 right.
Rewards: -0.01 per decision, +0.1 at cell 7 (terminal), +1.0 at cell 17
(terminal).  Optimal return going right: 1.0 - 7 * 0.01 = 0.93.
"""

from __future__ import annotations

import numpy as np

from ..kernel import Academy, BehaviorSpec, Discrete, Environment
from ..sensors import ObservationSpec

N_CELLS = 21
START = 10
SMALL_GOAL = 7
LARGE_GOAL = 17
STEP_PENALTY = -0.01
SMALL_REWARD = 0.1
LARGE_REWARD = 1.0


class BasicEnv(Environment):
    name = "Basic"

    def setup(self, academy: Academy) -> None:
        self.academy = academy
        spec = BehaviorSpec(
            "Basic",
            (ObservationSpec("vector", (1,)),),
            Discrete((3,)),
        )
        self.handle = academy.register_agent(spec, decision_interval=1,
                                             max_step=100)
        self.position = START
        self._move = 0

    def reset_world(self) -> None:
        self.position = START
        self._move = 0

    def respawn(self, handle) -> None:
        self.position = START
        self._move = 0

    def observe(self, handle) -> list[np.ndarray]:
        return [np.array([self.position / (N_CELLS - 1)], dtype=np.float32)]

    def apply_action(self, handle, action) -> None:
        handle.add_reward(STEP_PENALTY)
        self._move = int(action[0])

    def tick(self, dt: float) -> None:
        if self._move == 1:
            self.position = max(0, self.position - 1)
        elif self._move == 2:
            self.position = min(N_CELLS - 1, self.position + 1)
        self._move = 0  # decisions are per-tick; no action hold effect
        if self.position == SMALL_GOAL:
            self.handle.add_reward(SMALL_REWARD)
            self.academy.end_episode(self.handle)
        elif self.position == LARGE_GOAL:
            self.handle.add_reward(LARGE_REWARD)
            self.academy.end_episode(self.handle)
