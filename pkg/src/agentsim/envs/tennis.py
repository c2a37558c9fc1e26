"""Tennis: symmetric two-paddle rally under one behavior.

Court x in [-6, 6], y in [0, 4].  Paddles sit at x = +-5.5 and move
vertically; the ball reflects off the top/bottom walls and off paddles
with a tangential velocity transfer.  A point ends the episode: the agent
that lets the ball past scores -1, the other +1.  Rallies are capped at
3000 ticks (a draw, both interrupted).

Observations are mirrored so each agent sees itself defending the right
side, which makes the behavior fully symmetric for self-play.
"""

from __future__ import annotations

import math

import numpy as np

from ..kernel import Academy, BehaviorSpec, Discrete, Environment
from ..sensors import ObservationSpec

COURT_X = 6.0
COURT_Y = 4.0
PADDLE_X = 5.5
PADDLE_HALF = 0.8
PADDLE_SPEED = 3.0
BALL_SPEED = 4.0
TANGENT_TRANSFER = 0.5
MAX_TICKS = 3000
WIN_REWARD = 1.0
LOSE_REWARD = -1.0


class TennisEnv(Environment):
    name = "Tennis"

    def setup(self, academy: Academy) -> None:
        self.academy = academy
        spec = BehaviorSpec(
            "Tennis",
            (ObservationSpec("vector", (6,)),),
            Discrete((3,)),
        )
        self.handles = [academy.register_agent(spec, decision_interval=5,
                                               max_step=MAX_TICKS)
                        for _ in range(2)]
        self._serve()

    def _serve(self) -> None:
        rng = self.academy.episode_stream("tennis")
        self.paddle_y = [COURT_Y / 2, COURT_Y / 2]  # index 0: left, 1: right
        self.paddle_v = [0.0, 0.0]
        angle = float(rng.uniform(-math.pi / 4, math.pi / 4))
        direction = 1.0 if rng.integers(2) else -1.0
        self.ball = (0.0, COURT_Y / 2)
        self.ball_v = (direction * BALL_SPEED * math.cos(angle),
                       BALL_SPEED * math.sin(angle))
        self.point_over = False

    def reset_world(self) -> None:
        self._serve()

    def respawn(self, handle) -> None:
        if handle.agent_id == min(h.agent_id for h in self.handles):
            self._serve()

    def _side(self, handle) -> int:
        return 0 if handle.agent_id == self.handles[0].agent_id else 1

    def observe(self, handle) -> list[np.ndarray]:
        side = self._side(handle)
        mirror = -1.0 if side == 0 else 1.0
        bx, by = self.ball
        vx, vy = self.ball_v
        return [np.array([
            self.paddle_y[side] / COURT_Y,
            mirror * bx / COURT_X,
            by / COURT_Y,
            mirror * vx / BALL_SPEED,
            vy / BALL_SPEED,
            self.paddle_y[1 - side] / COURT_Y,
        ], dtype=np.float32)]

    def apply_action(self, handle, action) -> None:
        move = int(action[0])
        self.paddle_v[self._side(handle)] = {0: 0.0, 1: PADDLE_SPEED,
                                             2: -PADDLE_SPEED}[move]

    def tick(self, dt: float) -> None:
        if self.point_over:
            return
        for i in (0, 1):
            self.paddle_y[i] = min(max(self.paddle_y[i] + self.paddle_v[i] * dt,
                                       PADDLE_HALF), COURT_Y - PADDLE_HALF)
        bx, by = self.ball
        vx, vy = self.ball_v
        bx += vx * dt
        by += vy * dt
        if by <= 0.0 and vy < 0.0:
            by, vy = -by, -vy
        elif by >= COURT_Y and vy > 0.0:
            by, vy = 2 * COURT_Y - by, -vy
        for side, px, sign in ((0, -PADDLE_X, -1.0), (1, PADDLE_X, 1.0)):
            moving_out = vx * sign > 0.0
            if moving_out and sign * bx >= PADDLE_X - 0.1:
                if abs(by - self.paddle_y[side]) <= PADDLE_HALF:
                    vx = -vx
                    vy += TANGENT_TRANSFER * self.paddle_v[side]
                    speed = math.hypot(vx, vy)
                    vx, vy = (vx / speed * BALL_SPEED, vy / speed * BALL_SPEED)
                    bx = px - sign * 0.11
        self.ball = (bx, by)
        self.ball_v = (vx, vy)
        if abs(bx) > COURT_X:
            loser = 0 if bx < 0 else 1
            self.handles[loser].add_reward(LOSE_REWARD)
            self.handles[1 - loser].add_reward(WIN_REWARD)
            self.point_over = True
            for h in self.handles:
                self.academy.end_episode(h)
