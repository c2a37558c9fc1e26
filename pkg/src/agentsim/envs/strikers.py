"""StrikersVsGoalie: asymmetric self-play with two behaviors.

Field x in [0, 12], y in [0, 8]; the goal mouth is the right-edge strip
x >= 11.4, y in [2.5, 5.5].  Two Strikers kick the ball by contact; the
Goalie blocks.  Goal scored: each striker +1, goalie -1, episode over.
Tick rewards: striker -0.001, goalie +0.001.  1000-tick limit.
"""

from __future__ import annotations

import math

import numpy as np

from ..kernel import Academy, BehaviorSpec, Discrete, Environment
from ..sensors import ObservationSpec

FIELD_W = 12.0
FIELD_H = 8.0
GOAL_X = 11.4
GOAL_Y_LO = 2.5
GOAL_Y_HI = 5.5
AGENT_R = 0.4
BALL_R = 0.3
AGENT_SPEED = 3.0
KICK_SPEED = 5.0
BALL_FRICTION = 0.98
MAX_TICKS = 1000
STRIKER_TICK = -0.001
GOALIE_TICK = 0.001

MOVES = {0: (0.0, 0.0), 1: (0.0, 1.0), 2: (0.0, -1.0),
         3: (-1.0, 0.0), 4: (1.0, 0.0)}


class StrikersVsGoalieEnv(Environment):
    name = "StrikersVsGoalie"

    def setup(self, academy: Academy) -> None:
        self.academy = academy
        striker_spec = BehaviorSpec(
            "Striker", (ObservationSpec("vector", (10,)),), Discrete((5,)))
        goalie_spec = BehaviorSpec(
            "Goalie", (ObservationSpec("vector", (10,)),), Discrete((5,)))
        self.strikers = [academy.register_agent(striker_spec, 5, MAX_TICKS)
                         for _ in range(2)]
        self.goalie = academy.register_agent(goalie_spec, 5, MAX_TICKS)
        self._build()

    def _build(self) -> None:
        rng = self.academy.episode_stream("strikers")
        self.pos = {}
        self.vel = {}
        for i, h in enumerate(self.strikers):
            self.pos[h.agent_id] = (float(rng.uniform(1.5, 4.0)),
                                    2.5 + 3.0 * i)
            self.vel[h.agent_id] = (0.0, 0.0)
        self.pos[self.goalie.agent_id] = (GOAL_X - 0.6, FIELD_H / 2)
        self.vel[self.goalie.agent_id] = (0.0, 0.0)
        self.ball = (6.0, float(rng.uniform(3.0, 5.0)))
        self.ball_v = (0.0, 0.0)
        self.scored = False

    def reset_world(self) -> None:
        self._build()

    def respawn(self, handle) -> None:
        if handle.agent_id == min(self.pos):
            self._build()

    def observe(self, handle) -> list[np.ndarray]:
        others = [h for h in (*self.strikers, self.goalie)
                  if h.agent_id != handle.agent_id]
        sx, sy = self.pos[handle.agent_id]
        parts = [sx / FIELD_W, sy / FIELD_H,
                 self.ball[0] / FIELD_W, self.ball[1] / FIELD_H,
                 self.ball_v[0] / KICK_SPEED, self.ball_v[1] / KICK_SPEED]
        for o in others:
            ox, oy = self.pos[o.agent_id]
            parts += [ox / FIELD_W, oy / FIELD_H]
        return [np.array(parts, dtype=np.float32)]

    def apply_action(self, handle, action) -> None:
        dx, dy = MOVES[int(action[0])]
        self.vel[handle.agent_id] = (dx * AGENT_SPEED, dy * AGENT_SPEED)

    def tick(self, dt: float) -> None:
        if self.scored:
            return
        for h in self.strikers:
            h.add_reward(STRIKER_TICK)
        self.goalie.add_reward(GOALIE_TICK)
        for agent_id, (vx, vy) in self.vel.items():
            x, y = self.pos[agent_id]
            x = min(max(x + vx * dt, AGENT_R), FIELD_W - AGENT_R)
            y = min(max(y + vy * dt, AGENT_R), FIELD_H - AGENT_R)
            self.pos[agent_id] = (x, y)
        bx, by = self.ball
        bvx, bvy = self.ball_v
        bx += bvx * dt
        by += bvy * dt
        bvx *= BALL_FRICTION
        bvy *= BALL_FRICTION
        # wall reflections, except inside the goal mouth
        if by <= BALL_R and bvy < 0:
            by, bvy = 2 * BALL_R - by, -bvy
        elif by >= FIELD_H - BALL_R and bvy > 0:
            by, bvy = 2 * (FIELD_H - BALL_R) - by, -bvy
        if bx <= BALL_R and bvx < 0:
            bx, bvx = 2 * BALL_R - bx, -bvx
        elif bx >= FIELD_W - BALL_R and bvx > 0 and not (GOAL_Y_LO <= by <= GOAL_Y_HI):
            bx, bvx = 2 * (FIELD_W - BALL_R) - bx, -bvx
        # kicks: agent contact sends the ball away from the agent
        for agent_id in sorted(self.pos):
            ax, ay = self.pos[agent_id]
            dx, dy = bx - ax, by - ay
            dist = math.hypot(dx, dy)
            if dist <= AGENT_R + BALL_R:
                if dist < 1e-9:
                    dx, dy, dist = 1.0, 0.0, 1.0
                bvx, bvy = (dx / dist * KICK_SPEED, dy / dist * KICK_SPEED)
                overlap = AGENT_R + BALL_R - dist
                bx += dx / dist * overlap
                by += dy / dist * overlap
        self.ball = (bx, by)
        self.ball_v = (bvx, bvy)
        if bx >= GOAL_X and GOAL_Y_LO <= by <= GOAL_Y_HI:
            for h in self.strikers:
                h.add_reward(1.0)
            self.goalie.add_reward(-1.0)
            self.scored = True
            for h in (*self.strikers, self.goalie):
                self.academy.end_episode(h)
