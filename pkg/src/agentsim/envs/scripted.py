"""Scripted reference policies: deterministic near-optimal experts used
for demo generation and as baselines in tests.

Each expert is a function (academy, handle, obs) -> action row; experts
may read environment internals directly (they run in-process only).
"""

from __future__ import annotations

from collections import deque

import numpy as np


def basic_expert(academy, handle, obs):
    return np.array([2], dtype=np.int64)  # always right: 0.93 per episode


def gridworld_expert(academy, handle, obs):
    """BFS shortest path to the goal around obstacles."""
    env = academy.env
    start, goal = env.agent_cell, env.goal_cell
    blocked = env.obstacle_cells
    size = env.size
    moves = [(0, (0, 1)), (1, (0, -1)), (2, (-1, 0)), (3, (1, 0))]
    parent = {start: None}
    queue = deque([start])
    while queue:
        cell = queue.popleft()
        if cell == goal:
            break
        for action, (dx, dy) in moves:
            nxt = (cell[0] + dx, cell[1] + dy)
            if (0 <= nxt[0] < size and 0 <= nxt[1] < size
                    and nxt not in blocked and nxt not in parent):
                parent[nxt] = (cell, action)
                queue.append(nxt)
    if goal not in parent:
        return np.array([0], dtype=np.int64)  # unreachable; walk into a wall
    cell, action = goal, None
    while parent[cell] is not None:
        cell, action = parent[cell]
    return np.array([action], dtype=np.int64)


def hallway_expert(academy, handle, obs):
    env = academy.env
    return np.array([1 if env.cue_is_a else 2], dtype=np.int64)


def pushblock_expert(academy, handle, obs):
    """Line up behind the block, then push it right."""
    env = academy.env
    ax, ay = env.agent.position
    bx, by = env.block.position
    if abs(ay - by) > 0.15 and ax < bx - 0.9:
        return np.array([1 if ay < by else 2], dtype=np.int64)
    if abs(ay - by) > 0.6:
        # beside or past the block: back off left first
        return np.array([3], dtype=np.int64)
    return np.array([4], dtype=np.int64)


def foodcollector_expert(academy, handle, obs):
    """Head for the nearest good food along the dominant axis."""
    env = academy.env
    ax, ay = env.bodies[handle.agent_id].position
    good = [f for f in env.foods if f.tag == "food_good"]
    target = min(good, key=lambda f: (f.position[0] - ax) ** 2
                 + (f.position[1] - ay) ** 2)
    dx = target.position[0] - ax
    dy = target.position[1] - ay
    if abs(dx) >= abs(dy):
        return np.array([4 if dx > 0 else 3], dtype=np.int64)
    return np.array([1 if dy > 0 else 2], dtype=np.int64)
