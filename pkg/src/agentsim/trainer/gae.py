"""Generalized advantage estimation."""

from __future__ import annotations

import numpy as np


class LengthMismatch(Exception):
    pass


def gae(rewards, values, dones, bootstrap: float, gamma: float,
        lam: float) -> tuple[np.ndarray, np.ndarray]:
    """Advantages and returns from one agent-contiguous segment.

    delta_t = r_t + gamma * V_{t+1} * (1 - done_t) - V_t
    A_t     = delta_t + gamma * lam * (1 - done_t) * A_{t+1}

    V_{T} is `bootstrap` (0 for true terminals, V(s_T) for horizon cuts
    and interrupted episodes).  returns = advantages + values.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones, dtype=np.float64)
    if not (len(rewards) == len(values) == len(dones)):
        raise LengthMismatch(
            f"{len(rewards)}, {len(values)}, {len(dones)}")
    n = len(rewards)
    advantages = np.zeros(n, dtype=np.float64)
    next_value = float(bootstrap)
    running = 0.0
    for t in range(n - 1, -1, -1):
        mask = 1.0 - dones[t]
        delta = rewards[t] + gamma * next_value * mask - values[t]
        running = delta + gamma * lam * mask * running
        advantages[t] = running
        next_value = values[t]
    return advantages, advantages + values
