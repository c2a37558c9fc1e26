"""Self-play support: ELO bookkeeping and the opponent snapshot pool."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def elo_update(r_a: float, r_b: float, score_a: float,
               k: float = 16.0) -> tuple[float, float]:
    """One rated game; score_a in {0, 0.5, 1}.  Zero-sum by construction."""
    expected_a = 1.0 / (1.0 + 10.0 ** ((r_b - r_a) / 400.0))
    delta = k * (score_a - expected_a)
    return r_a + delta, r_b - delta


@dataclass
class Snapshot:
    params: np.ndarray
    elo: float
    step: int


@dataclass
class SnapshotPool:
    """Past policies sampled as opponents.

    With probability p_latest the current policy plays itself; otherwise a
    uniform draw over the most recent `window` snapshots.
    """

    window: int = 5
    p_latest: float = 0.5
    snapshots: list[Snapshot] = field(default_factory=list)

    def save(self, params: np.ndarray, elo: float, step: int) -> None:
        self.snapshots.append(Snapshot(params.copy(), elo, step))
        if len(self.snapshots) > self.window:
            self.snapshots.pop(0)

    def select_opponent(self, current_params: np.ndarray,
                        rng: np.random.Generator) -> Snapshot | None:
        """Returns the chosen snapshot, or None for the current policy."""
        if not self.snapshots or rng.random() < self.p_latest:
            return None
        return self.snapshots[int(rng.integers(len(self.snapshots)))]
