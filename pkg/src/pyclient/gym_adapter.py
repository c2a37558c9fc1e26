"""Single-agent reset/step adapter on top of a ClientSession.

Wraps one behavior that controls exactly one agent: reset() returns the
first observation, step(action) returns (obs, reward, done, info).  When an
episode ends the next episode's initial observation is fetched eagerly and
surfaced both in info["reset_obs"] and from the following reset() call, so
the session never stalls between episodes.
"""

from __future__ import annotations

import numpy as np

from .session import ClientSession, ProtocolOrderViolation


class NotSingleAgent(Exception):
    """The behavior drives more than one agent and cannot be adapted."""


class GymAdapter:
    def __init__(self, session: ClientSession, behavior_name: str):
        if behavior_name not in session.behaviors:
            raise KeyError(f"unknown behavior {behavior_name!r}")
        self.session = session
        self.behavior = behavior_name
        self.manifest = session.behaviors[behavior_name]
        self.action_spec = self.manifest.action_spec
        self._agent_id: int | None = None
        self._next_obs = None  # queued initial obs after a terminal

    # -- helpers ----------------------------------------------------------

    def _my_row(self, batches, check=True):
        batch = batches.get(self.behavior)
        if batch is None:
            return None
        if check and len(batch.agent_ids) != 1:
            raise NotSingleAgent(
                f"behavior {self.behavior!r} has {len(batch.agent_ids)} "
                "agents")
        return batch

    def _obs_of(self, batch, i):
        rows = [o[i] for o in batch.obs]
        return rows[0] if len(rows) == 1 else rows

    def _action_row(self, action) -> np.ndarray:
        arr = np.asarray(action, dtype=np.float32).reshape(-1)
        expected = self.action_spec.row_size
        if arr.size == 1 and expected == 1:
            pass
        elif arr.size != expected:
            raise ValueError(f"action size {arr.size} != {expected}")
        return arr.reshape(1, -1)

    # -- API --------------------------------------------------------------

    def reset(self, seed: int | None = None):
        if seed is None and self._next_obs is not None:
            obs, self._next_obs = self._next_obs, None
            return obs
        self._next_obs = None
        decisions, _ = self.session.reset(seed)
        batch = self._my_row(decisions)
        while batch is None:  # other behaviors may decide first
            decisions, _ = self.session.step({
                name: _noop_rows(self.session, name, ids)
                for name, ids in self.session._pending.items()})
            batch = self._my_row(decisions)
        self._agent_id = batch.agent_ids[0]
        return self._obs_of(batch, 0)

    def step(self, action):
        if self._agent_id is None:
            raise ProtocolOrderViolation("step before reset")
        actions = {}
        for name, ids in self.session._pending.items():
            if name == self.behavior:
                actions[name] = self._action_row(action)
            else:
                actions[name] = _noop_rows(self.session, name, ids)
        decisions, terminals = self.session.step(actions)
        terminal = self._my_row(terminals, check=False)
        if terminal is not None and self._agent_id in terminal.agent_ids:
            i = terminal.agent_ids.index(self._agent_id)
            reward = float(terminal.rewards[i])
            obs = self._obs_of(terminal, i)
            info = {"interrupted": bool(terminal.interrupted[i])}
            self._queue_next_episode()
            info["reset_obs"] = self._next_obs
            return obs, reward, True, info
        batch = self._my_row(decisions)
        while batch is None:
            decisions, terminals = self.session.step({
                name: _noop_rows(self.session, name, ids)
                for name, ids in self.session._pending.items()})
            batch = self._my_row(decisions)
        i = batch.agent_ids.index(self._agent_id)
        return self._obs_of(batch, i), float(batch.rewards[i]), False, {}

    def _queue_next_episode(self) -> None:
        decisions, _ = self.session.step({
            name: _noop_rows(self.session, name, ids)
            for name, ids in self.session._pending.items()})
        batch = self._my_row(decisions)
        while batch is None:
            decisions, _ = self.session.step({
                name: _noop_rows(self.session, name, ids)
                for name, ids in self.session._pending.items()})
            batch = self._my_row(decisions)
        self._agent_id = batch.agent_ids[0]
        self._next_obs = self._obs_of(batch, 0)

    def close(self) -> None:
        self.session.close()


def _noop_rows(session: ClientSession, name: str, ids) -> np.ndarray:
    spec = session.behaviors[name].action_spec
    return np.zeros((len(ids), spec.row_size), dtype=np.float32)


def gym_adapter(session: ClientSession, behavior_name: str) -> GymAdapter:
    adapter = GymAdapter(session, behavior_name)
    # fail fast on multi-agent behaviors: peek at the manifest-declared
    # cardinality via the first reset performed by the caller; behaviors
    # with several live agents raise NotSingleAgent on first contact.
    return adapter
