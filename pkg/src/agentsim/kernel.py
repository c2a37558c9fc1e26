"""Simulation lifecycle: the Academy, agent registration under behavior
names, fixed-timestep stepping with action hold, decision/terminal
batching, environment parameters, and seeded determinism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .sensors import ObservationSpec

FIXED_DT = 0.02  # simulated seconds per tick


class SpecMismatch(Exception):
    """behavior_name already registered with a different spec."""


class MissingAction(Exception):
    """StepRequest omitted an agent that was owed an action."""


class UnknownBehavior(Exception):
    pass


class ActionShapeMismatch(Exception):
    pass


class InactiveAgent(Exception):
    pass


class NonFiniteParameter(Exception):
    pass


@dataclass(frozen=True)
class Discrete:
    """Multi-discrete action space; one size per branch."""

    branches: tuple[int, ...]

    def __post_init__(self):
        if not self.branches or any(b < 2 for b in self.branches):
            raise ValueError("discrete branch sizes must be >= 2")


@dataclass(frozen=True)
class Continuous:
    """Box action space; every component in [-1, 1]."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("continuous dim must be positive")


@dataclass(frozen=True)
class BehaviorSpec:
    behavior_name: str
    obs_specs: tuple[ObservationSpec, ...]
    action_spec: Discrete | Continuous

    def __post_init__(self):
        if not self.obs_specs:
            raise ValueError("at least one observation spec required")

    @property
    def action_size(self) -> int:
        if isinstance(self.action_spec, Discrete):
            return len(self.action_spec.branches)
        return self.action_spec.dim


@dataclass
class AgentHandle:
    agent_id: int
    behavior_name: str
    decision_interval: int = 5
    max_step: int | None = None
    cumulative_reward: float = 0.0
    episode_step: int = 0
    # book-keeping owned by the Academy
    pending_reward: float = 0.0
    last_action: np.ndarray | None = None
    awaiting_action: bool = False
    pending_initial_decision: bool = True
    terminal_requested: bool = False
    terminal_interrupted: bool = False
    active: bool = True

    def add_reward(self, amount: float) -> None:
        self.pending_reward += amount
        self.cumulative_reward += amount


@dataclass
class DecisionBatch:
    agent_ids: list[int]
    obs: list[np.ndarray]  # one array per obs spec, leading axis = agents
    rewards: np.ndarray

    def __len__(self):
        return len(self.agent_ids)


@dataclass
class TerminalBatch:
    agent_ids: list[int]
    obs: list[np.ndarray]
    rewards: np.ndarray
    interrupted: np.ndarray

    def __len__(self):
        return len(self.agent_ids)


@dataclass
class StepOutcome:
    decisions: dict[str, DecisionBatch] = field(default_factory=dict)
    terminals: dict[str, TerminalBatch] = field(default_factory=dict)


class Environment:
    """Contract the Academy drives.  Implementations own a World and the
    per-agent episode state; they register agents inside setup()."""

    name = "base"

    def setup(self, academy: "Academy") -> None:
        raise NotImplementedError

    def reset_world(self) -> None:
        """Re-initialize the world and every agent; params re-read here."""
        raise NotImplementedError

    def observe(self, handle: AgentHandle) -> list[np.ndarray]:
        raise NotImplementedError

    def apply_action(self, handle: AgentHandle, action: np.ndarray) -> None:
        raise NotImplementedError

    def tick(self, dt: float) -> None:
        raise NotImplementedError

    def respawn(self, handle: AgentHandle) -> None:
        raise NotImplementedError


class Academy:
    """Singleton coordinator of one environment instance."""

    def __init__(self, env: Environment, seed: int | None = None):
        self.env = env
        self.step_count = 0
        self.env_params: dict[str, float] = {}
        self.seed = rng.entropy_seed() if seed is None else seed
        self.behaviors: dict[str, BehaviorSpec] = {}
        self.agents: dict[int, AgentHandle] = {}
        self._next_agent_id = 0
        self._episode_counter = 0
        env.setup(self)

    # -- registration ----------------------------------------------------

    def register_agent(self, behavior: BehaviorSpec, decision_interval=5,
                       max_step=None) -> AgentHandle:
        if decision_interval < 1:
            raise ValueError("decision_interval must be positive")
        existing = self.behaviors.get(behavior.behavior_name)
        if existing is not None and existing != behavior:
            raise SpecMismatch(behavior.behavior_name)
        self.behaviors[behavior.behavior_name] = behavior
        handle = AgentHandle(self._next_agent_id, behavior.behavior_name,
                             decision_interval, max_step)
        self._next_agent_id += 1
        self.agents[handle.agent_id] = handle
        return handle

    def stream(self, label: str) -> np.random.Generator:
        """Per-subsystem random stream derived from the root seed."""
        return rng.stream(self.seed, label)

    def episode_stream(self, label: str) -> np.random.Generator:
        """Stream that also advances with every episode/reset."""
        return rng.stream(self.seed, f"{label}/{self._episode_counter}")

    # -- parameters ------------------------------------------------------

    def set_environment_parameter(self, key: str, value: float):
        if not math.isfinite(value):
            raise NonFiniteParameter(key)
        previous = self.env_params.get(key)
        self.env_params[key] = float(value)
        return previous

    def get_parameter(self, key: str, default: float) -> float:
        return self.env_params.get(key, default)

    # -- lifecycle -------------------------------------------------------

    def reset(self, seed: int | None = None) -> StepOutcome:
        if seed is not None:
            self.seed = seed
        self.step_count = 0
        self._episode_counter = 0
        for handle in self.agents.values():
            handle.cumulative_reward = 0.0
            handle.pending_reward = 0.0
            handle.episode_step = 0
            handle.last_action = None
            handle.awaiting_action = False
            handle.pending_initial_decision = True
            handle.terminal_requested = False
            handle.terminal_interrupted = False
            handle.active = True
        self.env.reset_world()
        return self._emit_initial_decisions()

    def end_episode(self, handle: AgentHandle, interrupted: bool = False):
        if not handle.active or handle.terminal_requested:
            raise InactiveAgent(handle.agent_id)
        handle.terminal_requested = True
        handle.terminal_interrupted = interrupted

    def academy_step(self, actions: dict[str, dict[int, object]]) -> StepOutcome:
        self._apply_actions(actions)
        outcome = StepOutcome()
        pending = [h for h in self._sorted_agents() if h.pending_initial_decision]
        if pending:
            # respawned agents observe before any further ticking
            self._emit_decisions(outcome, pending)
            return outcome
        while True:
            self.env.tick(FIXED_DT)
            self.step_count += 1
            terminals: list[AgentHandle] = []
            decisions: list[AgentHandle] = []
            for handle in self._sorted_agents():
                handle.episode_step += 1
                if (not handle.terminal_requested and handle.max_step is not None
                        and handle.episode_step >= handle.max_step):
                    handle.terminal_requested = True
                    handle.terminal_interrupted = True
                if handle.terminal_requested:
                    terminals.append(handle)
                elif handle.episode_step % handle.decision_interval == 0:
                    decisions.append(handle)
            self._emit_terminals(outcome, terminals)
            self._emit_decisions(outcome, decisions)
            if terminals or decisions:
                return outcome

    # -- internals -------------------------------------------------------

    def _sorted_agents(self):
        return [self.agents[i] for i in sorted(self.agents)]

    def _apply_actions(self, actions):
        owed = {h.agent_id for h in self.agents.values() if h.awaiting_action}
        for name, rows in actions.items():
            spec = self.behaviors.get(name)
            if spec is None:
                raise UnknownBehavior(name)
            for agent_id, row in rows.items():
                handle = self.agents.get(agent_id)
                if handle is None or handle.behavior_name != name:
                    raise MissingAction(agent_id)
                if agent_id not in owed:
                    raise MissingAction(agent_id)
                action = _validate_action(spec, row)
                handle.last_action = action
                handle.awaiting_action = False
                self.env.apply_action(handle, action)
                owed.discard(agent_id)
        if owed:
            raise MissingAction(sorted(owed)[0])

    def _emit_decisions(self, outcome: StepOutcome, handles):
        by_behavior: dict[str, list[AgentHandle]] = {}
        for h in handles:
            by_behavior.setdefault(h.behavior_name, []).append(h)
        for name, group in by_behavior.items():
            obs_rows = [self.env.observe(h) for h in group]
            batch = DecisionBatch(
                agent_ids=[h.agent_id for h in group],
                obs=_stack_obs(self.behaviors[name], obs_rows),
                rewards=np.array([h.pending_reward for h in group],
                                 dtype=np.float32),
            )
            for h in group:
                h.pending_reward = 0.0
                h.awaiting_action = True
                h.pending_initial_decision = False
            outcome.decisions[name] = batch

    def _emit_terminals(self, outcome: StepOutcome, handles):
        by_behavior: dict[str, list[AgentHandle]] = {}
        for h in handles:
            by_behavior.setdefault(h.behavior_name, []).append(h)
        for name, group in by_behavior.items():
            obs_rows = [self.env.observe(h) for h in group]
            batch = TerminalBatch(
                agent_ids=[h.agent_id for h in group],
                obs=_stack_obs(self.behaviors[name], obs_rows),
                rewards=np.array([h.pending_reward for h in group],
                                 dtype=np.float32),
                interrupted=np.array([h.terminal_interrupted for h in group],
                                     dtype=bool),
            )
            for h in group:
                h.pending_reward = 0.0
                h.cumulative_reward = 0.0
                h.episode_step = 0
                h.last_action = None
                h.awaiting_action = False
                h.terminal_requested = False
                h.terminal_interrupted = False
                h.pending_initial_decision = True
                self._episode_counter += 1
                self.env.respawn(h)
            outcome.terminals[name] = batch

    def _emit_initial_decisions(self) -> StepOutcome:
        outcome = StepOutcome()
        self._emit_decisions(outcome, self._sorted_agents())
        return outcome


def _validate_action(spec: BehaviorSpec, row) -> np.ndarray:
    if isinstance(spec.action_spec, Discrete):
        arr = np.atleast_1d(np.asarray(row, dtype=np.int64))
        branches = spec.action_spec.branches
        if arr.shape != (len(branches),):
            raise ActionShapeMismatch(
                f"expected {len(branches)} branches, got shape {arr.shape}")
        if any(a < 0 or a >= b for a, b in zip(arr, branches)):
            raise ActionShapeMismatch(f"branch value out of range: {arr}")
        return arr
    arr = np.atleast_1d(np.asarray(row, dtype=np.float32))
    if arr.shape != (spec.action_spec.dim,):
        raise ActionShapeMismatch(
            f"expected dim {spec.action_spec.dim}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ActionShapeMismatch("non-finite continuous action")
    return np.clip(arr, -1.0, 1.0)


def _stack_obs(spec: BehaviorSpec, obs_rows) -> list[np.ndarray]:
    out = []
    for i, ospec in enumerate(spec.obs_specs):
        arr = np.stack([row[i] for row in obs_rows]).astype(np.float32)
        expected = (len(obs_rows), *ospec.stacked_shape)
        if arr.shape != expected:
            raise ActionShapeMismatch(
                f"observation {i} shape {arr.shape} != {expected}")
        out.append(arr)
    return out
