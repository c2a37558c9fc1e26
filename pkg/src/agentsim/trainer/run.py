"""Training runs: rollout -> GAE -> PPO epochs (or a BC loop), periodic
evaluation, self-play orchestration, curricula, and run artifacts
(metrics log, model checkpoints, final report)."""

from __future__ import annotations

import hashlib
import json
import os
import struct
import time
from dataclasses import dataclass, field

import numpy as np

from .. import rng as rngmod
from ..envs import make_env
from ..kernel import Academy, BehaviorSpec, Continuous, Discrete
from .bc import action_agreement, bc_update
from .curriculum import LessonPlan, plan_from_config
from .gae import gae
from .icm import ICM
from .network import Adam, PolicyValueNet, Topology
from .ppo import normalize_advantages, ppo_minibatch_update
from .selfplay import SnapshotPool, elo_update

MODEL_MAGIC = b"AGNN"
MODEL_VERSION = 1


@dataclass
class TrainConfig:
    env: str
    algorithm: str = "ppo"  # ppo | bc
    env_params: dict = field(default_factory=dict)
    gamma: float = 0.99
    lam: float = 0.95
    clip_eps: float = 0.2
    lr: float = 3e-4
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    horizon: int = 256
    minibatch_size: int = 64
    epochs: int = 3
    total_steps: int = 100_000
    icm: dict | None = None  # {enabled, eta, beta, feature_dim}
    self_play: dict | None = None
    curriculum: list | None = None
    seed: int = 0
    hidden: tuple[int, ...] = (64, 64)
    eval_episodes: int = 100
    eval_interval: int = 0  # 0: final eval only
    demo_path: str | None = None  # BC input
    bc_epochs: int = 50
    bc_holdout: float = 0.1

    def __post_init__(self):
        if not (0.0 <= self.gamma <= 1.0 and 0.0 <= self.lam <= 1.0):
            raise ValueError("gamma and lambda must lie in [0, 1]")
        if self.clip_eps <= 0:
            raise ValueError("clip_eps must be positive")
        if min(self.horizon, self.minibatch_size, self.epochs,
               self.total_steps) <= 0:
            raise ValueError("sizes must be positive")
        if self.algorithm not in ("ppo", "bc"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")

    @staticmethod
    def from_json(doc: dict) -> "TrainConfig":
        doc = dict(doc)
        if "lambda" in doc:
            doc["lam"] = doc.pop("lambda")
        if "hidden" in doc:
            doc["hidden"] = tuple(doc["hidden"])
        return TrainConfig(**doc)

    def to_json(self) -> dict:
        doc = {k: v for k, v in self.__dict__.items()}
        doc["lambda"] = doc.pop("lam")
        doc["hidden"] = list(self.hidden)
        return doc


def config_hash(config: TrainConfig) -> str:
    canon = json.dumps(config.to_json(), sort_keys=True,
                       separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


# -- checkpoint format ---------------------------------------------------

def save_model(path: str, topo: Topology, params: np.ndarray) -> None:
    desc = json.dumps(topo.describe(), sort_keys=True).encode()
    payload = np.asarray(params, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<H", MODEL_VERSION))
        fh.write(struct.pack("<I", len(desc)))
        fh.write(desc)
        fh.write(struct.pack("<I", len(params)))
        fh.write(payload)


def load_model(path: str) -> tuple[Topology, np.ndarray]:
    with open(path, "rb") as fh:
        if fh.read(4) != MODEL_MAGIC:
            raise ValueError(f"{path}: bad model magic")
        (version,) = struct.unpack("<H", fh.read(2))
        if version != MODEL_VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        (dlen,) = struct.unpack("<I", fh.read(4))
        topo = Topology.from_description(json.loads(fh.read(dlen)))
        (count,) = struct.unpack("<I", fh.read(4))
        params = np.frombuffer(fh.read(4 * count), dtype="<f4").copy()
    return topo, params


# -- rollout plumbing ----------------------------------------------------

def flatten_obs(batch_obs: list[np.ndarray]) -> np.ndarray:
    """Concatenate every observation stream into one flat row per agent."""
    n = batch_obs[0].shape[0]
    return np.concatenate([o.reshape(n, -1) for o in batch_obs], axis=1)


def behavior_input_size(spec: BehaviorSpec) -> int:
    return sum(o.flat_size for o in spec.obs_specs)


def build_net(spec: BehaviorSpec, seed: int, hidden=(64, 64),
              params: np.ndarray | None = None) -> PolicyValueNet:
    topo = Topology(behavior_input_size(spec), tuple(hidden), "tanh",
                    spec.action_spec)
    stream = rngmod.stream(seed, f"init/{spec.behavior_name}")
    return PolicyValueNet(topo, params=params, rng=stream)


@dataclass
class _AgentBuffer:
    """Closed transitions plus at most one pending (awaiting its reward)."""

    obs: list = field(default_factory=list)
    next_obs: list = field(default_factory=list)
    actions: list = field(default_factory=list)
    logps: list = field(default_factory=list)
    values: list = field(default_factory=list)
    rewards: list = field(default_factory=list)
    dones: list = field(default_factory=list)
    pending: tuple | None = None  # (obs, action, logp, value)
    episode_return: float = 0.0
    episode_len: int = 0

    def __len__(self):
        return len(self.rewards)


class RolloutCollector:
    """Drives one Academy with per-behavior policies and accumulates
    agent-contiguous transition buffers."""

    def __init__(self, academy: Academy, nets: dict[str, PolicyValueNet],
                 seed: int, gamma: float,
                 icms: dict[str, ICM] | None = None,
                 action_override=None):
        self.academy = academy
        self.nets = nets
        self.gamma = gamma
        self.icms = icms or {}
        self.streams = {name: rngmod.stream(seed, f"sample/{name}")
                        for name in nets}
        self.buffers: dict[str, dict[int, _AgentBuffer]] = {
            name: {} for name in nets}
        self.completed_episodes: dict[str, list[tuple[int, float, int]]] = {
            name: [] for name in nets}
        # action_override(behavior, agent_id, obs_row) -> action row or None
        self.action_override = action_override
        self.outcome = academy.reset(seed)

    def _buffer(self, name, agent_id) -> _AgentBuffer:
        return self.buffers[name].setdefault(agent_id, _AgentBuffer())

    def collect(self, min_transitions: int, learn_behavior: str,
                agents: set[int] | None = None) -> None:
        """Step until the named behavior holds >= min_transitions closed
        transitions (optionally counting only the given agent ids)."""
        while len_closed(self.buffers[learn_behavior], agents) < min_transitions:
            self.step_once()

    def step_once(self) -> None:
        actions: dict[str, dict[int, np.ndarray]] = {}
        for name, batch in self.outcome.decisions.items():
            net = self.nets[name]
            obs = flatten_obs(batch.obs)
            cache = net.forward(obs)
            acts, logps = net.sample(cache, self.streams[name])
            values = cache["value"]
            rows = {}
            for i, agent_id in enumerate(batch.agent_ids):
                buf = self._buffer(name, agent_id)
                self._close(name, buf, agent_id, float(batch.rewards[i]),
                            obs[i], done=False, interrupted=False)
                override = None
                if self.action_override is not None:
                    override = self.action_override(name, agent_id, obs[i])
                act = acts[i] if override is None else np.asarray(override)
                if override is not None:
                    logp = float(net.log_prob(cache, np.repeat(
                        act[None], len(obs), axis=0))[i])
                else:
                    logp = float(logps[i])
                buf.pending = (obs[i], act, logp, float(values[i]))
                rows[agent_id] = act
            actions[name] = rows
        for name, batch in self.outcome.terminals.items():
            obs = flatten_obs(batch.obs)
            values = self.nets[name].forward(obs)["value"]
            for i, agent_id in enumerate(batch.agent_ids):
                buf = self._buffer(name, agent_id)
                reward = float(batch.rewards[i])
                if batch.interrupted[i]:
                    reward += self.gamma * float(values[i])
                self._close(name, buf, agent_id, reward, obs[i], done=True,
                            interrupted=bool(batch.interrupted[i]),
                            raw_reward=float(batch.rewards[i]))
        self.outcome = self.academy.academy_step(actions)

    def _close(self, name, buf, agent_id, reward, next_obs, done,
               interrupted, raw_reward=None):
        if buf.pending is None:
            return
        obs, act, logp, value = buf.pending
        buf.pending = None
        raw = reward if raw_reward is None else raw_reward
        icm = self.icms.get(name)
        if icm is not None:
            reward = reward + float(icm.intrinsic_reward(
                obs[None], next_obs[None], np.asarray(act)[None])[0])
        buf.obs.append(obs)
        buf.next_obs.append(next_obs)
        buf.actions.append(act)
        buf.logps.append(logp)
        buf.values.append(value)
        buf.rewards.append(reward)
        buf.dones.append(done)
        buf.episode_return += raw
        buf.episode_len += 1
        if done:
            self.completed_episodes[name].append(
                (agent_id, buf.episode_return, buf.episode_len))
            buf.episode_return = 0.0
            buf.episode_len = 0

    def drain(self, name: str, gamma: float, lam: float,
              agents: set[int] | None = None):
        """Assemble (obs, actions, logp, adv, ret, extras) across agents in
        ascending agent id and clear the closed transitions."""
        parts = {k: [] for k in
                 ("obs", "next_obs", "actions", "logps", "adv", "ret")}
        for agent_id in sorted(self.buffers[name]):
            buf = self.buffers[name][agent_id]
            if agents is not None and agent_id not in agents:
                buf.obs.clear(); buf.next_obs.clear(); buf.actions.clear()
                buf.logps.clear(); buf.values.clear(); buf.rewards.clear()
                buf.dones.clear()
                continue
            if not buf.rewards:
                continue
            bootstrap = 0.0
            if not buf.dones[-1] and buf.pending is not None:
                bootstrap = buf.pending[3]
            adv, ret = gae(buf.rewards, buf.values, buf.dones, bootstrap,
                           gamma, lam)
            parts["obs"].append(np.stack(buf.obs))
            parts["next_obs"].append(np.stack(buf.next_obs))
            parts["actions"].append(np.stack(buf.actions))
            parts["logps"].append(np.asarray(buf.logps, dtype=np.float32))
            parts["adv"].append(adv.astype(np.float32))
            parts["ret"].append(ret.astype(np.float32))
            buf.obs.clear(); buf.next_obs.clear(); buf.actions.clear()
            buf.logps.clear(); buf.values.clear(); buf.rewards.clear()
            buf.dones.clear()
        if not parts["obs"]:
            return {k: np.empty(0, dtype=np.float32) for k in parts}
        return {k: np.concatenate(v) for k, v in parts.items()}


def len_closed(buffers: dict[int, _AgentBuffer],
               agents: set[int] | None = None) -> int:
    return sum(len(b) for aid, b in buffers.items()
               if agents is None or aid in agents)


# -- evaluation ----------------------------------------------------------

def evaluate(env_name: str, env_params: dict, nets: dict[str, PolicyValueNet],
             episodes: int, seed: int,
             behavior: str | None = None) -> tuple[float, float, float]:
    """Greedy-policy evaluation; returns (mean, std, mean_len) of episode
    returns for `behavior` (default: the only/first one)."""
    academy = make_env(env_name, env_params, seed=seed)
    behavior = behavior or next(iter(academy.behaviors))
    outcome = academy.reset(seed)
    returns: list[float] = []
    lengths: list[int] = []
    ep_return: dict[int, float] = {}
    ep_len: dict[int, int] = {}
    guard = 0
    while len(returns) < episodes:
        actions = {}
        for name, batch in outcome.decisions.items():
            obs = flatten_obs(batch.obs)
            acts = nets[name].greedy(nets[name].forward(obs))
            rows = {}
            for i, agent_id in enumerate(batch.agent_ids):
                if name == behavior:
                    ep_return[agent_id] = (ep_return.get(agent_id, 0.0)
                                           + float(batch.rewards[i]))
                    ep_len[agent_id] = ep_len.get(agent_id, 0) + 1
                rows[agent_id] = acts[i]
            actions[name] = rows
        for name, batch in outcome.terminals.items():
            if name != behavior:
                continue
            for i, agent_id in enumerate(batch.agent_ids):
                total = ep_return.get(agent_id, 0.0) + float(batch.rewards[i])
                returns.append(total)
                lengths.append(ep_len.get(agent_id, 0))
                ep_return[agent_id] = 0.0
                ep_len[agent_id] = 0
        outcome = academy.academy_step(actions)
        guard += 1
        if guard > episodes * 100_000:
            raise RuntimeError("evaluation failed to terminate")
    returns = returns[:episodes]
    return (float(np.mean(returns)), float(np.std(returns)),
            float(np.mean(lengths[:episodes])))


# -- run directory helpers ----------------------------------------------

def run_root() -> str:
    return os.environ.get("AGENTSIM_LOG_DIR", "runs")


def make_run_dir(config: TrainConfig) -> str:
    base = f"{config.env}_{config.algorithm}_s{config.seed}_{config_hash(config)}"
    path = os.path.join(run_root(), base)
    suffix = 0
    while os.path.exists(path):
        suffix += 1
        path = os.path.join(run_root(), f"{base}_{suffix}")
    os.makedirs(path)
    return path


class MetricsLog:
    """Line-delimited JSON metrics, written deterministically."""

    def __init__(self, path: str):
        self.path = path
        self._fh = open(path, "w")

    def write(self, step: int, behavior: str, mean_reward: float,
              episode_len: float, elo: float | None = None,
              **extra) -> None:
        record = {"step": step, "behavior": behavior,
                  "mean_reward": round(float(mean_reward), 6),
                  "episode_len": round(float(episode_len), 3)}
        if elo is not None:
            record["elo"] = round(float(elo), 3)
        record.update(extra)
        self._fh.write(json.dumps(record, sort_keys=True) + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()


def _write_report_atomic(run_dir: str, report: dict) -> None:
    tmp = os.path.join(run_dir, ".report.json.tmp")
    with open(tmp, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    os.replace(tmp, os.path.join(run_dir, "report.json"))


# -- top-level entry points ---------------------------------------------

def train_run(config: TrainConfig, run_dir: str | None = None) -> str:
    """Run training to completion; returns the run directory."""
    start = time.monotonic()
    if run_dir is None:
        run_dir = make_run_dir(config)
    os.makedirs(run_dir, exist_ok=True)
    with open(os.path.join(run_dir, "config.json"), "w") as fh:
        json.dump(config.to_json(), fh, indent=2, sort_keys=True)
    metrics = MetricsLog(os.path.join(run_dir, "metrics.ndjson"))
    try:
        if config.algorithm == "bc":
            result = _bc_run(config, run_dir, metrics)
        elif config.self_play:
            result = _self_play_run(config, run_dir, metrics)
        else:
            result = _ppo_run(config, run_dir, metrics)
    finally:
        metrics.close()
    report = {
        "env": config.env,
        "algorithm": config.algorithm,
        "seed": config.seed,
        "total_steps": config.total_steps,
        "config_hash": config_hash(config),
        "wall_clock_s": round(time.monotonic() - start, 3),
        **result,
    }
    _write_report_atomic(run_dir, report)
    return run_dir


def _apply_lesson(academy: Academy, plan: LessonPlan) -> None:
    for key, value in plan.current.parameters.items():
        academy.set_environment_parameter(key, value)


def _ppo_run(config: TrainConfig, run_dir: str, metrics: MetricsLog) -> dict:
    academy = make_env(config.env, config.env_params, seed=config.seed)
    plan = plan_from_config(config.curriculum) if config.curriculum else None
    if plan is not None:
        _apply_lesson(academy, plan)
    nets = {name: build_net(spec, config.seed, config.hidden)
            for name, spec in academy.behaviors.items()}
    opts = {name: Adam(net.n_params, lr=config.lr)
            for name, net in nets.items()}
    icms = {}
    if config.icm and config.icm.get("enabled"):
        for name, spec in academy.behaviors.items():
            icms[name] = ICM(
                behavior_input_size(spec), spec.action_spec,
                feature_dim=int(config.icm.get("feature_dim", 32)),
                eta=float(config.icm.get("eta", 0.01)),
                beta=float(config.icm.get("beta", 0.2)),
                lr=config.lr,
                rng=rngmod.stream(config.seed, f"icm/{name}"))
    collector = RolloutCollector(academy, nets, config.seed, config.gamma,
                                 icms=icms)
    shuffle = rngmod.stream(config.seed, "minibatch")
    recent: dict[str, list] = {name: [] for name in nets}
    next_eval = config.eval_interval or config.total_steps + 1
    while academy.step_count < config.total_steps:
        for name in sorted(nets):
            collector.collect(config.horizon, name)
        step = academy.step_count
        for name in sorted(nets):
            batch = collector.drain(name, config.gamma, config.lam)
            _ppo_epochs(nets[name], opts[name], batch, config, shuffle)
            if name in icms:
                icms[name].update(batch["obs"], batch["next_obs"],
                                  batch["actions"])
            episodes = collector.completed_episodes[name]
            if plan is not None and name == sorted(nets)[0]:
                for _, r, _ in episodes:
                    plan.record_episode(r)
            recent[name].extend((r, l) for _, r, l in episodes)
            recent[name] = recent[name][-100:]
            episodes.clear()
            if recent[name]:
                mean_r = float(np.mean([r for r, _ in recent[name]]))
                mean_l = float(np.mean([l for _, l in recent[name]]))
            else:
                mean_r, mean_l = 0.0, 0.0
            metrics.write(step, name, mean_r, mean_l)
        if plan is not None and plan.advance():
            _apply_lesson(academy, plan)
        if step >= next_eval:
            next_eval += config.eval_interval
    for name, net in nets.items():
        save_model(os.path.join(run_dir, f"model_{name}.agnn"),
                   net.topo, net.params)
    behavior = sorted(nets)[0]
    mean, std, _ = evaluate(config.env, config.env_params, nets,
                            config.eval_episodes, config.seed + 1_000_003,
                            behavior)
    return {"final_eval_mean": round(mean, 4),
            "final_eval_std": round(std, 4),
            "final_lesson": plan.lesson_index if plan else None}


def _ppo_epochs(net, opt, batch, config: TrainConfig, shuffle) -> None:
    n = len(batch["obs"])
    adv = normalize_advantages(batch["adv"])
    for _ in range(config.epochs):
        order = shuffle.permutation(n)
        for lo in range(0, n, config.minibatch_size):
            idx = order[lo:lo + config.minibatch_size]
            if len(idx) < 2:
                continue
            ppo_minibatch_update(
                net, opt, batch["obs"][idx], batch["actions"][idx],
                batch["logps"][idx], adv[idx], batch["ret"][idx],
                config.clip_eps, config.value_coef, config.entropy_coef)


def _self_play_run(config: TrainConfig, run_dir: str,
                   metrics: MetricsLog) -> dict:
    sp = config.self_play or {}
    snapshot_interval = int(sp.get("snapshot_interval", 10_000))
    window = int(sp.get("window", 5))
    p_latest = float(sp.get("p_latest", 0.5))
    initial_elo = float(sp.get("initial_elo", 1200.0))
    k_factor = float(sp.get("k_factor", 16.0))
    swap_interval = int(sp.get("swap_interval", snapshot_interval))

    academy = make_env(config.env, config.env_params, seed=config.seed)
    behaviors = sorted(academy.behaviors)
    symmetric = len(behaviors) == 1
    nets = {name: build_net(spec, config.seed, config.hidden)
            for name, spec in academy.behaviors.items()}
    opts = {name: Adam(nets[name].n_params, lr=config.lr)
            for name in behaviors}
    pools = {name: SnapshotPool(window, p_latest) for name in behaviors}
    elos = {name: initial_elo for name in behaviors}
    opp_stream = rngmod.stream(config.seed, "selfplay/opponent")

    # learning agent: lowest agent id of the learning behavior; opponents
    # run frozen nets selected from the snapshot pool
    opponent_nets = {name: build_net(spec, config.seed, config.hidden,
                                     params=nets[name].params.copy())
                     for name, spec in academy.behaviors.items()}
    state = {"learn_behavior": behaviors[0], "opponent_snapshot": None}

    learn_agent_ids = {}
    for name in behaviors:
        ids = sorted(h.agent_id for h in academy.agents.values()
                     if h.behavior_name == name)
        learn_agent_ids[name] = ids[0]

    def pick_opponent():
        name = state["learn_behavior"]
        snap = pools[name].select_opponent(nets[name].params, opp_stream)
        state["opponent_snapshot"] = snap
        params = nets[name].params if snap is None else snap.params
        opponent_nets[name].set_params(params)
        if not symmetric:
            for other in behaviors:
                if other != name:
                    opponent_nets[other].set_params(nets[other].params)

    def action_override(name, agent_id, obs_row):
        learning = (name == state["learn_behavior"]
                    and agent_id == learn_agent_ids[name])
        if symmetric:
            if learning:
                return None
            cache = opponent_nets[name].forward(obs_row[None])
            act, _ = opponent_nets[name].sample(cache, opp_stream)
            return act[0]
        # asymmetric: the whole learning behavior learns; every agent of
        # other behaviors runs its frozen current net
        if name == state["learn_behavior"]:
            return None
        cache = opponent_nets[name].forward(obs_row[None])
        act, _ = opponent_nets[name].sample(cache, opp_stream)
        return act[0]

    pick_opponent()
    collector = RolloutCollector(academy, nets, config.seed, config.gamma,
                                 action_override=action_override)
    shuffle = rngmod.stream(config.seed, "minibatch")
    recent: list[tuple[float, int]] = []
    elo_events: list[dict] = []
    next_snapshot = snapshot_interval
    next_swap = swap_interval

    while academy.step_count < config.total_steps:
        name = state["learn_behavior"]
        learn_set = ({learn_agent_ids[name]} if symmetric else
                     {h.agent_id for h in academy.agents.values()
                      if h.behavior_name == name})
        collector.collect(config.horizon, name, learn_set)
        step = academy.step_count
        batch = collector.drain(name, config.gamma, config.lam, learn_set)
        _ppo_epochs(nets[name], opts[name], batch, config, shuffle)
        # score finished episodes against the current opponent rating
        episodes = collector.completed_episodes[name]
        for agent_id, ep_return, ep_len in episodes:
            if agent_id != learn_agent_ids[name]:
                continue
            recent.append((ep_return, ep_len))
            score = 0.5 if abs(ep_return) < 0.5 else (1.0 if ep_return > 0
                                                      else 0.0)
            snap = state["opponent_snapshot"]
            opp_elo = snap.elo if snap is not None else elos[name]
            if snap is not None:
                new_mine, new_opp = elo_update(elos[name], opp_elo, score,
                                               k_factor)
                elo_events.append({"step": step, "behavior": name,
                                   "score": score,
                                   "elo_before": [elos[name], opp_elo],
                                   "elo_after": [new_mine, new_opp]})
                elos[name] = new_mine
                snap.elo = new_opp
            pick_opponent()
        episodes.clear()
        for other in behaviors:
            collector.completed_episodes[other].clear()
            collector.drain(other, config.gamma, config.lam)
        recent = recent[-100:]
        mean_r = float(np.mean([r for r, _ in recent])) if recent else 0.0
        mean_l = float(np.mean([l for _, l in recent])) if recent else 0.0
        metrics.write(step, name, mean_r, mean_l, elo=elos[name])
        if step >= next_snapshot:
            pools[name].save(nets[name].params, elos[name], step)
            next_snapshot += snapshot_interval
        if not symmetric and step >= next_swap:
            state["learn_behavior"] = behaviors[
                (behaviors.index(name) + 1) % len(behaviors)]
            pick_opponent()
            next_swap += swap_interval

    for name, net in nets.items():
        save_model(os.path.join(run_dir, f"model_{name}.agnn"),
                   net.topo, net.params)
    with open(os.path.join(run_dir, "elo_events.ndjson"), "w") as fh:
        for event in elo_events:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
    return {"final_eval_mean": None, "final_eval_std": None,
            "final_elo": {n: round(e, 3) for n, e in elos.items()}}


def _bc_run(config: TrainConfig, run_dir: str, metrics: MetricsLog) -> dict:
    from ..protocol.demo import read_demo

    if not config.demo_path:
        raise ValueError("bc requires demo_path")
    demo = read_demo(config.demo_path)
    spec = demo.behavior_spec
    net = build_net(spec, config.seed, config.hidden)
    opt = Adam(net.n_params, lr=config.lr)
    # terminal records carry no expert action; train on decision records
    steps = [rec for rec in demo.records if not rec.done]
    obs = np.stack([flatten_obs([o[None] for o in rec.obs])[0]
                    for rec in steps])
    actions = np.stack([rec.action for rec in steps])
    n = len(obs)
    split_stream = rngmod.stream(config.seed, "bc/split")
    order = split_stream.permutation(n)
    n_hold = max(1, int(n * config.bc_holdout))
    hold, train = order[:n_hold], order[n_hold:]
    shuffle = rngmod.stream(config.seed, "bc/shuffle")
    loss = float("nan")
    for epoch in range(config.bc_epochs):
        perm = shuffle.permutation(len(train))
        for lo in range(0, len(train), config.minibatch_size):
            idx = train[perm[lo:lo + config.minibatch_size]]
            if len(idx) == 0:
                continue
            loss = bc_update(net, opt, obs[idx], actions[idx])
        agreement = action_agreement(net, obs[hold], actions[hold])
        metrics.write(epoch, spec.behavior_name, -loss, 0.0,
                      agreement=round(agreement, 4))
    save_model(os.path.join(run_dir, f"model_{spec.behavior_name}.agnn"),
               net.topo, net.params)
    agreement = action_agreement(net, obs[hold], actions[hold])
    mean, std, _ = evaluate(config.env, config.env_params,
                            {spec.behavior_name: net},
                            config.eval_episodes, config.seed + 1_000_003,
                            spec.behavior_name)
    return {"final_eval_mean": round(mean, 4),
            "final_eval_std": round(std, 4),
            "holdout_agreement": round(agreement, 4),
            "final_bc_loss": round(loss, 6)}
