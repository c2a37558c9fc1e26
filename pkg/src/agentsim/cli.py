"""Operator command line: serve environments, train, play in the browser,
record scripted demos, evaluate checkpoints, and benchmark the protocol."""

from __future__ import annotations

import argparse
import json
import logging
import socket
import statistics
import sys
import threading
import time

import numpy as np

from . import rng as rngmod
from .envs import NoScriptedExpert, UnknownEnvironment, make_env, scripted_policy
from .kernel import Discrete
from .protocol import codec
from .protocol.demo import DemoRecord, write_demo
from .protocol.server import DEFAULT_PORT, read_frame, serve
from .trainer.run import TrainConfig, evaluate, load_model, train_run
from .trainer.network import PolicyValueNet

log = logging.getLogger(__name__)


def _parse_env_params(pairs: list[str]) -> dict[str, float]:
    params = {}
    for pair in pairs or []:
        key, _, value = pair.partition("=")
        params[key] = float(value)
    return params


def cmd_serve(args) -> int:
    serve(args.env, _parse_env_params(args.param), seed=args.seed,
          host=args.host, port=args.port)
    return 0


def cmd_train(args) -> int:
    with open(args.config) as fh:
        config = TrainConfig.from_json(json.load(fh))
    if args.seed is not None:
        config.seed = args.seed
    run_dir = train_run(config)
    print(run_dir)
    return 0


def cmd_eval(args) -> int:
    topo, params = load_model(args.model)
    net = PolicyValueNet(topo, params=params)
    academy = make_env(args.env, _parse_env_params(args.param),
                       seed=args.seed)
    behavior = args.behavior or sorted(academy.behaviors)[0]
    nets = {name: net for name in academy.behaviors}
    mean, std, mean_len = evaluate(args.env, _parse_env_params(args.param),
                                   nets, args.episodes, args.seed, behavior)
    print(json.dumps({"env": args.env, "behavior": behavior,
                      "episodes": args.episodes, "mean": round(mean, 4),
                      "std": round(std, 4),
                      "mean_episode_len": round(mean_len, 2)}))
    return 0


def cmd_record(args) -> int:
    academy = make_env(args.env, _parse_env_params(args.param),
                       seed=args.seed)
    try:
        expert = scripted_policy(args.env)
    except NoScriptedExpert:
        print(f"no scripted expert for {args.env}", file=sys.stderr)
        return 2
    behavior = sorted(academy.behaviors)[0]
    spec = academy.behaviors[behavior]
    controlled = min(h.agent_id for h in academy.agents.values()
                     if h.behavior_name == behavior)
    records: list[DemoRecord] = []
    pending = None
    episodes = 0
    outcome = academy.reset(args.seed)
    while episodes < args.episodes:
        terminal = outcome.terminals.get(behavior)
        if terminal is not None and controlled in terminal.agent_ids:
            i = terminal.agent_ids.index(controlled)
            # terminal reward closes the last acted transition; the done
            # marker record then carries no further reward
            terminal_reward = float(terminal.rewards[i])
            if pending is not None:
                obs_rows, act = pending
                records.append(DemoRecord(obs_rows, act, terminal_reward,
                                          False))
                pending = None
                terminal_reward = 0.0
            noop = (np.zeros(len(spec.action_spec.branches), dtype=np.int64)
                    if isinstance(spec.action_spec, Discrete)
                    else np.zeros(spec.action_spec.dim, dtype=np.float32))
            records.append(DemoRecord([o[i] for o in terminal.obs], noop,
                                      terminal_reward, True,
                                      bool(terminal.interrupted[i])))
            episodes += 1
        actions = {}
        for name, batch in outcome.decisions.items():
            rows = {}
            for i, agent_id in enumerate(batch.agent_ids):
                handle = academy.agents[agent_id]
                act = expert(academy, handle, [o[i] for o in batch.obs])
                if name == behavior and agent_id == controlled:
                    if pending is not None:
                        obs_rows, prev_act = pending
                        records.append(DemoRecord(
                            obs_rows, prev_act, float(batch.rewards[i]),
                            False))
                    pending = ([o[i] for o in batch.obs], act)
                rows[agent_id] = act
            actions[name] = rows
        outcome = academy.academy_step(actions)
    write_demo(args.record, spec, records)
    print(json.dumps({"env": args.env, "episodes": episodes,
                      "records": len(records), "path": args.record}))
    return 0


def cmd_play(args) -> int:
    from .webbridge import serve_play

    serve_play(args.env, _parse_env_params(args.param), seed=args.seed,
               host=args.host, port=args.port, record_path=args.record,
               speed=args.speed)
    return 0


def cmd_benchmark(args) -> int:
    result = run_benchmark(args.env, args.steps, seed=args.seed,
                           port=args.port)
    print(json.dumps(result))
    return 0


def run_benchmark(env_name: str, steps: int, seed: int | None = None,
                  port: int = 0, host="127.0.0.1") -> dict:
    """Latency benchmark: mean/std of a full step exchange over the wire,
    measured from the client side."""
    from .envs import env_names

    if env_name not in env_names():
        raise UnknownEnvironment(env_name)
    if port == 0:
        with socket.socket() as probe:
            probe.bind((host, 0))
            port = probe.getsockname()[1]
    thread = threading.Thread(
        target=serve, args=(env_name,),
        kwargs={"seed": seed, "host": host, "port": port, "max_sessions": 1},
        daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    sock = None
    while time.monotonic() < deadline:
        try:
            sock = socket.create_connection((host, port), timeout=5)
            break
        except OSError:
            time.sleep(0.02)
    if sock is None:
        raise RuntimeError("benchmark server did not come up")

    def exchange(message):
        sock.sendall(codec.encode_message(message))
        return codec.decode_message(read_frame(sock))

    with sock:
        ack = exchange(codec.Hello())
        specs = {s.behavior_name: s for s in ack.behaviors}
        response = exchange(codec.ResetRequest(seed if seed is not None
                                               else -1))
        action_rng = rngmod.stream(seed or 0, "benchmark")
        samples = []
        n_agents = sum(len(b.agent_ids) for b in response.decisions.values())
        obs_type = "/".join(
            sorted({o.modality for s in specs.values() for o in s.obs_specs}))
        while len(samples) < steps:
            request = codec.StepRequest()
            for name, batch in response.decisions.items():
                spec = specs[name]
                n = len(batch.agent_ids)
                if isinstance(spec.action_spec, Discrete):
                    arr = np.stack([
                        action_rng.integers(0, spec.action_spec.branches)
                        for _ in range(n)]).astype("<f4").reshape(n, -1)
                else:
                    arr = action_rng.uniform(
                        -1, 1, (n, spec.action_spec.dim)).astype("<f4")
                request.actions[name] = (list(batch.agent_ids), arr)
            t0 = time.perf_counter()
            response = exchange(request)
            samples.append((time.perf_counter() - t0) * 1000.0)
    thread.join(timeout=5)
    return {"env": env_name, "obs_type": obs_type, "num_agents": n_agents,
            "mean_ms": round(statistics.fmean(samples), 4),
            "std_ms": round(statistics.pstdev(samples), 4)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="agentsim",
        description="multi-agent RL environment platform")
    sub = parser.add_subparsers(dest="command")

    def add_env_flags(p, default_seed=None):
        p.add_argument("--env", required=True)
        p.add_argument("--seed", type=int, default=default_seed)
        p.add_argument("--param", action="append", metavar="KEY=VALUE",
                       help="environment parameter override")

    p = sub.add_parser("serve", help="run the TCP environment server")
    add_env_flags(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("train", help="run a training config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model checkpoint")
    add_env_flags(p, default_seed=0)
    p.add_argument("--model", required=True)
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--behavior")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("record", help="record scripted-expert demos")
    add_env_flags(p, default_seed=0)
    p.add_argument("--episodes", type=int, default=10)
    p.add_argument("--record", required=True, metavar="OUT.agdm")
    p.set_defaults(func=cmd_record)

    p = sub.add_parser("play", help="host the browser play session")
    add_env_flags(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--record", metavar="OUT.agdm")
    p.add_argument("--speed", type=float, default=1.0,
                   help="real-time multiplier; 0 = unthrottled")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("benchmark", help="protocol latency benchmark")
    add_env_flags(p, default_seed=0)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--port", type=int, default=0,
                   help="0 picks an ephemeral port")
    p.set_defaults(func=cmd_benchmark)
    return parser


def run_cli(argv=None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "func", None):
        parser.print_usage()
        return 1
    try:
        return args.func(args)
    except UnknownEnvironment as exc:
        print(f"unknown environment: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 0
    except Exception as exc:  # runtime failure
        log.error("%s: %s", type(exc).__name__, exc)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
