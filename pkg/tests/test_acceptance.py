"""End-to-end acceptance gate: every top-level quantitative target gets one
test that prints a single PASS/FAIL line with the measured value.

These run real training; expect several minutes of wall clock on one CPU
core.  Budget ceilings (steps, minutes) are part of each criterion."""

import json
import os
import time

import numpy as np
import pytest

from agentsim.cli import run_benchmark, run_cli
from agentsim.envs import make_env
from agentsim.protocol import codec
from agentsim.trainer import LessonPlan, Lesson, PolicyValueNet, gae
from agentsim.trainer.run import TrainConfig, evaluate, load_model, train_run

import conftest
from test_protocol import random_message
from test_trainer import gae_bruteforce, scalar_loss, suite_topologies


def report(ok: bool, text: str) -> None:
    line = f"[ACCEPTANCE] {'PASS' if ok else 'FAIL'}: {text}"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)


@pytest.fixture()
def run_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("AGENTSIM_LOG_DIR", str(tmp_path / "runs"))
    return tmp_path


def _train(config: TrainConfig) -> tuple[dict, float, str]:
    t0 = time.monotonic()
    run_dir = train_run(config)
    elapsed = time.monotonic() - t0
    with open(os.path.join(run_dir, "report.json")) as fh:
        return json.load(fh), elapsed, run_dir


# -- policy-score criteria ----------------------------------------------

def test_basic_ppo_30k(run_dir_env):
    result, elapsed, _ = _train(TrainConfig(
        env="Basic", total_steps=30_000, seed=0, eval_episodes=100))
    mean = result["final_eval_mean"]
    ok = mean >= 0.90 and elapsed < 120
    report(ok, f"Basic PPO eval mean {mean:.3f} (>= 0.90) in 30k steps, "
               f"{elapsed:.0f}s (< 120s)")
    assert ok


def test_gridworld_visual_ppo_300k(run_dir_env):
    result, elapsed, _ = _train(TrainConfig(
        env="GridWorld", total_steps=300_000, seed=0, eval_episodes=100))
    mean = result["final_eval_mean"]
    ok = mean >= 0.85 and elapsed < 900
    report(ok, f"GridWorld(5x5) visual PPO eval mean {mean:.3f} (>= 0.85) "
               f"in 300k steps, {elapsed:.0f}s (< 900s)")
    assert ok


def test_pushblock_raycast_ppo_within_1m(run_dir_env):
    result, elapsed, _ = _train(TrainConfig(
        env="PushBlock", total_steps=400_000, seed=0, eval_episodes=100))
    mean = result["final_eval_mean"]
    ok = mean >= 3.5 and elapsed < 2400
    report(ok, f"PushBlock raycast PPO eval mean {mean:.3f} (>= 3.5) "
               f"in 400k of the allowed 1M steps, {elapsed:.0f}s (< 2400s)")
    assert ok


def test_hallway_stacked_ppo_icm_within_2m(run_dir_env):
    result, _, _ = _train(TrainConfig(
        env="Hallway", total_steps=2_000_000, seed=0, eval_episodes=100,
        icm={"enabled": True, "eta": 0.001}))
    mean = result["final_eval_mean"]
    ok = mean >= 0.3
    report(ok, f"Hallway PPO+stacking+ICM eval mean {mean:.3f} (>= 0.3) "
               "within 2M steps")
    assert ok


def test_tennis_selfplay_elo(run_dir_env):
    result, _, run_dir = _train(TrainConfig(
        env="Tennis", total_steps=500_000, seed=0,
        self_play={"enabled": True}))
    elo = result["final_elo"]["Tennis"]
    events = [json.loads(line)
              for line in open(os.path.join(run_dir, "elo_events.ndjson"))]
    drift = max(abs(sum(e["elo_after"]) - sum(e["elo_before"]))
                for e in events)
    ok = elo > 1250 and drift <= 1e-9 and len(events) > 0
    report(ok, f"Tennis self-play ELO {elo:.1f} (> 1250) after 500k steps; "
               f"zero-sum drift {drift:.2e} (<= 1e-9) over "
               f"{len(events)} updates")
    assert ok


def test_bc_from_200_scripted_episodes(run_dir_env, tmp_path):
    demo_path = str(tmp_path / "basic200.agdm")
    assert run_cli(["record", "--env", "Basic", "--episodes", "200",
                    "--record", demo_path]) == 0
    result, _, _ = _train(TrainConfig(
        env="Basic", algorithm="bc", seed=0, demo_path=demo_path,
        eval_episodes=100))
    agreement = result["holdout_agreement"]
    mean = result["final_eval_mean"]
    ok = agreement >= 0.95 and mean >= 0.85
    report(ok, f"BC on 200 scripted episodes: held-out agreement "
               f"{agreement:.3f} (>= 0.95), eval mean {mean:.3f} (>= 0.85) "
               "with no RL steps")
    assert ok


# -- numerical criteria --------------------------------------------------

def test_gradient_finite_difference_suite():
    rng = np.random.default_rng(20_240_817)
    h = 1e-4
    worst = 0.0
    topos = suite_topologies()
    for topo in topos:
        for _ in range(10):
            net = PolicyValueNet(topo, rng=rng, dtype=np.float64)
            x = rng.normal(size=(5, topo.input_size))
            if net.discrete:
                actions = np.stack(
                    [rng.integers(0, b, 5)
                     for b in topo.action_spec.branches], axis=1)
            else:
                actions = rng.uniform(-0.9, 0.9, (5, topo.action_spec.dim))
            coeffs = [rng.normal(size=5) for _ in range(3)]
            cache = net.forward(x)
            grad = net.backward(cache, actions, *coeffs)
            for c in rng.choice(net.n_params, size=64, replace=False):
                saved = net.params[c]
                net.params[c] = saved + h
                up = scalar_loss(net, x, actions, *coeffs)
                net.params[c] = saved - h
                down = scalar_loss(net, x, actions, *coeffs)
                net.params[c] = saved
                fd = (up - down) / (2 * h)
                rel = abs(grad[c] - fd) / max(abs(grad[c]), abs(fd), 1e-6)
                worst = max(worst, rel)
    ok = worst < 1e-4
    report(ok, f"gradient suite: worst relative error {worst:.2e} (< 1e-4) "
               f"over 64 coords x 10 nets x {len(topos)} topologies")
    assert ok


def test_gae_oracle_and_monte_carlo_identity():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 60))
        rewards = rng.normal(size=n)
        values = rng.normal(size=n)
        dones = rng.random(n) < 0.15
        bootstrap = float(rng.normal())
        gamma = float(rng.uniform(0.8, 1.0))
        lam = float(rng.uniform(0.0, 1.0))
        adv, ret = gae(rewards, values, dones, bootstrap, gamma, lam)
        adv_ref = gae_bruteforce(rewards, values, dones, bootstrap,
                                 gamma, lam)
        worst = max(worst, float(np.max(np.abs(adv - adv_ref))),
                    float(np.max(np.abs(ret - (adv_ref + values)))))
    mc_ok = True
    for _ in range(200):
        n = int(rng.integers(1, 40))
        rewards = rng.normal(size=n)
        values = rng.normal(size=n)
        dones = np.zeros(n, dtype=bool)
        dones[-1] = True
        gamma = float(rng.uniform(0.8, 1.0))
        adv, ret = gae(rewards, values, dones, 0.0, gamma, 1.0)
        mc = np.array([sum(rewards[k] * gamma ** (k - t)
                           for k in range(t, n)) for t in range(n)])
        mc_ok &= bool(np.allclose(adv, mc - values, atol=1e-5))
    ok = worst < 1e-5 and mc_ok
    report(ok, f"GAE oracle: max abs deviation {worst:.2e} (< 1e-5) over "
               f"1000 sequences; lambda=1 Monte-Carlo identity "
               f"{'holds' if mc_ok else 'violated'}")
    assert ok


# -- protocol criteria ---------------------------------------------------

def test_protocol_fuzz_golden_and_latency():
    rng = np.random.default_rng(999)
    crashes = 0
    for _ in range(10_000):
        message = random_message(rng)
        if codec.decode_message(codec.encode_message(message)) != message:
            crashes += 1
    # golden-byte fixtures for every message type live in test_protocol;
    # run them here so this criterion reports one consolidated line
    import test_protocol as tp
    golden_ok = True
    try:
        tp.test_golden_ping()
        tp.test_golden_hello()
        tp.test_golden_hello_ack()
        tp.test_golden_reset_request()
        tp.test_golden_step_request()
        tp.test_golden_step_response_empty()
        tp.test_golden_side_channel()
        tp.test_golden_error()
    except AssertionError:
        golden_ok = False
    bench = run_benchmark("Basic", 1000, seed=0)
    ok = crashes == 0 and golden_ok and bench["mean_ms"] < 5.0
    report(ok, f"protocol: 10k fuzz roundtrips with {crashes} mismatches; "
               f"golden bytes {'pinned' if golden_ok else 'BROKEN'}; Basic "
               f"exchange {bench['mean_ms']:.3f} ms mean over 1000 steps "
               "(< 5 ms)")
    assert ok


# -- reproducibility and curricula --------------------------------------

def test_training_determinism_byte_identical(run_dir_env):
    config = dict(env="Basic", total_steps=10_000, seed=123,
                  eval_episodes=10)
    _, _, dir_a = _train(TrainConfig(**config))
    _, _, dir_b = _train(TrainConfig(**config))
    bytes_a = open(os.path.join(dir_a, "metrics.ndjson"), "rb").read()
    bytes_b = open(os.path.join(dir_b, "metrics.ndjson"), "rb").read()
    ok = bytes_a == bytes_b and len(bytes_a) > 0
    report(ok, f"determinism: identical config+seed reruns produce "
               f"byte-identical metrics logs ({len(bytes_a)} bytes)")
    assert ok


def test_curriculum_advancement_and_split_eval(run_dir_env):
    plan = LessonPlan((
        Lesson({"grid_size": 5}, threshold=0.8, min_lesson_length=3),
        Lesson({"grid_size": 7}, threshold=0.8, min_lesson_length=3),
        Lesson({"grid_size": 9}, threshold=float("inf")),
    ))
    sizes = [plan.current.parameters["grid_size"]]
    for reward in [0.9, 0.9, 0.9,   # clears lesson 1 at episode 3
                   0.5, 0.9, 0.9, 0.9,  # dips, then clears lesson 2
                   0.95, 0.95, 0.95]:  # final lesson is absorbing
        plan.record_episode(reward)
        if plan.advance():
            sizes.append(plan.current.parameters["grid_size"])
    advance_ok = sizes == [5, 7, 9] and plan.lesson_index == 2

    result, _, run_dir = _train(TrainConfig(
        env="GridWorld", total_steps=15_000, seed=0, eval_episodes=10,
        curriculum=[{"parameters": {"grid_size": 5}, "threshold": 0.5,
                     "min_lesson_length": 5},
                    {"parameters": {"grid_size": 7}}]))
    topo, params = load_model(os.path.join(run_dir, "model_GridWorld.agnn"))
    net = PolicyValueNet(topo, params=params)
    split_ok = True
    for params_split in ({"grid_size": 5}, {"grid_size": 7},
                         {"grid_size": 6}):  # held-out size
        mean, _, _ = evaluate("GridWorld", params_split,
                              {"GridWorld": net}, 5, 0, "GridWorld")
        split_ok &= np.isfinite(mean)
    ok = advance_ok and split_ok
    report(ok, f"curriculum: lesson sizes advanced {sizes} "
               "(expected [5, 7, 9]); train/test grid-size splits "
               f"evaluate {'cleanly' if split_ok else 'with errors'}")
    assert ok
