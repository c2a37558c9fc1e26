"""Record scripted-expert demonstrations and clone them with supervised
learning: no reward signal is used, only (observation, action) pairs.

The cloned policy is then evaluated greedily in the environment.
"""

import json
import tempfile

from agentsim.cli import run_cli
from agentsim.trainer.run import TrainConfig, train_run

with tempfile.TemporaryDirectory() as tmp:
    demo_path = f"{tmp}/basic_expert.agdm"
    run_cli(["record", "--env", "Basic", "--episodes", "50",
             "--record", demo_path])

    config = TrainConfig(env="Basic", algorithm="bc", seed=0,
                         eval_episodes=100, demo_path=demo_path,
                         bc_epochs=20)
    run_dir = train_run(config)
    report = json.load(open(f"{run_dir}/report.json"))

print(f"held-out action agreement: {report['holdout_agreement']:.3f}")
print(f"greedy eval of the cloned policy: {report['final_eval_mean']:.3f}")
