"""agentsim: deterministic multi-agent 2D RL environment platform.

Headless simulation kernel (Academy/agents/sensors), a suite of seven
benchmark environments, a framed binary wire protocol with a TCP server,
and an in-process trainer (PPO+GAE, BC, ICM, self-play with ELO,
curricula).
"""

from .kernel import (
    Academy,
    AgentHandle,
    BehaviorSpec,
    Continuous,
    DecisionBatch,
    Discrete,
    StepOutcome,
    TerminalBatch,
)
from .sensors import ObservationSpec, RaycastConfig
from .envs import env_names, make_env, scripted_policy

__version__ = "0.1.0"

__all__ = [
    "Academy", "AgentHandle", "BehaviorSpec", "Continuous", "DecisionBatch",
    "Discrete", "StepOutcome", "TerminalBatch", "ObservationSpec",
    "RaycastConfig", "env_names", "make_env", "scripted_policy",
    "__version__",
]
