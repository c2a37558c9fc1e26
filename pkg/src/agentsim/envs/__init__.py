"""Environment registry: seven desk-scale tasks with normative reward
tables, curriculum-ready parameters, and scripted reference policies."""

from __future__ import annotations

import logging

from ..kernel import Academy

log = logging.getLogger(__name__)


class UnknownEnvironment(Exception):
    pass


class NoScriptedExpert(Exception):
    pass


def clamp_param(name: str, value: float, lo: float, hi: float) -> float:
    """Clamp an environment parameter into its valid range, warning once
    per out-of-range read."""
    if value < lo or value > hi:
        log.warning("parameter %s=%s outside [%s, %s]; clamped",
                    name, value, lo, hi)
        return min(max(value, lo), hi)
    return value


def _registry():
    from .basic import BasicEnv
    from .foodcollector import FoodCollectorEnv
    from .gridworld import GridWorldEnv
    from .hallway import HallwayEnv
    from .pushblock import PushBlockEnv
    from .strikers import StrikersVsGoalieEnv
    from .tennis import TennisEnv

    return {
        "Basic": BasicEnv,
        "GridWorld": GridWorldEnv,
        "Hallway": HallwayEnv,
        "PushBlock": PushBlockEnv,
        "FoodCollector": FoodCollectorEnv,
        "Tennis": TennisEnv,
        "StrikersVsGoalie": StrikersVsGoalieEnv,
    }


def env_names() -> list[str]:
    return list(_registry())


def make_env(name: str, params: dict[str, float] | None = None,
             seed: int | None = None) -> Academy:
    """Build a fully initialized Academy for the named environment."""
    registry = _registry()
    if name not in registry:
        raise UnknownEnvironment(name)
    academy = Academy(registry[name](), seed=seed)
    for key, value in (params or {}).items():
        academy.set_environment_parameter(key, value)
    return academy


def scripted_policy(name: str):
    """Deterministic near-optimal policy for demo generation and baselines.

    Returns a function (env, handle, obs) -> action row.
    """
    from . import scripted

    experts = {
        "Basic": scripted.basic_expert,
        "GridWorld": scripted.gridworld_expert,
        "Hallway": scripted.hallway_expert,
        "PushBlock": scripted.pushblock_expert,
        "FoodCollector": scripted.foodcollector_expert,
    }
    if name not in experts:
        if name not in _registry():
            raise UnknownEnvironment(name)
        raise NoScriptedExpert(name)
    return experts[name]
