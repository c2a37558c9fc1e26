"""Standalone client for the environment wire protocol.

Implements the framed binary codec independently of the server package and
offers two API levels: ClientSession (connect / reset / step / close with
per-behavior decision and terminal batches) and gym_adapter (single-agent
reset/step convention).
"""

from .gym_adapter import GymAdapter, NotSingleAgent, gym_adapter
from .session import (
    ClientSession,
    ProtocolOrderViolation,
    ServerError,
    VersionMismatch,
    connect,
)
from .wire import (
    ActionSpec,
    Batch,
    BehaviorManifest,
    ObsSpec,
    WireError,
    decode,
    encode_env_params,
    frame,
)

__all__ = [
    "ActionSpec", "Batch", "BehaviorManifest", "ClientSession", "GymAdapter",
    "NotSingleAgent", "ObsSpec", "ProtocolOrderViolation", "ServerError",
    "VersionMismatch", "WireError", "connect", "decode", "encode_env_params",
    "frame", "gym_adapter",
]
