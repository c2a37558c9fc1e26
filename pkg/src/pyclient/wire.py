"""Client-side implementation of the framed binary wire format.

Written against the byte layout alone (u32 little-endian length prefix, one
type byte, fixed little-endian fields); deliberately shares no code with the
server-side codec so the golden-byte tests pin the format from two sides.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

VERSION = 1

T_PING = 0x00
T_HELLO = 0x01
T_HELLO_ACK = 0x02
T_RESET = 0x03
T_STEP_REQUEST = 0x04
T_STEP_RESPONSE = 0x05
T_SIDE_CHANNEL = 0x06
T_ERROR = 0x07

ENV_PARAMS_CHANNEL = 0x01

MODALITIES = ("vector", "raycast", "visual")


class WireError(Exception):
    """Any malformed, truncated, or unknown frame."""


@dataclass(frozen=True)
class ObsSpec:
    modality: str
    shape: tuple[int, ...]
    stack: int


@dataclass(frozen=True)
class ActionSpec:
    kind: str  # "discrete" | "continuous"
    branches: tuple[int, ...] = ()  # discrete
    dim: int = 0  # continuous

    @property
    def row_size(self) -> int:
        return len(self.branches) if self.kind == "discrete" else self.dim


@dataclass(frozen=True)
class BehaviorManifest:
    name: str
    obs_specs: tuple[ObsSpec, ...]
    action_spec: ActionSpec


@dataclass
class Batch:
    agent_ids: list[int]
    rewards: np.ndarray
    obs: list[np.ndarray]
    interrupted: np.ndarray | None = None


@dataclass
class Decoded:
    type: int
    # populated per type:
    protocol_version: int = 0
    capabilities: int = 0
    behaviors: tuple[BehaviorManifest, ...] = ()
    seed: int = 0
    decisions: dict[str, Batch] = field(default_factory=dict)
    terminals: dict[str, Batch] = field(default_factory=dict)
    channel_id: int = 0
    body: bytes = b""
    code: int = 0
    message: str = ""


# -- encoding ------------------------------------------------------------

def _str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack("<H", len(raw)) + raw


def _tensor(arr: np.ndarray) -> bytes:
    arr = np.ascontiguousarray(arr, dtype="<f4")
    head = struct.pack("<B", arr.ndim)
    head += b"".join(struct.pack("<i", d) for d in arr.shape)
    return head + arr.tobytes()


def frame(payload: bytes) -> bytes:
    return struct.pack("<I", len(payload)) + payload


def encode_ping() -> bytes:
    return frame(bytes([T_PING]))


def encode_hello(version: int = VERSION, capabilities: int = 0) -> bytes:
    return frame(bytes([T_HELLO]) + struct.pack("<HI", version, capabilities))


def encode_reset(seed: int = -1) -> bytes:
    return frame(bytes([T_RESET]) + struct.pack("<q", seed))


def encode_step(actions: dict[str, tuple[list[int], np.ndarray]]) -> bytes:
    out = bytes([T_STEP_REQUEST]) + struct.pack("<H", len(actions))
    for name, (agent_ids, arr) in actions.items():
        out += _str(name) + struct.pack("<H", len(agent_ids))
        out += b"".join(struct.pack("<i", a) for a in agent_ids)
        out += _tensor(arr)
    return frame(out)


def encode_side_channel(channel_id: int, body: bytes) -> bytes:
    return frame(bytes([T_SIDE_CHANNEL, channel_id]) + body)


def encode_env_params(params: dict[str, float]) -> bytes:
    body = struct.pack("<H", len(params))
    for key, value in params.items():
        body += _str(key) + struct.pack("<f", value)
    return body


# -- decoding ------------------------------------------------------------

class _Cursor:
    def __init__(self, data: bytes):
        self.view = memoryview(data)
        self.at = 0

    def bytes_(self, n: int) -> bytes:
        if self.at + n > len(self.view):
            raise WireError("frame body too short")
        out = bytes(self.view[self.at:self.at + n])
        self.at += n
        return out

    def unpack(self, fmt: str):
        (value,) = struct.unpack(fmt, self.bytes_(struct.calcsize(fmt)))
        return value

    def string(self) -> str:
        n = self.unpack("<H")
        try:
            return self.bytes_(n).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WireError("bad utf-8 string") from exc

    def tensor(self) -> np.ndarray:
        rank = self.unpack("<B")
        if rank > 8:
            raise WireError(f"tensor rank {rank}")
        dims = [self.unpack("<i") for _ in range(rank)]
        if any(d < 0 for d in dims):
            raise WireError(f"negative tensor dim in {dims}")
        count = 1
        for d in dims:
            count *= d
        if count > 100_000_000:
            raise WireError("tensor too large")
        raw = self.bytes_(4 * count)
        return np.frombuffer(raw, dtype="<f4").reshape(dims).copy()

    def remainder(self) -> bytes:
        out = bytes(self.view[self.at:])
        self.at = len(self.view)
        return out

    def finish(self) -> None:
        if self.at != len(self.view):
            raise WireError(f"{len(self.view) - self.at} trailing bytes")


def _manifest(c: _Cursor) -> BehaviorManifest:
    name = c.string()
    obs = []
    for _ in range(c.unpack("<B")):
        modality = c.unpack("<B")
        if modality >= len(MODALITIES):
            raise WireError(f"modality {modality}")
        stack = c.unpack("<B")
        shape = tuple(c.unpack("<i") for _ in range(c.unpack("<B")))
        obs.append(ObsSpec(MODALITIES[modality], shape, stack))
    kind = c.unpack("<B")
    if kind == 0:
        branches = tuple(c.unpack("<i") for _ in range(c.unpack("<B")))
        action = ActionSpec("discrete", branches=branches)
    elif kind == 1:
        action = ActionSpec("continuous", dim=c.unpack("<i"))
    else:
        raise WireError(f"action kind {kind}")
    return BehaviorManifest(name, tuple(obs), action)


def _batch(c: _Cursor, terminal: bool) -> Batch:
    n = c.unpack("<H")
    agent_ids = [c.unpack("<i") for _ in range(n)]
    rewards = c.tensor()
    interrupted = None
    if terminal:
        interrupted = np.array([b != 0 for b in c.bytes_(n)], dtype=bool)
    obs = [c.tensor() for _ in range(c.unpack("<B"))]
    return Batch(agent_ids, rewards, obs, interrupted)


def decode(data: bytes) -> tuple[Decoded, int]:
    """Decode one frame at the head of `data` → (message, bytes used)."""
    if len(data) < 4:
        raise WireError("need 4-byte length prefix")
    (length,) = struct.unpack("<I", data[:4])
    if length < 1:
        raise WireError("empty frame payload")
    if len(data) < 4 + length:
        raise WireError("incomplete frame")
    payload = data[4:4 + length]
    mtype = payload[0]
    c = _Cursor(payload[1:])
    msg = Decoded(mtype)
    if mtype == T_PING:
        pass
    elif mtype == T_HELLO:
        msg.protocol_version = c.unpack("<H")
        msg.capabilities = c.unpack("<I")
    elif mtype == T_HELLO_ACK:
        msg.protocol_version = c.unpack("<H")
        msg.capabilities = c.unpack("<I")
        msg.behaviors = tuple(_manifest(c) for _ in range(c.unpack("<H")))
    elif mtype == T_RESET:
        msg.seed = c.unpack("<q")
    elif mtype == T_STEP_RESPONSE:
        for _ in range(c.unpack("<H")):
            name = c.string()
            msg.decisions[name] = _batch(c, terminal=False)
        for _ in range(c.unpack("<H")):
            name = c.string()
            msg.terminals[name] = _batch(c, terminal=True)
    elif mtype == T_SIDE_CHANNEL:
        msg.channel_id = c.unpack("<B")
        msg.body = c.remainder()
    elif mtype == T_ERROR:
        msg.code = c.unpack("<H")
        msg.message = c.string()
    else:
        raise WireError(f"unknown message type 0x{mtype:02x}")
    c.finish()
    return msg, 4 + length
