"""Framed binary wire format: u32 little-endian length prefix, one-byte
message type, fixed little-endian field layouts.

All layouts here are normative and bit-exact; the decoder never raises
anything but Truncated / UnknownType / MalformedBody on hostile input.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from io import BytesIO

import numpy as np

from ..kernel import BehaviorSpec, Continuous, Discrete
from ..sensors import ObservationSpec

PROTOCOL_VERSION = 1

MSG_PING = 0x00
MSG_HELLO = 0x01
MSG_HELLO_ACK = 0x02
MSG_RESET = 0x03
MSG_STEP_REQUEST = 0x04
MSG_STEP_RESPONSE = 0x05
MSG_SIDE_CHANNEL = 0x06
MSG_ERROR = 0x07

CHANNEL_ENV_PARAMS = 0x01

ERR_VERSION_MISMATCH = 1
ERR_PROTOCOL_ORDER = 2
ERR_MISSING_ACTION = 3
ERR_MALFORMED = 4
ERR_UNKNOWN_TYPE = 5
ERR_INTERNAL = 6

_MODALITIES = ("vector", "raycast", "visual")


class Truncated(Exception):
    pass


class UnknownType(Exception):
    pass


class MalformedBody(Exception):
    pass


# -- messages ------------------------------------------------------------

@dataclass(frozen=True)
class Ping:
    pass


@dataclass(frozen=True)
class Hello:
    protocol_version: int = PROTOCOL_VERSION
    capabilities: int = 0


@dataclass(frozen=True)
class HelloAck:
    protocol_version: int
    capabilities: int
    behaviors: tuple[BehaviorSpec, ...]


@dataclass(frozen=True)
class ResetRequest:
    seed: int = -1  # -1: let the server draw one


@dataclass
class StepRequest:
    # behavior -> (agent_ids list, actions float32 [n, action_size])
    actions: dict[str, tuple[list[int], np.ndarray]] = field(
        default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, StepRequest):
            return NotImplemented
        if self.actions.keys() != other.actions.keys():
            return False
        for k in self.actions:
            ids_a, arr_a = self.actions[k]
            ids_b, arr_b = other.actions[k]
            if ids_a != ids_b or not np.array_equal(arr_a, arr_b):
                return False
        return True


@dataclass
class BatchPayload:
    agent_ids: list[int]
    rewards: np.ndarray
    obs: list[np.ndarray]
    interrupted: np.ndarray | None = None  # terminals only

    def __eq__(self, other):
        if not isinstance(other, BatchPayload):
            return NotImplemented
        return (self.agent_ids == other.agent_ids
                and np.array_equal(self.rewards, other.rewards)
                and len(self.obs) == len(other.obs)
                and all(np.array_equal(a, b)
                        for a, b in zip(self.obs, other.obs))
                and ((self.interrupted is None) == (other.interrupted is None))
                and (self.interrupted is None
                     or np.array_equal(self.interrupted, other.interrupted)))


@dataclass
class StepResponse:
    decisions: dict[str, BatchPayload] = field(default_factory=dict)
    terminals: dict[str, BatchPayload] = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, StepResponse):
            return NotImplemented
        return (self.decisions == other.decisions
                and self.terminals == other.terminals)


@dataclass(frozen=True)
class SideChannel:
    channel_id: int
    body: bytes


@dataclass(frozen=True)
class ErrorMsg:
    code: int
    message: str


Message = (Ping | Hello | HelloAck | ResetRequest | StepRequest
           | StepResponse | SideChannel | ErrorMsg)


# -- primitive writers/readers ------------------------------------------

def _w_str(out: BytesIO, s: str) -> None:
    data = s.encode("utf-8")
    out.write(struct.pack("<H", len(data)))
    out.write(data)


def _w_tensor(out: BytesIO, arr: np.ndarray) -> None:
    arr = np.ascontiguousarray(arr, dtype="<f4")
    out.write(struct.pack("<B", arr.ndim))
    for d in arr.shape:
        out.write(struct.pack("<i", d))
    out.write(arr.tobytes())


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise MalformedBody("body ran out of bytes")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u8(self):
        return self.take(1)[0]

    def u16(self):
        return struct.unpack("<H", self.take(2))[0]

    def u32(self):
        return struct.unpack("<I", self.take(4))[0]

    def i32(self):
        return struct.unpack("<i", self.take(4))[0]

    def i64(self):
        return struct.unpack("<q", self.take(8))[0]

    def f32(self):
        return struct.unpack("<f", self.take(4))[0]

    def string(self) -> str:
        n = self.u16()
        try:
            return self.take(n).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedBody("bad utf-8") from exc

    def tensor(self) -> np.ndarray:
        rank = self.u8()
        if rank > 8:
            raise MalformedBody(f"tensor rank {rank}")
        dims = [self.i32() for _ in range(rank)]
        if any(d < 0 for d in dims) or int(np.prod(dims)) > 100_000_000:
            raise MalformedBody(f"bad tensor dims {dims}")
        count = int(np.prod(dims)) if dims else 1
        raw = self.take(4 * count)
        return np.frombuffer(raw, dtype="<f4").reshape(dims).copy()

    def done(self) -> None:
        if self.pos != len(self.data):
            raise MalformedBody(f"{len(self.data) - self.pos} trailing bytes")


# -- behavior spec layout -----------------------------------------------

def _w_behavior_spec(out: BytesIO, spec: BehaviorSpec) -> None:
    _w_str(out, spec.behavior_name)
    out.write(struct.pack("<B", len(spec.obs_specs)))
    for ospec in spec.obs_specs:
        out.write(struct.pack("<B", _MODALITIES.index(ospec.modality)))
        out.write(struct.pack("<B", ospec.stack))
        out.write(struct.pack("<B", len(ospec.shape)))
        for d in ospec.shape:
            out.write(struct.pack("<i", d))
    if isinstance(spec.action_spec, Discrete):
        out.write(struct.pack("<B", 0))
        out.write(struct.pack("<B", len(spec.action_spec.branches)))
        for b in spec.action_spec.branches:
            out.write(struct.pack("<i", b))
    else:
        out.write(struct.pack("<B", 1))
        out.write(struct.pack("<i", spec.action_spec.dim))


def _r_behavior_spec(r: _Reader) -> BehaviorSpec:
    name = r.string()
    n_obs = r.u8()
    obs_specs = []
    for _ in range(n_obs):
        modality_idx = r.u8()
        if modality_idx >= len(_MODALITIES):
            raise MalformedBody(f"modality {modality_idx}")
        stack = r.u8()
        rank = r.u8()
        shape = tuple(r.i32() for _ in range(rank))
        try:
            obs_specs.append(ObservationSpec(_MODALITIES[modality_idx],
                                             shape, stack))
        except ValueError as exc:
            raise MalformedBody(str(exc)) from exc
    kind = r.u8()
    try:
        if kind == 0:
            n = r.u8()
            action = Discrete(tuple(r.i32() for _ in range(n)))
        elif kind == 1:
            action = Continuous(r.i32())
        else:
            raise MalformedBody(f"action kind {kind}")
        return BehaviorSpec(name, tuple(obs_specs), action)
    except ValueError as exc:
        raise MalformedBody(str(exc)) from exc


def _w_batch(out: BytesIO, batch: BatchPayload, terminal: bool) -> None:
    out.write(struct.pack("<H", len(batch.agent_ids)))
    for agent_id in batch.agent_ids:
        out.write(struct.pack("<i", agent_id))
    _w_tensor(out, np.asarray(batch.rewards, dtype="<f4"))
    if terminal:
        out.write(bytes(int(x) for x in batch.interrupted))
    out.write(struct.pack("<B", len(batch.obs)))
    for arr in batch.obs:
        _w_tensor(out, arr)


def _r_batch(r: _Reader, terminal: bool) -> BatchPayload:
    n = r.u16()
    agent_ids = [r.i32() for _ in range(n)]
    rewards = r.tensor()
    interrupted = None
    if terminal:
        interrupted = np.array([bool(b) for b in r.take(n)], dtype=bool)
    n_obs = r.u8()
    obs = [r.tensor() for _ in range(n_obs)]
    return BatchPayload(agent_ids, rewards, obs, interrupted)


# -- top-level encode/decode --------------------------------------------

def encode_message(message: Message) -> bytes:
    out = BytesIO()
    if isinstance(message, Ping):
        mtype = MSG_PING
    elif isinstance(message, Hello):
        mtype = MSG_HELLO
        out.write(struct.pack("<HI", message.protocol_version,
                              message.capabilities))
    elif isinstance(message, HelloAck):
        mtype = MSG_HELLO_ACK
        out.write(struct.pack("<HI", message.protocol_version,
                              message.capabilities))
        out.write(struct.pack("<H", len(message.behaviors)))
        for spec in message.behaviors:
            _w_behavior_spec(out, spec)
    elif isinstance(message, ResetRequest):
        mtype = MSG_RESET
        out.write(struct.pack("<q", message.seed))
    elif isinstance(message, StepRequest):
        mtype = MSG_STEP_REQUEST
        out.write(struct.pack("<H", len(message.actions)))
        for name in message.actions:
            agent_ids, arr = message.actions[name]
            _w_str(out, name)
            out.write(struct.pack("<H", len(agent_ids)))
            for agent_id in agent_ids:
                out.write(struct.pack("<i", agent_id))
            _w_tensor(out, arr)
    elif isinstance(message, StepResponse):
        mtype = MSG_STEP_RESPONSE
        out.write(struct.pack("<H", len(message.decisions)))
        for name, batch in message.decisions.items():
            _w_str(out, name)
            _w_batch(out, batch, terminal=False)
        out.write(struct.pack("<H", len(message.terminals)))
        for name, batch in message.terminals.items():
            _w_str(out, name)
            _w_batch(out, batch, terminal=True)
    elif isinstance(message, SideChannel):
        mtype = MSG_SIDE_CHANNEL
        out.write(struct.pack("<B", message.channel_id))
        out.write(message.body)
    elif isinstance(message, ErrorMsg):
        mtype = MSG_ERROR
        out.write(struct.pack("<H", message.code))
        _w_str(out, message.message)
    else:
        raise TypeError(f"cannot encode {type(message)}")
    payload = bytes([mtype]) + out.getvalue()
    return struct.pack("<I", len(payload)) + payload


def decode_frame(data: bytes) -> tuple[Message, int]:
    """Decode one frame from the head of `data`; returns (message,
    bytes consumed).  Raises Truncated when more bytes are needed."""
    if len(data) < 4:
        raise Truncated("need length prefix")
    (length,) = struct.unpack("<I", data[:4])
    if length < 1:
        raise MalformedBody("empty payload")
    if length > 256 * 1024 * 1024:
        raise MalformedBody(f"frame length {length} too large")
    if len(data) < 4 + length:
        raise Truncated(f"need {4 + length} bytes, have {len(data)}")
    payload = data[4:4 + length]
    return decode_payload(payload), 4 + length


def decode_message(data: bytes) -> Message:
    """Decode exactly one frame; trailing bytes are malformed."""
    message, used = decode_frame(data)
    if used != len(data):
        raise MalformedBody("trailing bytes after frame")
    return message


def decode_payload(payload: bytes) -> Message:
    mtype = payload[0]
    r = _Reader(payload[1:])
    if mtype == MSG_PING:
        message = Ping()
    elif mtype == MSG_HELLO:
        message = Hello(r.u16(), r.u32())
    elif mtype == MSG_HELLO_ACK:
        version, caps = r.u16(), r.u32()
        n = r.u16()
        message = HelloAck(version, caps,
                           tuple(_r_behavior_spec(r) for _ in range(n)))
    elif mtype == MSG_RESET:
        message = ResetRequest(r.i64())
    elif mtype == MSG_STEP_REQUEST:
        n = r.u16()
        actions = {}
        for _ in range(n):
            name = r.string()
            count = r.u16()
            agent_ids = [r.i32() for _ in range(count)]
            actions[name] = (agent_ids, r.tensor())
        message = StepRequest(actions)
    elif mtype == MSG_STEP_RESPONSE:
        decisions = {}
        for _ in range(r.u16()):
            name = r.string()
            decisions[name] = _r_batch(r, terminal=False)
        terminals = {}
        for _ in range(r.u16()):
            name = r.string()
            terminals[name] = _r_batch(r, terminal=True)
        message = StepResponse(decisions, terminals)
    elif mtype == MSG_SIDE_CHANNEL:
        channel_id = r.u8()
        message = SideChannel(channel_id, r.data[r.pos:])
        return message  # remainder consumed as the body
    elif mtype == MSG_ERROR:
        message = ErrorMsg(r.u16(), r.string())
    else:
        raise UnknownType(f"message type 0x{mtype:02x}")
    r.done()
    return message


# -- environment-parameter side channel ---------------------------------

def encode_env_params(entries: list[tuple[str, float]]) -> bytes:
    out = BytesIO()
    out.write(struct.pack("<H", len(entries)))
    for key, value in entries:
        _w_str(out, key)
        out.write(struct.pack("<f", value))
    return out.getvalue()


def decode_env_params(body: bytes) -> list[tuple[str, float]]:
    r = _Reader(body)
    n = r.u16()
    entries = [(r.string(), r.f32()) for _ in range(n)]
    r.done()
    return entries
