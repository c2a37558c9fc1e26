"""TCP environment server: one trainer session at a time, strict
request/response alternation over the framed protocol."""

from __future__ import annotations

import logging
import socket
import struct

import numpy as np

from .. import rng as rngmod
from ..envs import make_env
from ..kernel import (
    Academy,
    ActionShapeMismatch,
    MissingAction,
    StepOutcome,
    UnknownBehavior,
)
from . import codec
from .codec import (
    BatchPayload,
    ErrorMsg,
    Hello,
    HelloAck,
    Ping,
    ResetRequest,
    SideChannel,
    StepRequest,
    StepResponse,
)

log = logging.getLogger(__name__)

DEFAULT_PORT = 5004


def outcome_to_response(outcome: StepOutcome) -> StepResponse:
    response = StepResponse()
    for name, batch in outcome.decisions.items():
        response.decisions[name] = BatchPayload(
            list(batch.agent_ids), np.asarray(batch.rewards, dtype="<f4"),
            [np.asarray(o, dtype="<f4") for o in batch.obs])
    for name, batch in outcome.terminals.items():
        response.terminals[name] = BatchPayload(
            list(batch.agent_ids), np.asarray(batch.rewards, dtype="<f4"),
            [np.asarray(o, dtype="<f4") for o in batch.obs],
            np.asarray(batch.interrupted, dtype=bool))
    return response


def request_to_actions(academy: Academy,
                       request: StepRequest) -> dict[str, dict[int, object]]:
    actions: dict[str, dict[int, object]] = {}
    for name, (agent_ids, arr) in request.actions.items():
        spec = academy.behaviors.get(name)
        if spec is None:
            raise UnknownBehavior(name)
        if arr.ndim != 2 or arr.shape[0] != len(agent_ids):
            raise ActionShapeMismatch(f"{name}: tensor {arr.shape}")
        rows = {}
        for i, agent_id in enumerate(agent_ids):
            row = arr[i]
            if hasattr(spec.action_spec, "branches"):
                row = np.round(row).astype(np.int64)
            rows[agent_id] = row
        actions[name] = rows
    return actions


class Session:
    """Protocol state machine for one connected trainer."""

    def __init__(self, academy: Academy):
        self.academy = academy
        self.greeted = False
        self.reset_done = False

    def handle(self, message) -> tuple[list, bool]:
        """Returns (responses, keep_session)."""
        if isinstance(message, Ping):
            return [Ping()], True
        if isinstance(message, Hello):
            if message.protocol_version != codec.PROTOCOL_VERSION:
                return [ErrorMsg(codec.ERR_VERSION_MISMATCH,
                                 f"server speaks version "
                                 f"{codec.PROTOCOL_VERSION}")], False
            self.greeted = True
            caps = message.capabilities & 0  # no optional capabilities yet
            manifest = tuple(self.academy.behaviors[name]
                             for name in sorted(self.academy.behaviors))
            return [HelloAck(codec.PROTOCOL_VERSION, caps, manifest)], True
        if not self.greeted:
            return [ErrorMsg(codec.ERR_PROTOCOL_ORDER,
                             "handshake required first")], True
        if isinstance(message, ResetRequest):
            seed = None if message.seed == -1 else message.seed
            if seed is None:
                seed = rngmod.entropy_seed()
                log.info("reset with entropy seed %d", seed)
            outcome = self.academy.reset(seed)
            self.reset_done = True
            return [outcome_to_response(outcome)], True
        if isinstance(message, StepRequest):
            if not self.reset_done:
                return [ErrorMsg(codec.ERR_PROTOCOL_ORDER,
                                 "StepRequest before ResetRequest")], True
            try:
                actions = request_to_actions(self.academy, message)
                outcome = self.academy.academy_step(actions)
            except (MissingAction, UnknownBehavior,
                    ActionShapeMismatch) as exc:
                return [ErrorMsg(codec.ERR_MISSING_ACTION,
                                 f"{type(exc).__name__}: {exc}")], True
            return [outcome_to_response(outcome)], True
        if isinstance(message, SideChannel):
            if message.channel_id == codec.CHANNEL_ENV_PARAMS:
                try:
                    entries = codec.decode_env_params(message.body)
                except codec.MalformedBody as exc:
                    return [ErrorMsg(codec.ERR_MALFORMED, str(exc))], True
                for key, value in entries:
                    self.academy.set_environment_parameter(key, value)
                return [SideChannel(message.channel_id, b"\x01")], True
            log.warning("ignoring unknown side channel 0x%02x",
                        message.channel_id)
            return [SideChannel(message.channel_id, b"\x00")], True
        return [ErrorMsg(codec.ERR_INTERNAL,
                         f"unhandled message {type(message).__name__}")], True


def read_frame(sock: socket.socket) -> bytes | None:
    """Read one full frame (length prefix included); None on EOF."""
    header = _read_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack("<I", header)
    if length < 1 or length > 256 * 1024 * 1024:
        raise codec.MalformedBody(f"frame length {length}")
    payload = _read_exact(sock, length)
    if payload is None:
        raise codec.Truncated("connection closed mid-frame")
    return header + payload


def _read_exact(sock: socket.socket, n: int) -> bytes | None:
    chunks = []
    remaining = n
    while remaining:
        chunk = sock.recv(remaining)
        if not chunk:
            return None
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def serve(env_name: str, params=None, seed=None, host="127.0.0.1",
          port=DEFAULT_PORT, max_sessions: int | None = None) -> None:
    """Blocking server loop; reconnects allowed after clean close."""
    academy = make_env(env_name, params, seed=seed)
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as listener:
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((host, port))
        listener.listen(1)
        log.info("serving %s on %s:%d", env_name, host, port)
        sessions = 0
        while max_sessions is None or sessions < max_sessions:
            conn, addr = listener.accept()
            sessions += 1
            log.info("session from %s", addr)
            with conn:
                serve_connection(conn, academy)


def serve_connection(conn: socket.socket, academy: Academy) -> None:
    session = Session(academy)
    while True:
        try:
            frame = read_frame(conn)
        except (codec.MalformedBody, codec.Truncated) as exc:
            log.warning("dropping connection: %s", exc)
            return
        if frame is None:
            return
        try:
            message = codec.decode_message(frame)
        except codec.UnknownType as exc:
            conn.sendall(codec.encode_message(
                ErrorMsg(codec.ERR_UNKNOWN_TYPE, str(exc))))
            continue  # unknown types never kill the session
        except (codec.MalformedBody, codec.Truncated) as exc:
            conn.sendall(codec.encode_message(
                ErrorMsg(codec.ERR_MALFORMED, str(exc))))
            continue
        responses, keep = session.handle(message)
        for response in responses:
            conn.sendall(codec.encode_message(response))
        if not keep:
            return
