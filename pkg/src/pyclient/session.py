"""Blocking TCP client session over the wire protocol.

Call order is enforced: connect (handshake) → reset → step*, then close.
One session per connection; not safe for concurrent calls.
"""

from __future__ import annotations

import socket

import numpy as np

from . import wire


class ProtocolOrderViolation(Exception):
    """An API call arrived outside the handshake→reset→step order."""


class VersionMismatch(Exception):
    """Server negotiated an incompatible protocol version."""


class ServerError(Exception):
    """The server answered with an error frame."""

    def __init__(self, code: int, message: str):
        super().__init__(f"server error {code}: {message}")
        self.code = code


class ClientSession:
    """One negotiated session.  Use `connect()` to construct."""

    def __init__(self, sock: socket.socket):
        self._sock = sock
        self._buffer = b""
        self.protocol_version: int | None = None
        self.behaviors: dict[str, wire.BehaviorManifest] = {}
        self._ready = False  # reset() has produced a decision batch
        self._pending: dict[str, list[int]] = {}

    # -- wire plumbing ----------------------------------------------------

    def _send(self, data: bytes) -> None:
        self._sock.sendall(data)

    def _recv(self) -> wire.Decoded:
        while True:
            try:
                message, used = wire.decode(self._buffer)
            except wire.WireError as exc:
                if "length prefix" not in str(exc) and \
                        "incomplete" not in str(exc):
                    raise
            else:
                self._buffer = self._buffer[used:]
                if message.type == wire.T_ERROR:
                    raise ServerError(message.code, message.message)
                return message
            chunk = self._sock.recv(65536)
            if not chunk:
                raise ConnectionError("server closed the connection")
            self._buffer += chunk

    # -- API --------------------------------------------------------------

    def handshake(self, env_params: dict[str, float] | None = None) -> None:
        if self.protocol_version is not None:
            raise ProtocolOrderViolation("handshake already done")
        self._send(wire.encode_hello())
        ack = self._recv()
        if ack.type != wire.T_HELLO_ACK:
            raise ProtocolOrderViolation(
                f"expected handshake ack, got type 0x{ack.type:02x}")
        if ack.protocol_version != wire.VERSION:
            raise VersionMismatch(
                f"server speaks {ack.protocol_version}, client {wire.VERSION}")
        self.protocol_version = ack.protocol_version
        self.behaviors = {m.name: m for m in ack.behaviors}
        if env_params:
            self._send(wire.encode_side_channel(
                wire.ENV_PARAMS_CHANNEL, wire.encode_env_params(env_params)))
            ack = self._recv()
            if ack.type != wire.T_SIDE_CHANNEL or ack.body != b"\x01":
                raise ProtocolOrderViolation("env params not acknowledged")

    def reset(self, seed: int | None = None) \
            -> tuple[dict[str, wire.Batch], dict[str, wire.Batch]]:
        if self.protocol_version is None:
            raise ProtocolOrderViolation("reset before handshake")
        self._send(wire.encode_reset(-1 if seed is None else seed))
        return self._consume_step()

    def step(self, actions: dict[str, np.ndarray]) \
            -> tuple[dict[str, wire.Batch], dict[str, wire.Batch]]:
        """actions: behavior → [n, row] float array matching the last
        decision batch's agent order."""
        if not self._ready:
            raise ProtocolOrderViolation("step before reset")
        request = {}
        for name, ids in self._pending.items():
            arr = np.asarray(actions[name], dtype="<f4").reshape(len(ids), -1)
            request[name] = (ids, arr)
        self._send(wire.encode_step(request))
        return self._consume_step()

    def _consume_step(self):
        response = self._recv()
        if response.type != wire.T_STEP_RESPONSE:
            raise ProtocolOrderViolation(
                f"expected step response, got 0x{response.type:02x}")
        self._pending = {name: list(b.agent_ids)
                         for name, b in response.decisions.items()}
        self._ready = True
        return response.decisions, response.terminals

    def ping(self) -> None:
        self._send(wire.encode_ping())
        reply = self._recv()
        if reply.type != wire.T_PING:
            raise ProtocolOrderViolation("ping not echoed")

    def close(self) -> None:
        self._sock.close()


def connect(host: str, port: int, timeout: float = 10.0,
            env_params: dict[str, float] | None = None) -> ClientSession:
    """Open a TCP connection and complete the handshake."""
    sock = socket.create_connection((host, port), timeout=timeout)
    session = ClientSession(sock)
    try:
        session.handshake(env_params)
    except Exception:
        sock.close()
        raise
    return session
