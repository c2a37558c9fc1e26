"""Browser play bridge: a minimal RFC6455 WebSocket endpoint at /play that
streams environment snapshots as JSON text frames and maps the client's
action replies onto the controlled agent, with server-side demonstration
recording.

The loop is strictly alternating: one snapshot out, one action message in,
one decision applied.  Static frontend assets are served on plain GET.
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import os
import socket
import struct
import time

import numpy as np

from .envs import make_env
from .kernel import Academy, Discrete
from .protocol.demo import DemoRecord, write_demo
from .worldsim import AABB

log = logging.getLogger(__name__)

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


# -- snapshots -----------------------------------------------------------

def snapshot_entities(academy: Academy) -> list[dict]:
    env = academy.env
    if hasattr(env, "world"):
        out = []
        for body in sorted(env.world.bodies.values(), key=lambda b: b.id):
            ex, ey = body.extent()
            out.append({"id": body.id, "tag": body.tag,
                        "position": [round(body.position[0], 4),
                                     round(body.position[1], 4)],
                        "extents": [ex, ey],
                        "shape": "aabb" if isinstance(body.shape, AABB)
                        else "circle"})
        return out
    if env.name == "Basic":
        cells = [{"id": 100 + i, "tag": "cell", "position": [i, 0],
                  "extents": [0.45, 0.45], "shape": "aabb"}
                 for i in (7, 17)]
        cells[0]["tag"], cells[1]["tag"] = "goal_small", "goal_large"
        cells.append({"id": 0, "tag": "agent",
                      "position": [env.position, 0],
                      "extents": [0.4, 0.4], "shape": "aabb"})
        return cells
    if env.name == "GridWorld":
        out = [{"id": 1, "tag": "goal",
                "position": [env.goal_cell[0] + 0.5, env.goal_cell[1] + 0.5],
                "extents": [0.5, 0.5], "shape": "aabb"}]
        for i, cell in enumerate(sorted(env.obstacle_cells)):
            out.append({"id": 10 + i, "tag": "obstacle",
                        "position": [cell[0] + 0.5, cell[1] + 0.5],
                        "extents": [0.5, 0.5], "shape": "aabb"})
        out.append({"id": 0, "tag": "agent",
                    "position": [env.agent_cell[0] + 0.5,
                                 env.agent_cell[1] + 0.5],
                    "extents": [0.5, 0.5], "shape": "aabb"})
        return out
    if env.name == "Tennis":
        return [
            {"id": 0, "tag": "paddle", "position": [-5.5, env.paddle_y[0]],
             "extents": [0.15, 0.8], "shape": "aabb"},
            {"id": 1, "tag": "paddle", "position": [5.5, env.paddle_y[1]],
             "extents": [0.15, 0.8], "shape": "aabb"},
            {"id": 2, "tag": "ball", "position": list(env.ball),
             "extents": [0.15, 0.15], "shape": "circle"},
        ]
    if env.name == "StrikersVsGoalie":
        out = []
        for agent_id, pos in sorted(env.pos.items()):
            tag = ("goalie" if agent_id == env.goalie.agent_id else "striker")
            out.append({"id": agent_id, "tag": tag, "position": list(pos),
                        "extents": [0.4, 0.4], "shape": "circle"})
        out.append({"id": 99, "tag": "ball", "position": list(env.ball),
                    "extents": [0.3, 0.3], "shape": "circle"})
        return out
    return []


def make_snapshot(academy: Academy, handle, recording: bool) -> dict:
    return {
        "env": academy.env.name,
        "tick": academy.step_count,
        "entities": snapshot_entities(academy),
        "hud": {"cumulative_reward": round(handle.cumulative_reward, 4),
                "episode_step": handle.episode_step},
        "recording": recording,
    }


# -- websocket primitives ------------------------------------------------

def _recv_until(conn: socket.socket, marker: bytes, limit=65536) -> bytes:
    data = b""
    while marker not in data:
        chunk = conn.recv(4096)
        if not chunk:
            raise ConnectionError("client closed during handshake")
        data += chunk
        if len(data) > limit:
            raise ConnectionError("oversized handshake")
    return data


def websocket_accept(key: str) -> str:
    digest = hashlib.sha1((key + WS_GUID).encode()).digest()
    return base64.b64encode(digest).decode()


def send_text(conn: socket.socket, text: str) -> None:
    payload = text.encode("utf-8")
    header = bytearray([0x81])  # FIN + text opcode
    n = len(payload)
    if n < 126:
        header.append(n)
    elif n < 65536:
        header.append(126)
        header += struct.pack(">H", n)
    else:
        header.append(127)
        header += struct.pack(">Q", n)
    conn.sendall(bytes(header) + payload)


def recv_text(conn: socket.socket) -> str | None:
    """Read one text frame (client frames are masked); None on close."""
    while True:
        head = _read_exact(conn, 2)
        if head is None:
            return None
        opcode = head[0] & 0x0F
        masked = bool(head[1] & 0x80)
        length = head[1] & 0x7F
        if length == 126:
            length = struct.unpack(">H", _read_exact(conn, 2))[0]
        elif length == 127:
            length = struct.unpack(">Q", _read_exact(conn, 8))[0]
        mask = _read_exact(conn, 4) if masked else b"\x00" * 4
        payload = _read_exact(conn, length) if length else b""
        if payload is None:
            return None
        if masked:
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        if opcode == 0x8:  # close
            return None
        if opcode == 0x9:  # ping -> pong
            conn.sendall(bytes([0x8A, len(payload)]) + payload)
            continue
        if opcode in (0x1, 0x2):
            return payload.decode("utf-8")


def _read_exact(conn: socket.socket, n: int) -> bytes | None:
    chunks, remaining = [], n
    while remaining:
        chunk = conn.recv(remaining)
        if not chunk:
            return None
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


# -- play session --------------------------------------------------------

STATIC_DIR = os.path.join(os.path.dirname(__file__), "static")


def serve_play(env_name: str, params=None, seed=None, host="127.0.0.1",
               port=8765, record_path: str | None = None, speed: float = 1.0,
               static_dir: str | None = None,
               max_sessions: int | None = None) -> None:
    """Host the play endpoint; each decision paced to 100 ms / speed
    (speed 0 runs unthrottled)."""
    static_dir = static_dir or STATIC_DIR
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as listener:
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((host, port))
        listener.listen(1)
        log.info("play server for %s on ws://%s:%d/play", env_name, host, port)
        sessions = 0
        while max_sessions is None or sessions < max_sessions:
            conn, _ = listener.accept()
            with conn:
                upgraded = _handle_http(conn, static_dir)
                if upgraded:
                    sessions += 1
                    academy = make_env(env_name, params, seed=seed)
                    try:
                        _play_loop(conn, academy, record_path, speed)
                    except (ConnectionError, OSError) as exc:
                        log.info("play session ended: %s", exc)


def _handle_http(conn: socket.socket, static_dir: str) -> bool:
    """Serve static files or upgrade /play to a websocket.  Returns True
    after a successful upgrade."""
    request = _recv_until(conn, b"\r\n\r\n").decode("latin-1")
    lines = request.split("\r\n")
    method, path, _ = lines[0].split(" ", 2)
    headers = {}
    for line in lines[1:]:
        if ":" in line:
            k, v = line.split(":", 1)
            headers[k.strip().lower()] = v.strip()
    if path == "/play" and headers.get("upgrade", "").lower() == "websocket":
        accept = websocket_accept(headers["sec-websocket-key"])
        conn.sendall((
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\nConnection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {accept}\r\n\r\n").encode())
        return True
    filename = "index.html" if path == "/" else path.lstrip("/")
    filepath = os.path.normpath(os.path.join(static_dir, filename))
    if filepath.startswith(os.path.abspath(static_dir) if os.path.isabs(
            static_dir) else static_dir) and os.path.isfile(filepath):
        with open(filepath, "rb") as fh:
            body = fh.read()
        ctype = ("text/html" if filename.endswith(".html")
                 else "application/javascript" if filename.endswith(".js")
                 else "text/plain")
        conn.sendall((f"HTTP/1.1 200 OK\r\nContent-Type: {ctype}\r\n"
                      f"Content-Length: {len(body)}\r\n\r\n").encode() + body)
    else:
        conn.sendall(b"HTTP/1.1 404 Not Found\r\nContent-Length: 0\r\n\r\n")
    return False


def _play_loop(conn: socket.socket, academy: Academy,
               record_path: str | None, speed: float) -> None:
    behavior = sorted(academy.behaviors)[0]
    spec = academy.behaviors[behavior]
    controlled = min(h.agent_id for h in academy.agents.values()
                     if h.behavior_name == behavior)
    handle = academy.agents[controlled]
    pacing = 0.0 if speed <= 0 else 0.1 / speed
    outcome = academy.reset()
    recording = False
    records: list[DemoRecord] = []
    pending: tuple | None = None  # (obs rows, action)
    episodes_written = 0
    while True:
        batch = outcome.decisions.get(behavior)
        terminal = outcome.terminals.get(behavior)
        if terminal is not None and controlled in terminal.agent_ids:
            i = terminal.agent_ids.index(controlled)
            # the terminal reward closes the last acted transition; the
            # done marker record then carries no further reward
            terminal_reward = float(terminal.rewards[i])
            if recording and pending is not None:
                obs_rows, act = pending
                records.append(DemoRecord(obs_rows, act, terminal_reward,
                                          False))
                pending = None
                terminal_reward = 0.0
            if recording:
                records.append(DemoRecord(
                    [o[i] for o in terminal.obs],
                    _noop_action(spec),
                    terminal_reward, True,
                    bool(terminal.interrupted[i])))
                if record_path:
                    write_demo(record_path, spec, records)
                    episodes_written += 1
                    log.info("recorded %d records to %s", len(records),
                             record_path)
        if batch is None or controlled not in batch.agent_ids:
            outcome = academy.academy_step(_other_actions(academy, outcome,
                                                          behavior, None))
            continue
        i = batch.agent_ids.index(controlled)
        if recording and pending is not None:
            obs_rows, act = pending
            records.append(DemoRecord(obs_rows, act,
                                      float(batch.rewards[i]), False))
            pending = None
        send_text(conn, json.dumps(make_snapshot(academy, handle, recording)))
        reply = recv_text(conn)
        if reply is None:
            return
        try:
            message = json.loads(reply)
        except json.JSONDecodeError:
            continue
        want_record = bool(message.get("record", recording))
        if want_record and not recording:
            records = []
        recording = want_record
        action = np.asarray(message.get("action", _noop_action(spec)))
        if isinstance(spec.action_spec, Discrete):
            action = action.astype(np.int64)
            action = np.clip(action, 0,
                             np.asarray(spec.action_spec.branches) - 1)
        if recording:
            pending = ([o[i] for o in batch.obs], action)
        outcome = academy.academy_step(
            _other_actions(academy, outcome, behavior, (controlled, action)))
        if pacing:
            time.sleep(pacing)


def _noop_action(spec) -> np.ndarray:
    if isinstance(spec.action_spec, Discrete):
        return np.zeros(len(spec.action_spec.branches), dtype=np.int64)
    return np.zeros(spec.action_spec.dim, dtype=np.float32)


def _other_actions(academy: Academy, outcome, controlled_behavior,
                   controlled_action) -> dict:
    """No-op actions for every uncontrolled decision agent."""
    actions: dict[str, dict[int, np.ndarray]] = {}
    for name, batch in outcome.decisions.items():
        spec = academy.behaviors[name]
        rows = {}
        for agent_id in batch.agent_ids:
            if (controlled_action is not None
                    and name == controlled_behavior
                    and agent_id == controlled_action[0]):
                rows[agent_id] = controlled_action[1]
            else:
                rows[agent_id] = _noop_action(spec)
        actions[name] = rows
    return actions
