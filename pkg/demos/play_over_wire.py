"""Talk to an environment server over its TCP wire protocol by hand:
handshake, reset, then a random-action rollout, printing what travels on
the wire at each stage.
"""

import socket
import threading

import numpy as np

from agentsim.protocol import codec
from agentsim.protocol.server import read_frame, serve

HOST, PORT = "127.0.0.1", 45913

server = threading.Thread(target=serve, args=("GridWorld",),
                          kwargs={"seed": 7, "host": HOST, "port": PORT,
                                  "max_sessions": 1}, daemon=True)
server.start()

sock = None
while sock is None:
    try:
        sock = socket.create_connection((HOST, PORT), timeout=5)
    except OSError:
        pass


def exchange(message):
    frame = codec.encode_message(message)
    print(f"-> {type(message).__name__:14s} {len(frame):5d} bytes")
    sock.sendall(frame)
    reply = codec.decode_message(read_frame(sock))
    print(f"<- {type(reply).__name__}")
    return reply


with sock:
    ack = exchange(codec.Hello())
    spec = ack.behaviors[0]
    print(f"   behavior {spec.behavior_name!r}, "
          f"obs {[o.shape for o in spec.obs_specs]}, "
          f"action branches {spec.action_spec.branches}")

    response = exchange(codec.ResetRequest(7))
    rng = np.random.default_rng(7)
    total = 0.0
    for step in range(50):
        request = codec.StepRequest()
        for name, batch in response.decisions.items():
            n = len(batch.agent_ids)
            acts = rng.integers(0, 4, (n, 1)).astype("<f4")
            request.actions[name] = (list(batch.agent_ids), acts)
            total += float(np.sum(batch.rewards))
        response = exchange(codec.StepRequest(request.actions))

print(f"cumulative reward over 50 random decisions: {total:.3f}")
