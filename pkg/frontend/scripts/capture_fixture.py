"""Regenerate tests/fixtures/session.json from a live backend session.

Run from the frontend directory with the Python package installed:

    python3 scripts/capture_fixture.py

The fixture is the owner connection's receive log, verbatim, so the
reducer tests replay exactly what the service said.
"""

import json
import pathlib

from starlette.testclient import TestClient

from bigraphgen.service import create_app

PARAMS = {
    "m": 10,
    "iterations": 30,
    "p": 0.5,
    "u": 3,
    "v": 3,
    "alpha": 0.5,
    "beta": 0.5,
    "bounce": 0.5,
}

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "session.json"


def recv_until(ws, log, stop):
    while True:
        message = ws.receive_json()
        log.append(message)
        if stop(message):
            return message


def paused_at(t):
    return lambda m: m["type"] == "snapshot" and m["status"] == "paused" and m["t"] == t


def main():
    log = []
    client = TestClient(create_app(max_sessions=2, snapshot_every=10))
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "control", "action": "open", "params": PARAMS, "seed": 0})
        recv_until(ws, log, lambda m: m["type"] == "ack")
        recv_until(ws, log, lambda m: m["type"] == "snapshot")
        session = log[0]["session"]

        ws.send_json({"type": "control", "action": "start", "session": session})
        recv_until(ws, log, paused_at(30))

        ws.send_json({
            "type": "param_update",
            "session": session,
            "patch": {"alpha": 0.9, "iterations": 60},
            "client_tag": "fix-1",
        })
        recv_until(ws, log, lambda m: m["type"] == "snapshot")

        ws.send_json({
            "type": "param_update",
            "session": session,
            "patch": {"p": 1.5},
            "client_tag": "fix-2",
        })
        recv_until(ws, log, lambda m: m["type"] == "error")

        ws.send_json({"type": "control", "action": "resume", "session": session})
        recv_until(ws, log, paused_at(60))

        ws.send_json({"type": "control", "action": "pull_edges", "session": session})
        recv_until(ws, log, lambda m: m["type"] == "ack" and m["action"] == "pull_edges")

        ws.send_json({"type": "control", "action": "set_speed", "session": session, "speed": 500})
        recv_until(ws, log, lambda m: m["type"] == "ack" and m["action"] == "set_speed")

        ws.send_json({"type": "control", "action": "pause", "session": session})
        recv_until(ws, log, lambda m: m["type"] == "snapshot")

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(log, indent=1) + "\n")
    print(f"wrote {OUT} with {len(log)} messages")


if __name__ == "__main__":
    main()
