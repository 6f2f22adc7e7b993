"""Live steering service: growth sessions driven over a websocket.

Wire protocol. Every message is a JSON object with a "type" field out of
{snapshot, param_update, control, ack, error}. Clients send:

    {"type": "control", "action": "open", "params": {...}, "seed": 0}
    {"type": "control", "action": "attach", "session": "s1"}
    {"type": "control", "action": <start|resume|pause|reset>, "session": ...}
    {"type": "control", "action": "set_speed", "session": ..., "speed": 200}
    {"type": "control", "action": <pull_edges|pull_histogram>, "session": ...}
    {"type": "param_update", "session": ..., "patch": {...}, "client_tag": ...}

The service answers with "ack"/"error" messages and streams "snapshot"
messages: one per `snapshot_every` iterations plus one at every pause
or parameter-change boundary. Snapshot JSON mirrors the analysis report
(params, counts, histograms, blcc, neighborhood) plus {seq, t, status,
degree_fit}; histograms are truncated to the busiest 64 bins with a tail
count, the full version answers a pull_histogram request.

Patches land at iteration boundaries: queued while running, immediate
while paused. The acknowledgment carries the boundary t and echoes the
client tag. Sessions auto-pause once t reaches params.iterations; a
patch raising the target plus a resume continues the same RNG stream,
so a steered run replays deterministically from its (seed, event log).

Only the opening connection may steer a session; attached connections
are read-only subscribers. A slow subscriber loses intermediate
snapshots, never acks and never ordering; gaps in seq are the client's
detection contract.
"""

import asyncio
from collections import deque
from dataclasses import asdict
from random import Random
from typing import Any, Iterable, Optional

from .analytics import (
    DegreeHistogram,
    blcc_summary,
    fit_distribution_shape,
    neighborhood_report,
)
from .bigraph import ITEM, USER, Bigraph, Modality
from .generator import GeneratorParams, apply_patch, step_iteration

SNAPSHOT_SAMPLE_THRESHOLD = 10_000
SNAPSHOT_SAMPLE_SIZE = 500
HISTOGRAM_WIRE_BINS = 64
EDGE_PULL_LIMIT = 2_000
SNAPSHOT_QUEUE_LIMIT = 8
MAX_SLICE = 1_000

Message = dict[str, Any]

_MODALITY_KEYS = ((USER, "user"), (ITEM, "item"))


class SessionCore:
    """One growth session: graph, RNG, clock, and pending patches.

    Synchronous and transport-free; the websocket layer drives it and
    fans the returned messages out. All mutation happens here, between
    iterations, so a logged event sequence replays bit-for-bit.
    """

    def __init__(
        self,
        session_id: str,
        params: GeneratorParams,
        seed: int,
        snapshot_every: int = 100,
    ):
        if snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")
        self.session_id = session_id
        self.initial_params = params
        self.params = params
        self.seed = seed
        self.snapshot_every = snapshot_every
        self.rng = Random(seed)
        self.graph = Bigraph.from_pairs(params.m)
        self.t = 0
        self.seq = 0
        self.running = False
        self.speed: Optional[float] = None
        self.pending: deque[tuple[dict, Any]] = deque()

    # -- outbound message builders -------------------------------------

    def _ack(self, action: str, **extra: Any) -> Message:
        return {
            "type": "ack",
            "session": self.session_id,
            "action": action,
            "t": self.t,
            **extra,
        }

    def _error(self, message: str, **extra: Any) -> Message:
        return {
            "type": "error",
            "session": self.session_id,
            "message": message,
            **extra,
        }

    def _sample(self, modality: Modality) -> Optional[list[int]]:
        n = self.graph.node_count(modality)
        if n <= SNAPSHOT_SAMPLE_THRESHOLD:
            return None
        name = "user" if modality is USER else "item"
        picker = Random(f"{self.seed}:{self.seq}:{name}")
        return picker.sample(range(n), SNAPSHOT_SAMPLE_SIZE)

    def snapshot(self) -> Message:
        self.seq += 1
        graph = self.graph
        histograms = {}
        fits = {}
        for modality, key in _MODALITY_KEYS:
            hist = DegreeHistogram.from_graph(graph, modality)
            bins, tail = hist.truncated(HISTOGRAM_WIRE_BINS)
            histograms[key] = {
                "bins": [[degree, count] for degree, count in bins],
                "tail": tail,
                "mean": hist.mean,
                "second_moment": hist.second_moment,
            }
            try:
                fit = fit_distribution_shape(hist)
            except ValueError:
                fits[key] = None
            else:
                fits[key] = {**asdict(fit), "preferred": fit.preferred}

        user_sample = self._sample(USER)
        item_sample = self._sample(ITEM)
        user_blcc = blcc_summary(graph, USER, user_sample)
        item_blcc = blcc_summary(graph, ITEM, item_sample)
        hood = neighborhood_report(graph, indices=user_sample)
        return {
            "type": "snapshot",
            "session": self.session_id,
            "seq": self.seq,
            "t": self.t,
            "status": "running" if self.running else "paused",
            "params": asdict(self.params),
            "counts": {
                "users": graph.user_count,
                "items": graph.item_count,
                "edges": graph.edge_count,
            },
            "histograms": histograms,
            "blcc": {
                "user_mean": user_blcc.mean,
                "item_mean": item_blcc.mean,
                "defined_count": user_blcc.defined_count + item_blcc.defined_count,
                "undefined_count": (
                    user_blcc.undefined_count + item_blcc.undefined_count
                ),
                "sampled": user_sample is not None or item_sample is not None,
            },
            "neighborhood": {
                "mean_similar_users": hood.mean_similar_users,
                "mean_neighbor_items": hood.mean_neighbor_items,
                "sampled": user_sample is not None,
            },
            "degree_fit": fits,
        }

    # -- steering ------------------------------------------------------

    def queue_param_update(self, patch: dict, client_tag: Any = None) -> list[Message]:
        """Validated immediately; applied now if paused, else at the boundary."""
        try:
            applied = apply_patch(self.params, patch)
        except ValueError as err:
            return [self._error(str(err), client_tag=client_tag)]
        if self.running:
            self.pending.append((patch, client_tag))
            return []
        self.params = applied
        return [
            self._ack(
                "param_update",
                applied_at_t=self.t,
                client_tag=client_tag,
                params=asdict(self.params),
            ),
            self.snapshot(),
        ]

    def _drain_pending(self) -> list[Message]:
        out: list[Message] = []
        while self.pending:
            patch, tag = self.pending.popleft()
            try:
                self.params = apply_patch(self.params, patch)
            except ValueError as err:
                out.append(self._error(str(err), client_tag=tag))
                continue
            out.append(
                self._ack(
                    "param_update",
                    applied_at_t=self.t,
                    client_tag=tag,
                    params=asdict(self.params),
                )
            )
            out.append(self.snapshot())
        return out

    def advance(self, max_iters: int) -> list[Message]:
        """Run up to max_iters iterations, emitting boundary messages."""
        out: list[Message] = []
        done = 0
        while self.running and done < max_iters:
            if self.pending:
                out.extend(self._drain_pending())
            if self.t >= self.params.iterations:
                self.running = False
                out.append(self.snapshot())
                break
            step_iteration(self.graph, self.params, self.rng)
            self.t += 1
            done += 1
            reached_target = self.t >= self.params.iterations
            if reached_target:
                self.running = False
            if reached_target or self.t % self.snapshot_every == 0:
                out.append(self.snapshot())
        return out

    def control(self, action: str, **kwargs: Any) -> list[Message]:
        if action in ("start", "resume"):
            self.running = True
            return [self._ack(action)]
        if action == "pause":
            out = self._drain_pending() if self.pending else []
            self.running = False
            return out + [self._ack(action), self.snapshot()]
        if action == "reset":
            out = [
                self._error("discarded by reset", client_tag=tag)
                for _, tag in self.pending
            ]
            self.pending.clear()
            self.params = self.initial_params
            self.rng = Random(self.seed)
            self.graph = Bigraph.from_pairs(self.initial_params.m)
            self.t = 0
            self.running = False
            return out + [self._ack(action), self.snapshot()]
        if action == "set_speed":
            speed = kwargs.get("speed")
            if speed is not None and not (
                isinstance(speed, (int, float)) and speed > 0
            ):
                return [self._error("speed must be > 0 or null")]
            self.speed = None if speed is None else float(speed)
            return [self._ack(action, speed=self.speed)]
        if action == "pull_edges":
            if self.graph.edge_count > EDGE_PULL_LIMIT:
                return [
                    self._error(
                        f"{self.graph.edge_count} edges exceed the pull "
                        f"limit of {EDGE_PULL_LIMIT}"
                    )
                ]
            edges = [[user, item] for user, item in self.graph.edges()]
            return [self._ack(action, edges=edges)]
        if action == "pull_histogram":
            full = {}
            for modality, key in _MODALITY_KEYS:
                hist = DegreeHistogram.from_graph(self.graph, modality)
                full[key] = {
                    "counts": {str(d): c for d, c in hist.sorted_items()},
                    "mean": hist.mean,
                    "second_moment": hist.second_moment,
                }
            return [self._ack(action, histograms=full)]
        return [self._error(f"unknown action: {action}")]


class Outbox:
    """Per-connection send queue with snapshot-only backpressure.

    When more than `snapshot_limit` snapshots are waiting, the oldest
    queued snapshot is dropped. Acks, errors, and relative order of the
    survivors are preserved, so clients observe seq gaps but never
    reordering.
    """

    def __init__(self, snapshot_limit: int = SNAPSHOT_QUEUE_LIMIT):
        self.snapshot_limit = snapshot_limit
        self._queue: deque[Any] = deque()
        self._ready = asyncio.Event()
        self.dropped = 0

    @property
    def queued(self) -> tuple:
        return tuple(self._queue)

    def push(self, message: Message) -> None:
        if message.get("type") == "snapshot":
            waiting = sum(
                1
                for m in self._queue
                if isinstance(m, dict) and m.get("type") == "snapshot"
            )
            if waiting >= self.snapshot_limit:
                for i, m in enumerate(self._queue):
                    if isinstance(m, dict) and m.get("type") == "snapshot":
                        del self._queue[i]
                        self.dropped += 1
                        break
        self._queue.append(message)
        self._ready.set()

    def push_all(self, messages: Iterable[Message]) -> None:
        for message in messages:
            self.push(message)

    def push_close(self) -> None:
        self._queue.append(_CLOSE)
        self._ready.set()

    async def pop(self) -> Any:
        while not self._queue:
            self._ready.clear()
            await self._ready.wait()
        return self._queue.popleft()


_CLOSE = object()


class SessionState:
    """A core plus its owner, subscribers, and generation task."""

    def __init__(self, core: SessionCore, owner: Outbox):
        self.core = core
        self.owner = owner
        self.subscribers: list[Outbox] = [owner]
        self.task: Optional[asyncio.Task] = None

    def fan_out(self, messages: Iterable[Message]) -> None:
        """Snapshots to every subscriber, acks and errors to the owner."""
        for message in messages:
            if message["type"] == "snapshot":
                for outbox in self.subscribers:
                    outbox.push(message)
            else:
                self.owner.push(message)


class StreamService:
    """All live sessions of one process; transport-independent state."""

    def __init__(self, max_sessions: int = 8, snapshot_every: int = 100):
        self.max_sessions = max_sessions
        self.snapshot_every = snapshot_every
        self.sessions: dict[str, SessionState] = {}
        self._opened = 0

    def open_session(
        self, params: GeneratorParams, seed: int, owner: Outbox
    ) -> SessionState:
        if len(self.sessions) >= self.max_sessions:
            raise RuntimeError(f"session limit {self.max_sessions} reached")
        self._opened += 1
        session_id = f"s{self._opened}"
        core = SessionCore(session_id, params, seed, self.snapshot_every)
        state = SessionState(core, owner)
        self.sessions[session_id] = state
        return state

    def close_session(self, session_id: str) -> None:
        state = self.sessions.pop(session_id, None)
        if state is None:
            return
        state.core.running = False
        if state.task is not None:
            state.task.cancel()
        for outbox in state.subscribers:
            if outbox is not state.owner:
                outbox.push(
                    {
                        "type": "error",
                        "session": session_id,
                        "message": "session closed by owner",
                    }
                )

    def drop_connection(self, outbox: Outbox) -> None:
        for session_id, state in list(self.sessions.items()):
            if state.owner is outbox:
                self.close_session(session_id)
            elif outbox in state.subscribers:
                state.subscribers.remove(outbox)


def _params_from_wire(raw: Any) -> GeneratorParams:
    if not isinstance(raw, dict):
        raise ValueError("params must be an object")
    try:
        return GeneratorParams(**raw)
    except TypeError:
        known = {f for f in GeneratorParams.__dataclass_fields__}
        bad = sorted(set(raw) - known)
        missing = sorted(
            f
            for f in ("m", "iterations", "p", "u", "v")
            if f not in raw
        )
        parts = []
        if bad:
            parts.append("unknown fields: " + ", ".join(bad))
        if missing:
            parts.append("missing fields: " + ", ".join(missing))
        raise ValueError("; ".join(parts) or "malformed params")


def _slice_size(core: SessionCore) -> int:
    size = min(core.snapshot_every, MAX_SLICE)
    if core.speed is not None:
        # ~10 wall-clock slices per second while throttled
        size = min(size, max(1, int(core.speed / 10)))
    return size


async def _generation_loop(state: SessionState) -> None:
    core = state.core
    while core.running:
        size = _slice_size(core)
        state.fan_out(core.advance(size))
        if core.speed is not None:
            await asyncio.sleep(size / core.speed)
        else:
            await asyncio.sleep(0)


def create_app(
    max_sessions: int = 8,
    snapshot_every: int = 100,
    static_dir: Optional[str] = None,
):
    """FastAPI application exposing the protocol at /ws.

    With static_dir set, the directory is served at / for the browser UI.
    """
    from fastapi import FastAPI, WebSocket, WebSocketDisconnect

    app = FastAPI(title="bigraphgen steering service")
    service = StreamService(max_sessions, snapshot_every)
    app.state.service = service

    def ensure_task(state: SessionState) -> None:
        if state.core.running and (state.task is None or state.task.done()):
            state.task = asyncio.create_task(_generation_loop(state))

    def handle(outbox: Outbox, message: Any) -> bool:
        """Mutate service state for one inbound message.

        Returns False when the channel must close (protocol contract for
        unknown-session references).
        """
        if not isinstance(message, dict) or "type" not in message:
            outbox.push({"type": "error", "session": None,
                         "message": "message must be an object with a type"})
            return True
        kind = message["type"]

        if kind == "control" and message.get("action") == "open":
            try:
                params = _params_from_wire(message.get("params"))
                seed = message.get("seed", 0)
                if not isinstance(seed, int):
                    raise ValueError("seed must be an integer")
                state = service.open_session(params, seed, outbox)
            except (ValueError, RuntimeError) as err:
                outbox.push({"type": "error", "session": None,
                             "message": str(err)})
                return True
            core = state.core
            outbox.push(core._ack("open", params=asdict(core.params),
                                  seed=core.seed))
            state.fan_out([core.snapshot()])
            return True

        session_id = message.get("session")
        state = service.sessions.get(session_id)
        if state is None:
            outbox.push({"type": "error", "session": session_id,
                         "message": f"unknown session: {session_id!r}"})
            return False

        if kind == "control" and message.get("action") == "attach":
            if outbox not in state.subscribers:
                state.subscribers.append(outbox)
            outbox.push(state.core._ack("attach"))
            state.fan_out([state.core.snapshot()])
            return True

        if outbox is not state.owner:
            outbox.push(state.core._error(
                "read-only subscriber: only the opening connection steers"))
            return True

        if kind == "param_update":
            state.fan_out(
                state.core.queue_param_update(
                    message.get("patch"), message.get("client_tag")
                )
            )
            return True

        if kind == "control":
            action = message.get("action")
            extra = {k: v for k, v in message.items()
                     if k not in ("type", "action", "session")}
            state.fan_out(state.core.control(action, **extra))
            ensure_task(state)
            return True

        outbox.push(state.core._error(f"unsupported message type: {kind}"))
        return True

    @app.websocket("/ws")
    async def websocket_endpoint(websocket: WebSocket) -> None:
        await websocket.accept()
        outbox = Outbox()

        async def sender() -> None:
            while True:
                message = await outbox.pop()
                if message is _CLOSE:
                    await websocket.close()
                    return
                await websocket.send_json(message)

        sender_task = asyncio.create_task(sender())
        try:
            while True:
                try:
                    message = await websocket.receive_json()
                except ValueError:
                    outbox.push({"type": "error", "session": None,
                                 "message": "invalid JSON"})
                    continue
                if not handle(outbox, message):
                    outbox.push_close()
                    await sender_task
                    return
        except WebSocketDisconnect:
            pass
        finally:
            if not sender_task.done():
                sender_task.cancel()
            service.drop_connection(outbox)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True))

    return app
