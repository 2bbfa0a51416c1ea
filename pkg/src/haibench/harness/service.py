"""HTTP session service: serves live trials to a task UI and records the
same event-log schema the simulator emits, so completed human sessions
score through the identical pipeline.

Timing policy: the server never trusts the client for response stamps.
system_response and feedback events are stamped server-side on a
per-session monotonic clock anchored at session creation; client-reported
operator_action timestamps are bounds-checked against server receipt time
within a configurable tolerance and must not regress within the log.
Ground truth (advice correctness, trial optima) never leaves the server
until the feedback event.
"""

from __future__ import annotations

import random
import threading
import time
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..events import Event, EventKind, LikertItem, LogError, build_session, serialize_session
from ..sim.advisor import Advice, advise
from ..sim.runner import derive_seed, session_config_ref
from ..sim.scenario import (
    Scenario,
    adjust_threats_for_kind,
    generate_scenario,
    scenario_is_signal,
    solve_optimal,
)
from .config import BenchmarkConfig

__all__ = ["create_app"]

PROBE_PROMPT = "acknowledge comms"
PROBE_EXPECTED = "ack"


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


class LiveSession:
    """Mutable state for one in-flight human session."""

    def __init__(self, session_id: str, config: BenchmarkConfig, seed: int, subject: str):
        self.id = session_id
        self.config = config
        self.seed = seed
        self.subject = subject
        self.lock = threading.Lock()
        self._anchor_ns = time.monotonic_ns()
        self.events: list[Event] = []
        self.decided: set[int] = set()
        self.served: set[int] = set()
        self.completed = False
        serve = config.serve
        self.trials: list[tuple[Scenario, Advice]] = []
        kind_rng = random.Random(derive_seed(seed, "trial-kinds"))
        advisor_rng = random.Random(derive_seed(seed, "advisor"))
        for trial in range(1, serve.n_trials + 1):
            signal = kind_rng.random() < config.task.p_signal
            scenario = generate_scenario(config.task, derive_seed(seed, f"scenario-{trial}"))
            scenario = adjust_threats_for_kind(scenario, config.task, signal)
            advice = advise(
                scenario, serve.level, serve.schedule, trial, advisor_rng, config.task
            )
            self.trials.append((scenario, advice))

    def now_ms(self) -> int:
        return (time.monotonic_ns() - self._anchor_ns) // 1_000_000

    def last_t(self) -> int:
        return self.events[-1].t if self.events else 0

    def stamp(self) -> int:
        # Server stamps never regress, even if a client clock runs ahead.
        return max(self.now_ms(), self.last_t())

    def append(self, event: Event) -> None:
        if event.t < self.last_t():
            raise ServiceError(400, "timestamp_regression", "timestamp regression")
        self.events.append(event)

    def trial_view(self, n: int) -> dict[str, Any]:
        if not 1 <= n <= len(self.trials):
            raise ServiceError(404, "unknown_trial", f"trial {n} does not exist")
        scenario, advice = self.trials[n - 1]
        if n not in self.served:
            t = self.stamp()
            self.append(
                Event(
                    session_id=self.id,
                    t=t,
                    kind=EventKind.STIMULUS,
                    trial_id=n,
                    payload={"task": "engagement", "scenario": scenario.to_payload()},
                )
            )
            self.append(
                Event(
                    session_id=self.id,
                    t=t,
                    kind=EventKind.ADVICE,
                    trial_id=n,
                    payload=advice.to_payload(include_truth=True),
                )
            )
            self.served.add(n)
        view = {
            "trial": n,
            "of": len(self.trials),
            "scenario": scenario.to_payload(),
            # Ground truth stays server-side: no correctness flag here.
            "advice": advice.to_payload(include_truth=False),
            "probe": {"prompt": PROBE_PROMPT, "expected": PROBE_EXPECTED}
            if self.config.task.probe_enabled
            else None,
        }
        return view


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def create_app(config: BenchmarkConfig, out_dir: str | Path = ".") -> FastAPI:
    app = FastAPI(title="haibench session service")
    registry: dict[str, LiveSession] = {}
    registry_lock = threading.Lock()
    counter = {"n": 0}
    out_path = Path(out_dir)

    def get_session(session_id: str) -> LiveSession:
        with registry_lock:
            live = registry.get(session_id)
        if live is None:
            raise ServiceError(404, "unknown_session", f"no session {session_id!r}")
        if live.completed:
            raise ServiceError(409, "session_completed", "session is already completed")
        return live

    @app.exception_handler(ServiceError)
    async def service_error_handler(_req: Request, exc: ServiceError):
        return _error(exc.status, exc.code, exc.message)

    @app.post("/sessions")
    async def create_session(request: Request):
        try:
            body = await request.json()
        except Exception:
            body = {}
        subject = str((body or {}).get("subject", "anonymous"))
        with registry_lock:
            counter["n"] += 1
            index = counter["n"]
        seed = derive_seed(config.master_seed, f"serve:{index}")
        session_id = f"human-{index:04d}"
        live = LiveSession(session_id, config, seed, subject)
        with registry_lock:
            registry[session_id] = live
        with live.lock:
            view = live.trial_view(1)
        return {"session_id": session_id, "n_trials": len(live.trials), "trial": view}

    @app.get("/sessions/{session_id}/trials/{n}")
    async def get_trial(session_id: str, n: int):
        live = get_session(session_id)
        with live.lock:
            return live.trial_view(n)

    @app.post("/sessions/{session_id}/events")
    async def post_events(session_id: str, request: Request):
        live = get_session(session_id)
        try:
            body = await request.json()
        except Exception:
            raise ServiceError(400, "bad_json", "body must be JSON")
        if not isinstance(body, dict) or not isinstance(body.get("events"), list):
            raise ServiceError(400, "bad_body", 'body must be {"events": [...]}')
        appended: list[dict[str, Any]] = []
        with live.lock:
            for raw in body["events"]:
                appended.extend(_handle_client_event(live, raw))
        return {"accepted": len(body["events"]), "appended": appended}

    @app.post("/sessions/{session_id}/questionnaire")
    async def post_questionnaire(session_id: str, request: Request):
        live = get_session(session_id)
        try:
            body = await request.json()
        except Exception:
            raise ServiceError(400, "bad_json", "body must be JSON")
        items = (body or {}).get("items")
        if not isinstance(items, list) or not items:
            raise ServiceError(400, "bad_body", 'body must be {"items": [...]}')
        with live.lock:
            t = live.stamp()
            for item in items:
                try:
                    li = LikertItem(str(item["name"]), item["value"])
                except (KeyError, TypeError) as exc:
                    raise ServiceError(400, "bad_item", f"invalid item: {exc}")
                except LogError as exc:
                    raise ServiceError(400, "bad_item", str(exc))
                live.append(
                    Event(
                        session_id=live.id,
                        t=t,
                        kind=EventKind.QUESTIONNAIRE,
                        payload={"name": li.name, "value": li.value, "source": "human"},
                    )
                )
        return {"recorded": len(items)}

    @app.post("/sessions/{session_id}/complete")
    async def complete(session_id: str):
        live = get_session(session_id)
        with live.lock:
            referenced = {ev.trial_id for ev in live.events if ev.trial_id is not None}
            abandoned = sorted(referenced - live.decided)
            serve = config.serve
            config_ref = session_config_ref(
                config.task,
                serve.level,
                serve.schedule,
                None,
                serve.n_trials,
                live.seed,
            )
            config_ref["subject"] = live.subject
            try:
                session = build_session(
                    live.id,
                    live.events,
                    config_ref=config_ref,
                    subject_kind="human",
                    n_trials=serve.n_trials,
                    abandoned=abandoned,
                )
            except LogError as exc:
                raise ServiceError(400, "invalid_session", str(exc))
            out_path.mkdir(parents=True, exist_ok=True)
            log_path = out_path / f"{live.id}.ndjson"
            log_path.write_text(serialize_session(session), encoding="utf-8")
            live.completed = True
        return {"log_path": str(log_path), "events": len(session.events)}

    def _handle_client_event(live: LiveSession, raw: Any) -> list[dict[str, Any]]:
        if not isinstance(raw, dict):
            raise ServiceError(400, "bad_event", "event must be an object")
        kind = raw.get("kind")
        if kind not in {k.value for k in EventKind}:
            raise ServiceError(400, "unknown_kind", f"unknown kind {kind!r}")
        t = raw.get("t")
        if not isinstance(t, int) or isinstance(t, bool) or t < 0:
            raise ServiceError(400, "bad_timestamp", f"t must be a nonnegative integer, got {t!r}")
        trial = raw.get("trial")
        payload = raw.get("payload") or {}
        if not isinstance(payload, dict):
            raise ServiceError(400, "bad_payload", "payload must be an object")
        if kind in (EventKind.SYSTEM_RESPONSE.value, EventKind.FEEDBACK.value):
            raise ServiceError(
                400, "server_stamped", f"{kind} events are stamped server-side"
            )
        # A duplicate decision outranks a timestamp complaint: retry queues
        # repost with unchanged timestamps and should learn the real cause.
        if (
            kind == EventKind.OPERATOR_ACTION.value
            and payload.get("action") != "probe"
            and trial in live.decided
        ):
            raise ServiceError(409, "already_decided", f"trial {trial} already decided")
        if t < live.last_t():
            raise ServiceError(400, "timestamp_regression", "timestamp regression")

        event = Event(
            session_id=live.id,
            t=t,
            kind=EventKind(kind),
            trial_id=trial,
            payload=payload,
        )
        server_events: list[dict[str, Any]] = []
        if event.kind is EventKind.OPERATOR_ACTION:
            now = live.now_ms()
            tolerance = live.config.serve.timestamp_tolerance_ms
            if abs(t - now) > tolerance:
                raise ServiceError(
                    400,
                    "timestamp_out_of_bounds",
                    f"client t={t} deviates from server receipt {now} by more "
                    f"than {tolerance} ms",
                )
            if trial is None or not 1 <= trial <= len(live.trials):
                raise ServiceError(400, "unknown_trial", f"invalid trial {trial!r}")
            if trial not in live.served:
                raise ServiceError(400, "trial_not_served", f"trial {trial} was never served")
            if event.is_decision():
                if trial in live.decided:
                    raise ServiceError(409, "already_decided", f"trial {trial} already decided")
                live.append(event)
                live.decided.add(trial)
                server_events.extend(_respond_to_decision(live, event))
            else:
                # Probe response: the server judges it against the expected ack.
                enriched = dict(payload)
                enriched["correct"] = payload.get("response") == PROBE_EXPECTED
                event = Event(
                    session_id=live.id,
                    t=t,
                    kind=EventKind.OPERATOR_ACTION,
                    trial_id=trial,
                    payload=enriched,
                )
                live.append(event)
                server_events.extend(_respond_to_probe(live, event))
        else:
            live.append(event)
        return server_events

    def _respond_to_decision(live: LiveSession, event: Event) -> list[dict[str, Any]]:
        trial = event.trial_id
        scenario, advice = live.trials[trial - 1]
        t = live.stamp()
        action_id = event.payload.get("action_id", f"d{trial}")
        response = Event(
            session_id=live.id,
            t=t,
            kind=EventKind.SYSTEM_RESPONSE,
            trial_id=trial,
            payload={
                "interaction": "decision_ack",
                "visible_feedback": True,
                "responds_to": action_id,
            },
        )
        live.append(response)
        optimum = solve_optimal(scenario, live.config.task)
        signal = scenario_is_signal(scenario, live.config.task)
        option = event.payload.get("option") or (
            f"{event.payload.get('enemy')}:{event.payload.get('friendly')}"
            if "enemy" in event.payload
            else "none"
        )
        correct = option == optimum.option if signal else event.payload.get("action") == "decline"
        feedback = Event(
            session_id=live.id,
            t=t,
            kind=EventKind.FEEDBACK,
            trial_id=trial,
            payload={
                "correct": correct,
                "advice_correct": advice.correct,
                "reward": 1.0 if correct else 0.0,
            },
        )
        live.append(feedback)
        return [_event_view(response), _event_view(feedback)]

    def _respond_to_probe(live: LiveSession, event: Event) -> list[dict[str, Any]]:
        t = live.stamp()
        action_id = event.payload.get("action_id", f"p{event.trial_id}")
        response = Event(
            session_id=live.id,
            t=t,
            kind=EventKind.SYSTEM_RESPONSE,
            trial_id=event.trial_id,
            payload={
                "interaction": "probe_ack",
                "visible_feedback": True,
                "responds_to": action_id,
            },
        )
        live.append(response)
        return [_event_view(response)]

    return app


def _event_view(ev: Event) -> dict[str, Any]:
    out: dict[str, Any] = {"t": ev.t, "kind": ev.kind.value, "payload": dict(ev.payload)}
    if ev.trial_id is not None:
        out["trial"] = ev.trial_id
    return out
