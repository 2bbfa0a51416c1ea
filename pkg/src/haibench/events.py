"""Canonical event-log data model and newline-delimited JSON ingestion.

A session log is one JSON object per line. The first line may be a header
record (``kind="header"``) carrying session-level fields; every other line
is an event with fields ``{session, t, trial, kind, payload}``. ``t`` is
integer milliseconds since session start and must be nondecreasing down
the file. This schema is specific to this tool (there is no established
interchange format for operator-system event logs); it is the contract
between the simulator, the session service, and the scoring pipeline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import IO, Any, Iterable, Iterator, Mapping, Optional, Union

__all__ = [
    "LogError",
    "EventKind",
    "Event",
    "LikertItem",
    "Session",
    "FrontEndComponent",
    "BackEndInteraction",
    "SystemInventory",
    "JudgmentRecord",
    "HeuristicOutcome",
    "TrialKey",
    "build_session",
    "ingest_log",
    "serialize_session",
    "derive_judgments",
]

LIKERT_MIN = 1
LIKERT_MAX = 7


class LogError(ValueError):
    """Malformed log input or violated session invariant."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class EventKind(str, Enum):
    STIMULUS = "stimulus"
    ADVICE = "advice"
    OPERATOR_ACTION = "operator_action"
    SYSTEM_RESPONSE = "system_response"
    FEEDBACK = "feedback"
    ALARM = "alarm"
    QUESTIONNAIRE = "questionnaire"


# File-format record kinds: every event kind plus the session header.
HEADER_KIND = "header"


@dataclass(frozen=True)
class Event:
    session_id: str
    t: int
    kind: EventKind
    trial_id: Optional[int] = None
    payload: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.t, int) or isinstance(self.t, bool) or self.t < 0:
            raise LogError(f"event t must be a nonnegative integer, got {self.t!r}")
        if self.trial_id is not None and (
            not isinstance(self.trial_id, int) or self.trial_id < 1
        ):
            raise LogError(f"trial id must be a positive integer, got {self.trial_id!r}")

    def is_decision(self) -> bool:
        """An operator_action that is the trial's primary decision.

        Probe (secondary-task) responses carry ``action="probe"`` and do not
        count; any other operator_action does.
        """
        return (
            self.kind is EventKind.OPERATOR_ACTION
            and self.payload.get("action") != "probe"
        )


@dataclass(frozen=True)
class LikertItem:
    name: str
    value: int

    def __post_init__(self) -> None:
        if not isinstance(self.value, int) or isinstance(self.value, bool):
            raise LogError(f"likert value must be an integer, got {self.value!r}")
        if not LIKERT_MIN <= self.value <= LIKERT_MAX:
            raise LogError(
                f"likert value {self.value} outside scale "
                f"{LIKERT_MIN}-{LIKERT_MAX} for item {self.name!r}"
            )


@dataclass(frozen=True)
class Session:
    session_id: str
    events: tuple[Event, ...]
    config_ref: Optional[Mapping[str, Any]] = None
    subject_kind: Optional[str] = None
    n_trials: Optional[int] = None
    abandoned: frozenset[int] = frozenset()
    questionnaire: tuple[LikertItem, ...] = ()

    def decided_trials(self) -> list[int]:
        seen: list[int] = []
        for ev in self.events:
            if ev.is_decision() and ev.trial_id is not None and ev.trial_id not in seen:
                seen.append(ev.trial_id)
        return seen


def build_session(
    session_id: str,
    events: Iterable[Event],
    config_ref: Optional[Mapping[str, Any]] = None,
    subject_kind: Optional[str] = None,
    n_trials: Optional[int] = None,
    abandoned: Iterable[int] = (),
) -> Session:
    """Assemble and validate a Session from events.

    Enforces the ordering invariant, trial declarations, the
    one-decision-per-trial rule, and collects questionnaire events.
    """
    evs = tuple(events)
    abandoned_set = frozenset(abandoned)
    last_t = -1
    referenced: dict[int, int] = {}  # trial -> decision count
    items: list[LikertItem] = []
    for ev in evs:
        if ev.session_id != session_id:
            raise LogError(
                f"event session {ev.session_id!r} does not match {session_id!r}"
            )
        if ev.t < last_t:
            raise LogError(f"timestamp regression: {ev.t} after {last_t}")
        last_t = ev.t
        if ev.trial_id is not None:
            if n_trials is not None and ev.trial_id > n_trials:
                raise LogError(
                    f"dangling trial_id {ev.trial_id}: only {n_trials} trials declared"
                )
            referenced.setdefault(ev.trial_id, 0)
            if ev.is_decision():
                referenced[ev.trial_id] += 1
        if ev.kind is EventKind.QUESTIONNAIRE:
            payload = ev.payload
            if "name" not in payload or "value" not in payload:
                raise LogError("questionnaire event must carry name and value")
            items.append(LikertItem(str(payload["name"]), payload["value"]))
    for trial, n_decisions in sorted(referenced.items()):
        if trial in abandoned_set:
            if n_decisions:
                raise LogError(f"trial {trial} is marked abandoned but has a decision")
        elif n_decisions == 0:
            raise LogError(f"trial {trial} has no decision and is not marked abandoned")
        elif n_decisions > 1:
            raise LogError(f"trial {trial} has {n_decisions} decision events")
    return Session(
        session_id=session_id,
        events=evs,
        config_ref=config_ref,
        subject_kind=subject_kind,
        n_trials=n_trials,
        abandoned=abandoned_set,
        questionnaire=tuple(items),
    )


def _iter_lines(raw: Union[bytes, str, IO[bytes], IO[str], Iterable[str]]) -> Iterator[str]:
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise LogError(f"log is not valid UTF-8: {exc}") from exc
    if isinstance(raw, str):
        yield from raw.splitlines()
        return
    if hasattr(raw, "read"):
        data = raw.read()
        yield from _iter_lines(data)
        return
    for line in raw:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        yield line.rstrip("\n")


_KNOWN_KINDS = {k.value for k in EventKind}


def ingest_log(raw: Union[bytes, str, IO[bytes], IO[str], Iterable[str]]) -> Session:
    """Parse and validate a newline-delimited event log into a Session.

    The header record, when present, must be the first line. Raises
    LogError with the offending line number on malformed input, timestamp
    regression, unknown kinds, or dangling trial references.
    """
    session_id: Optional[str] = None
    config_ref = None
    subject_kind = None
    n_trials = None
    abandoned: tuple[int, ...] = ()
    events: list[Event] = []
    last_t = -1
    saw_any = False

    for lineno, line in enumerate(_iter_lines(raw), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LogError(f"malformed record: {exc.msg}", line=lineno) from exc
        if not isinstance(record, dict):
            raise LogError("record is not an object", line=lineno)
        kind = record.get("kind")
        sid = record.get("session")
        if not isinstance(sid, str) or not sid:
            raise LogError("missing or invalid session field", line=lineno)
        if session_id is None:
            session_id = sid
        elif sid != session_id:
            raise LogError(
                f"session changed from {session_id!r} to {sid!r}", line=lineno
            )
        t = record.get("t")
        if not isinstance(t, int) or isinstance(t, bool) or t < 0:
            raise LogError(f"t must be a nonnegative integer, got {t!r}", line=lineno)

        if kind == HEADER_KIND:
            if saw_any:
                raise LogError("header record must be the first line", line=lineno)
            payload = record.get("payload", {})
            if not isinstance(payload, dict):
                raise LogError("header payload must be an object", line=lineno)
            config_ref = payload.get("config_ref")
            subject_kind = payload.get("subject_kind")
            n_trials = payload.get("trials")
            if n_trials is not None and (not isinstance(n_trials, int) or n_trials < 0):
                raise LogError(f"invalid trials declaration {n_trials!r}", line=lineno)
            ab = payload.get("abandoned", [])
            if not isinstance(ab, list) or not all(
                isinstance(x, int) and x >= 1 for x in ab
            ):
                raise LogError("abandoned must be a list of trial ids", line=lineno)
            abandoned = tuple(ab)
            saw_any = True
            last_t = t
            continue

        saw_any = True
        if kind not in _KNOWN_KINDS:
            raise LogError(f"unknown kind {kind!r}", line=lineno)
        if t < last_t:
            raise LogError(f"timestamp regression at line {lineno}", line=lineno)
        last_t = t
        trial = record.get("trial")
        payload = record.get("payload", {})
        if not isinstance(payload, dict):
            raise LogError("payload must be an object", line=lineno)
        try:
            events.append(
                Event(
                    session_id=sid,
                    t=t,
                    kind=EventKind(kind),
                    trial_id=trial,
                    payload=payload,
                )
            )
        except LogError as exc:
            raise LogError(str(exc), line=lineno) from exc

    if session_id is None:
        raise LogError("empty log")
    return build_session(
        session_id,
        events,
        config_ref=config_ref,
        subject_kind=subject_kind,
        n_trials=n_trials,
        abandoned=abandoned,
    )


def _dump(record: Mapping[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def serialize_session(session: Session) -> str:
    """Render a Session back to its newline-delimited log form.

    Inverse of ingest_log: ingest_log(serialize_session(s)) == s for any
    valid session.
    """
    lines: list[str] = []
    has_header = (
        session.config_ref is not None
        or session.subject_kind is not None
        or session.n_trials is not None
        or session.abandoned
    )
    if has_header:
        payload: dict[str, Any] = {}
        if session.config_ref is not None:
            payload["config_ref"] = session.config_ref
        if session.subject_kind is not None:
            payload["subject_kind"] = session.subject_kind
        if session.n_trials is not None:
            payload["trials"] = session.n_trials
        if session.abandoned:
            payload["abandoned"] = sorted(session.abandoned)
        lines.append(
            _dump({"session": session.session_id, "t": 0, "kind": HEADER_KIND, "payload": payload})
        )
    for ev in session.events:
        record: dict[str, Any] = {
            "session": ev.session_id,
            "t": ev.t,
            "kind": ev.kind.value,
            "payload": dict(ev.payload),
        }
        if ev.trial_id is not None:
            record["trial"] = ev.trial_id
        lines.append(_dump(record))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# System inventory (front-end components / back-end interactions)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrontEndComponent:
    id: str
    chunk_group: Optional[str] = None


@dataclass(frozen=True)
class BackEndInteraction:
    id: str
    provides_feedback: bool = False
    duplicate_of: Optional[str] = None
    critical: bool = False
    overlooked: bool = False


@dataclass(frozen=True)
class SystemInventory:
    front_end: tuple[FrontEndComponent, ...] = ()
    back_end: tuple[BackEndInteraction, ...] = ()

    def __post_init__(self) -> None:
        front_ids = [c.id for c in self.front_end]
        if len(set(front_ids)) != len(front_ids):
            raise ValueError("duplicate front-end component ids")
        back_ids = [b.id for b in self.back_end]
        if len(set(back_ids)) != len(back_ids):
            raise ValueError("duplicate back-end interaction ids")
        by_id = {b.id: b for b in self.back_end}
        for b in self.back_end:
            if b.duplicate_of is None:
                continue
            if b.duplicate_of == b.id:
                raise ValueError(f"back-end {b.id!r} duplicates itself")
            if b.duplicate_of not in by_id:
                raise ValueError(
                    f"back-end {b.id!r} duplicates unknown id {b.duplicate_of!r}"
                )
        # duplicate_of chains must terminate.
        for b in self.back_end:
            seen = {b.id}
            cur = b
            while cur.duplicate_of is not None:
                if cur.duplicate_of in seen:
                    raise ValueError(f"duplicate_of cycle involving {b.id!r}")
                seen.add(cur.duplicate_of)
                cur = by_id[cur.duplicate_of]

    def resolve_duplicate_root(self, interaction_id: str) -> str:
        by_id = {b.id: b for b in self.back_end}
        cur = by_id[interaction_id]
        while cur.duplicate_of is not None:
            cur = by_id[cur.duplicate_of]
        return cur.id


# ---------------------------------------------------------------------------
# Judgment records
# ---------------------------------------------------------------------------

GROUND_TRUTHS = ("signal", "noise")
RESPONSES = ("yes", "no")


@dataclass(frozen=True)
class JudgmentRecord:
    """One ground-truth vs. response pair, with optional scoring flags.

    The optional fields beyond the core triple feed specific metrics:
    coherent/accurate/efficient gate the ratio scores, the bias pair feeds
    the default bias-assessment hook, and cue_state feeds the default
    cue-validity hook (correlated against ground truth).
    """

    ground_truth: str
    response: str
    decision_time: Optional[float] = None
    coherent: Optional[bool] = None
    accurate: Optional[bool] = None
    efficient: Optional[bool] = None
    bias_flagged: Optional[bool] = None
    bias_corrected: Optional[bool] = None
    cue_state: Optional[float] = None

    def __post_init__(self) -> None:
        if self.ground_truth not in GROUND_TRUTHS:
            raise ValueError(f"ground_truth must be signal|noise, got {self.ground_truth!r}")
        if self.response not in RESPONSES:
            raise ValueError(f"response must be yes|no, got {self.response!r}")
        if self.decision_time is not None:
            dt = self.decision_time
            if not (dt > 0) or dt != dt or dt == float("inf"):
                raise ValueError(f"decision_time must be strictly positive and finite, got {dt!r}")


@dataclass(frozen=True)
class HeuristicOutcome:
    """Confusion counts for one heuristic on one test."""

    heuristic_id: str
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self) -> None:
        for name in ("tp", "tn", "fp", "fn"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
        if self.tp + self.tn + self.fp + self.fn < 1:
            raise ValueError("heuristic outcome has all-zero counts")


@dataclass(frozen=True)
class TrialKey:
    """Ground truth for one trial: its label and the flagged option."""

    label: str  # "signal" | "noise"
    option: str

    def __post_init__(self) -> None:
        if self.label not in GROUND_TRUTHS:
            raise ValueError(f"label must be signal|noise, got {self.label!r}")


def _selected_option(ev: Event) -> str:
    payload = ev.payload
    if "option" in payload:
        return str(payload["option"])
    if "enemy" in payload and "friendly" in payload:
        return f"{payload['enemy']}:{payload['friendly']}"
    if payload.get("action") == "decline":
        return "none"
    raise LogError(f"decision event at t={ev.t} has no recognizable option")


def derive_judgments(
    session: Session, key: Mapping[int, TrialKey]
) -> list[JudgmentRecord]:
    """Turn a session's decided trials into judgment records.

    decision_time is seconds from the trial's (non-probe) stimulus to its
    decision; response is "yes" iff the operator selected the key's
    flagged option. Abandoned trials are excluded.
    """
    stimulus_t: dict[int, int] = {}
    decisions: dict[int, Event] = {}
    order: list[int] = []
    for ev in session.events:
        if ev.trial_id is None:
            continue
        if (
            ev.kind is EventKind.STIMULUS
            and ev.payload.get("task") != "probe"
            and ev.trial_id not in stimulus_t
        ):
            stimulus_t[ev.trial_id] = ev.t
        if ev.is_decision() and ev.trial_id not in decisions:
            decisions[ev.trial_id] = ev
            order.append(ev.trial_id)

    records: list[JudgmentRecord] = []
    for trial in order:
        if trial in session.abandoned:
            continue
        if trial not in key:
            raise LogError(f"trial {trial} missing from ground-truth key")
        if trial not in stimulus_t:
            raise LogError(f"trial {trial} has no stimulus event")
        ev = decisions[trial]
        dt_ms = ev.t - stimulus_t[trial]
        if dt_ms <= 0:
            raise LogError(f"trial {trial} has nonpositive decision time {dt_ms} ms")
        selected = _selected_option(ev)
        k = key[trial]
        response = "yes" if selected == k.option else "no"
        accurate = (response == "yes") == (k.label == "signal")
        records.append(
            JudgmentRecord(
                ground_truth=k.label,
                response=response,
                decision_time=dt_ms / 1000.0,
                accurate=accurate,
            )
        )
    return records


def enrich(record: JudgmentRecord, **flags: Any) -> JudgmentRecord:
    """Return a copy of a record with scoring flags filled in."""
    return replace(record, **flags)
