"""Run one scripted session of the engagement task and emit its event log.

A session is fully determined by (task params, level, schedule, agent spec,
n_trials, seed): sub-streams for trial kinds, scenarios, the advisor and
the agent are all derived from the seed by stable hashing, so identical
inputs produce byte-identical logs.
"""

from __future__ import annotations

import hashlib
import random
from typing import Any, Mapping, Optional

from ..events import Event, EventKind, Session, TrialKey, build_session
from .advisor import Advice, AutomationLevel, ReliabilitySchedule, advise
from .agents import AgentSpec, make_agent
from .scenario import (
    Scenario,
    TaskParams,
    adjust_threats_for_kind,
    generate_scenario,
    scenario_is_signal,
    solve_optimal,
)

__all__ = ["derive_seed", "run_session", "ground_truth_key", "session_config_ref"]


def derive_seed(seed: int, label: str) -> int:
    """Stable sub-seed derivation, independent of Python's hash seed."""
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def session_config_ref(
    params: TaskParams,
    level: Optional[AutomationLevel],
    schedule: ReliabilitySchedule,
    agent_spec: Optional[AgentSpec],
    n_trials: int,
    seed: int,
) -> dict[str, Any]:
    return {
        "task": params.to_payload(),
        "level": level.value if level is not None else None,
        "schedule": schedule.to_payload(),
        "agent": agent_spec.name if agent_spec is not None else None,
        "agent_kind": agent_spec.kind if agent_spec is not None else None,
        "n_trials": n_trials,
        "seed": seed,
    }


def run_session(
    params: TaskParams,
    level: Optional[AutomationLevel],
    schedule: ReliabilitySchedule,
    agent_spec: AgentSpec,
    n_trials: int,
    seed: int,
    session_id: Optional[str] = None,
) -> Session:
    """Simulate one operator session; returns a validated Session.

    Per trial: stimulus (scenario payload), advice at the configured level
    (omitted when level is None, the manual baseline), the agent's timed
    decision, a system response after the configured latency, outcome
    feedback, and optionally a secondary communications probe. Scripted
    questionnaire events close the session.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    sid = session_id or f"sim-{seed:x}"
    kind_rng = random.Random(derive_seed(seed, "trial-kinds"))
    advisor_rng = random.Random(derive_seed(seed, "advisor"))
    agent_seed = agent_spec.seed if agent_spec.seed is not None else derive_seed(seed, "agent")
    agent = make_agent(agent_spec, params, random.Random(agent_seed))

    events: list[Event] = []
    cursor = 0
    last_considered = 1
    for trial in range(1, n_trials + 1):
        signal = kind_rng.random() < params.p_signal
        scenario = generate_scenario(params, derive_seed(seed, f"scenario-{trial}"))
        scenario = adjust_threats_for_kind(scenario, params, signal)
        signal = scenario_is_signal(scenario, params)  # label from the data itself
        events.append(
            Event(
                session_id=sid,
                t=cursor,
                kind=EventKind.STIMULUS,
                trial_id=trial,
                payload={"task": "engagement", "scenario": scenario.to_payload()},
            )
        )
        advice: Optional[Advice] = None
        if level is not None:
            advice = advise(scenario, level, schedule, trial, advisor_rng, params)
            events.append(
                Event(
                    session_id=sid,
                    t=cursor,
                    kind=EventKind.ADVICE,
                    trial_id=trial,
                    payload=advice.to_payload(include_truth=True),
                )
            )
        decision = agent.decide(scenario, advice)
        last_considered = decision.options_considered
        t_action = cursor + decision.rt_ms
        action_id = f"d{trial}"
        action_payload: dict[str, Any] = {
            "action": decision.action,
            "option": decision.option,
            "action_id": action_id,
        }
        if decision.enemy is not None:
            action_payload["enemy"] = decision.enemy
            action_payload["friendly"] = decision.friendly
        events.append(
            Event(
                session_id=sid,
                t=t_action,
                kind=EventKind.OPERATOR_ACTION,
                trial_id=trial,
                payload=action_payload,
            )
        )
        t_response = t_action + params.response_latency_ms
        events.append(
            Event(
                session_id=sid,
                t=t_response,
                kind=EventKind.SYSTEM_RESPONSE,
                trial_id=trial,
                payload={
                    "interaction": "decision_ack",
                    "visible_feedback": True,
                    "responds_to": action_id,
                },
            )
        )
        optimum = solve_optimal(scenario, params)
        correct = (
            decision.option == optimum.option if signal else decision.action == "decline"
        )
        advice_correct = advice.correct if advice is not None else None
        events.append(
            Event(
                session_id=sid,
                t=t_response,
                kind=EventKind.FEEDBACK,
                trial_id=trial,
                payload={
                    "correct": correct,
                    "advice_correct": advice_correct,
                    "reward": 1.0 if correct else 0.0,
                },
            )
        )
        agent.observe_feedback(correct, advice_correct)
        cursor = t_response

        if params.probe_enabled:
            t_probe = cursor + params.probe_gap_ms
            events.append(
                Event(
                    session_id=sid,
                    t=t_probe,
                    kind=EventKind.STIMULUS,
                    trial_id=trial,
                    payload={"task": "probe", "prompt": "acknowledge comms"},
                )
            )
            probe_correct, probe_rt = agent.probe_response(last_considered)
            t_probe_resp = t_probe + probe_rt
            probe_id = f"p{trial}"
            events.append(
                Event(
                    session_id=sid,
                    t=t_probe_resp,
                    kind=EventKind.OPERATOR_ACTION,
                    trial_id=trial,
                    payload={
                        "action": "probe",
                        "correct": probe_correct,
                        "action_id": probe_id,
                    },
                )
            )
            t_probe_ack = t_probe_resp + params.response_latency_ms
            events.append(
                Event(
                    session_id=sid,
                    t=t_probe_ack,
                    kind=EventKind.SYSTEM_RESPONSE,
                    trial_id=trial,
                    payload={
                        "interaction": "probe_ack",
                        "visible_feedback": True,
                        "responds_to": probe_id,
                    },
                )
            )
            cursor = t_probe_ack
        cursor += params.inter_trial_gap_ms

    n_pairs = params.n_enemies * params.n_friendlies
    for name, value in agent.questionnaire(n_pairs):
        events.append(
            Event(
                session_id=sid,
                t=cursor,
                kind=EventKind.QUESTIONNAIRE,
                payload={"name": name, "value": value, "source": "scripted"},
            )
        )

    return build_session(
        sid,
        events,
        config_ref=session_config_ref(params, level, schedule, agent_spec, n_trials, seed),
        subject_kind=f"scripted:{agent_spec.name}",
        n_trials=n_trials,
    )


def ground_truth_key(
    session: Session, params: Optional[TaskParams] = None
) -> dict[int, TrialKey]:
    """Rebuild the ground-truth key from the scenarios logged in a session.

    The label is whether the logged scenario's peak danger reaches the task
    threshold; the flagged option is the exhaustive-search optimum. Works
    identically for scripted and human sessions since both log the same
    stimulus payloads.
    """
    if params is None:
        ref = session.config_ref or {}
        task = ref.get("task") if isinstance(ref, Mapping) else None
        if not task:
            raise ValueError("session has no task parameters in its config_ref")
        params = TaskParams.from_payload(task)
    key: dict[int, TrialKey] = {}
    for ev in session.events:
        if (
            ev.kind is EventKind.STIMULUS
            and ev.trial_id is not None
            and ev.payload.get("task") == "engagement"
            and ev.trial_id not in key
        ):
            scenario = Scenario.from_payload(ev.payload["scenario"])
            label = "signal" if scenario_is_signal(scenario, params) else "noise"
            key[ev.trial_id] = TrialKey(
                label=label, option=solve_optimal(scenario, params).option
            )
    return key
