"""Bridge from event logs to metric values.

Extracts trial structure from a session, enriches judgment records with the
flags the ratio metrics need, and evaluates every selected metric group.
One group failing (for example a detection score on a session with no
noise trials) is recorded as a per-metric error, not a crash, so a report
always accounts for every selected metric.

Flag semantics for derived judgment records:

- accurate: the yes/no response matches the trial's signal/noise label.
- efficient: the action was correct and the decision arrived within the
  configured time limit.
- coherent: the action agrees with at least one rational basis the
  operator was shown — the advisor's recommendation, or the true
  implication of the (never falsified) situation display.
- bias_flagged: the advisor recommended something wrong on this trial;
  bias_corrected: the operator did not follow that wrong recommendation.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, replace
from typing import Any, Mapping, Optional

from ..events import (
    EventKind,
    HeuristicOutcome,
    JudgmentRecord,
    Session,
    TrialKey,
    derive_judgments,
)
from ..judgment import (
    cct_evaluate,
    classification_metrics,
    coherence_evaluate,
    lens_evaluate,
    ndm_evaluate,
    sdt_evaluate,
)
from ..sim.advisor import LEVEL_AUTOMATION_SCORE, AutomationLevel
from ..sim.runner import ground_truth_key
from ..sim.scenario import TaskParams
from ..system import (
    ClarityInput,
    CompositeCoefficients,
    TimingInput,
    attention_metrics,
    cognitive_strain,
    component_clarity,
    critical_risk,
    human_performance,
    interaction_balance,
    operational_latency,
    system_performance,
    weighted_failure_score,
)
from .config import BenchmarkConfig, MetricSettings

__all__ = [
    "TrialData",
    "extract_trials",
    "judgment_records",
    "session_metrics",
    "reliance_outcome",
    "design_metrics",
]


@dataclass
class TrialData:
    trial: int
    stimulus_t: Optional[int] = None
    scenario_payload: Optional[Mapping[str, Any]] = None
    advice_correct: Optional[bool] = None
    recommended_action: Optional[str] = None
    recommended_option: Optional[str] = None
    action: Optional[str] = None
    option: Optional[str] = None
    decision_t: Optional[int] = None
    feedback_correct: Optional[bool] = None
    reward: Optional[float] = None
    probe_t: Optional[int] = None
    probe_resp_t: Optional[int] = None
    probe_correct: Optional[bool] = None

    @property
    def followed_advice(self) -> Optional[bool]:
        if self.recommended_action is None or self.action is None:
            return None
        if self.recommended_action == "decline":
            return self.action == "decline"
        return self.option == self.recommended_option


def extract_trials(session: Session) -> dict[int, TrialData]:
    trials: dict[int, TrialData] = {}
    for ev in session.events:
        if ev.trial_id is None:
            continue
        td = trials.setdefault(ev.trial_id, TrialData(trial=ev.trial_id))
        p = ev.payload
        if ev.kind is EventKind.STIMULUS:
            if p.get("task") == "probe":
                if td.probe_t is None:
                    td.probe_t = ev.t
            elif td.stimulus_t is None:
                td.stimulus_t = ev.t
                td.scenario_payload = p.get("scenario")
        elif ev.kind is EventKind.ADVICE:
            td.advice_correct = p.get("correct")
            td.recommended_action = p.get("recommended_action")
            td.recommended_option = p.get("recommended_option")
        elif ev.kind is EventKind.OPERATOR_ACTION:
            if p.get("action") == "probe":
                if td.probe_resp_t is None:
                    td.probe_resp_t = ev.t
                    td.probe_correct = p.get("correct")
            elif td.decision_t is None:
                td.decision_t = ev.t
                td.action = p.get("action")
                td.option = p.get("option") or (
                    f"{p['enemy']}:{p['friendly']}"
                    if "enemy" in p and "friendly" in p
                    else ("none" if p.get("action") == "decline" else None)
                )
        elif ev.kind is EventKind.FEEDBACK:
            if td.feedback_correct is None:
                td.feedback_correct = p.get("correct")
                td.reward = p.get("reward")
    return trials


def _latency_pairs(session: Session) -> list[int]:
    """Server-stamped response latencies: operator action t to the t of the
    system_response that answers it (matched by action_id)."""
    action_times: dict[str, int] = {}
    latencies: list[int] = []
    for ev in session.events:
        if ev.kind is EventKind.OPERATOR_ACTION and "action_id" in ev.payload:
            action_times[str(ev.payload["action_id"])] = ev.t
        elif ev.kind is EventKind.SYSTEM_RESPONSE:
            ref = ev.payload.get("responds_to")
            if ref is not None and str(ref) in action_times:
                latencies.append(
                    operational_latency(action_times.pop(str(ref)), ev.t)
                )
    return latencies


def _task_correct(td: TrialData, key: TrialKey) -> bool:
    if key.label == "signal":
        return td.option == key.option
    return td.action == "decline"


def judgment_records(
    session: Session,
    key: Mapping[int, TrialKey],
    settings: MetricSettings,
) -> list[JudgmentRecord]:
    """Judgment records with coherence/efficiency/bias/cue flags filled in."""
    base = derive_judgments(session, key)
    trials = extract_trials(session)
    decided = [
        t for t in session.decided_trials() if t not in session.abandoned
    ]
    records = []
    for trial_id, rec in zip(decided, base):
        td = trials[trial_id]
        k = key[trial_id]
        correct = _task_correct(td, k)
        efficient = correct and (
            rec.decision_time is not None
            and rec.decision_time <= settings.efficiency_time_limit_s
        )
        followed = td.followed_advice
        if followed is None:
            coherent = correct
        else:
            coherent = followed or correct
        flagged = td.recommended_action is not None and td.advice_correct is False
        records.append(
            replace(
                rec,
                efficient=efficient,
                coherent=coherent,
                bias_flagged=flagged,
                bias_corrected=flagged and followed is False,
                cue_state=1.0 if k.label == "signal" else 0.0,
            )
        )
    return records


def reliance_outcome(session: Session) -> Optional[HeuristicOutcome]:
    """Advice-reliance heuristic counts for one session (one test).

    Over trials with a decision-level recommendation: following correct
    advice is a true positive, rejecting wrong advice a true negative,
    following wrong advice a false positive, rejecting correct advice a
    false negative. None when the session shows no recommendations.
    """
    tp = tn = fp = fn = 0
    for td in extract_trials(session).values():
        followed = td.followed_advice
        if followed is None or td.advice_correct is None:
            continue
        if followed and td.advice_correct:
            tp += 1
        elif followed and not td.advice_correct:
            fp += 1
        elif not followed and not td.advice_correct:
            tn += 1
        else:
            fn += 1
    if tp + tn + fp + fn == 0:
        return None
    return HeuristicOutcome("advice_reliance", tp=tp, tn=tn, fp=fp, fn=fn)


def _mean(values: list[float]) -> Optional[float]:
    return sum(values) / len(values) if values else None


def session_metrics(
    session: Session,
    config: BenchmarkConfig,
    params: Optional[TaskParams] = None,
) -> tuple[dict[str, Optional[float]], dict[str, str]]:
    """Evaluate the selected per-session metric groups on one session.

    Returns (values, errors); a group that cannot be computed contributes
    an error entry instead of values.
    """
    settings = config.metrics
    values: dict[str, Optional[float]] = {}
    errors: dict[str, str] = {}
    if params is None:
        params = _session_params(session, config)

    try:
        key = ground_truth_key(session, params)
    except (ValueError, KeyError) as exc:
        key = None
        key_error = str(exc)

    trials = extract_trials(session)
    decided = [t for t in session.decided_trials() if t not in session.abandoned]

    records: list[JudgmentRecord] = []
    if key is not None:
        try:
            records = judgment_records(session, key, settings)
        except ValueError as exc:
            key_error = str(exc)
            key = None

    def need_key(group: str) -> bool:
        if key is None:
            errors[group] = f"no ground-truth key: {key_error}"
            return False
        return True

    select = set(settings.select)

    if "accuracy" in select:
        if need_key("accuracy"):
            corrects = [
                1.0 if _task_correct(trials[t], key[t]) else 0.0 for t in decided
            ]
            if corrects:
                values["accuracy"] = _mean(corrects)
            else:
                errors["accuracy"] = "no decided trials"

    rts = [
        float(trials[t].decision_t - trials[t].stimulus_t)
        for t in decided
        if trials[t].decision_t is not None and trials[t].stimulus_t is not None
    ]
    if "response_time" in select:
        if rts:
            values["mean_rt_ms"] = _mean(rts)
            values["median_rt_ms"] = float(statistics.median(rts))
        else:
            errors["response_time"] = "no timed decisions"

    if "sdt" in select and need_key("sdt"):
        try:
            r = sdt_evaluate(records, correction=settings.sdt_correction)
            values["sdt.score"] = r.score
            values["sdt.d_prime"] = r.d_prime
            values["sdt.c"] = r.c
            values["sdt.hit_rate"] = r.hit_rate
            values["sdt.fa_rate"] = r.fa_rate
        except ValueError as exc:
            errors["sdt"] = str(exc)

    if "ndm" in select and need_key("ndm"):
        try:
            r = ndm_evaluate(records)
            values["ndm.score"] = r.ndm_score
            values["ndm.mean_speed"] = _mean(list(r.speeds))
        except ValueError as exc:
            errors["ndm"] = str(exc)

    if "coherence" in select and need_key("coherence"):
        try:
            r = coherence_evaluate(records)
            values["coherence.score"] = r.coherence_score
            values["coherence.b_assessment"] = r.b_assessment
        except ValueError as exc:
            errors["coherence"] = str(exc)

    if "cct" in select:
        times = [rt / 1000.0 for rt in rts]
        try:
            r = cct_evaluate(times)
            values["cct.score"] = r.cct_score
            values["cct.normalized"] = r.normalized_score
        except ValueError as exc:
            errors["cct"] = str(exc)

    if "lens" in select and need_key("lens"):
        try:
            r = lens_evaluate(records)
            values["lens.score"] = r.lens_score
            values["lens.e_validity"] = r.e_validity
        except ValueError as exc:
            errors["lens"] = str(exc)

    if "classification" in select and need_key("classification"):
        tp = sum(1 for r in records if r.ground_truth == "signal" and r.response == "yes")
        fn = sum(1 for r in records if r.ground_truth == "signal" and r.response == "no")
        fp = sum(1 for r in records if r.ground_truth == "noise" and r.response == "yes")
        tn = sum(1 for r in records if r.ground_truth == "noise" and r.response == "no")
        rewards = [
            trials[t].reward for t in decided if trials[t].reward is not None
        ]
        r = classification_metrics(tp, tn, fp, fn, rewards=rewards or None)
        values["classification.accuracy"] = r.accuracy
        values["classification.precision"] = r.precision
        values["classification.recall"] = r.recall
        values["classification.f1"] = r.f1
        if r.cumulative_reward is not None:
            values["classification.cumulative_reward"] = r.cumulative_reward
        for fld, msg in r.errors.items():
            errors[f"classification.{fld}"] = msg

    if "probe" in select:
        probe_correct = [
            1.0 if td.probe_correct else 0.0
            for td in trials.values()
            if td.probe_correct is not None
        ]
        probe_rts = [
            float(td.probe_resp_t - td.probe_t)
            for td in trials.values()
            if td.probe_resp_t is not None and td.probe_t is not None
        ]
        if probe_correct:
            values["probe.accuracy"] = _mean(probe_correct)
            values["probe.mean_rt_ms"] = _mean(probe_rts)
        else:
            errors["probe"] = "no probe responses"

    if "questionnaire" in select:
        if session.questionnaire:
            by_name: dict[str, list[float]] = {}
            for item in session.questionnaire:
                by_name.setdefault(item.name, []).append(float(item.value))
            for name, vals in sorted(by_name.items()):
                values[f"questionnaire.{name}"] = _mean(vals)
        else:
            errors["questionnaire"] = "no questionnaire items"

    if "ol" in select:
        latencies = _latency_pairs(session)
        if latencies:
            values["ol.mean_ms"] = _mean([float(v) for v in latencies])
            values["ol.max_ms"] = float(max(latencies))
        else:
            errors["ol"] = "no action/response pairs"

    if "csi" in select:
        acc = values.get("accuracy")
        if rts and acc is not None:
            inp = TimingInput(
                tct=_mean(rts) / 1000.0,
                bt=settings.csi_baseline_s,
                er=1.0 - acc,
                alpha=settings.csi_alpha,
                beta=settings.csi_beta,
            )
            values["csi"] = cognitive_strain(inp)
        else:
            errors["csi"] = "needs timed decisions and accuracy"

    if "ccs" in select:
        acc = values.get("accuracy")
        if rts and acc is not None:
            clarity_scores = tuple(
                item.value for item in session.questionnaire if item.name == "clarity"
            )
            r = component_clarity(
                ClarityInput(
                    art=_mean(rts) / 1000.0,
                    ert=settings.ccs_baseline_s,
                    ar=acc,
                    gamma=settings.ccs_gamma,
                    delta=settings.ccs_delta,
                    user_scores=clarity_scores,
                )
            )
            values["ccs.ccs1"] = r.ccs1
            if r.ccs2 is not None:
                values["ccs.ccs2"] = r.ccs2
            for fld, msg in r.errors.items():
                errors[f"ccs.{fld}"] = msg
        else:
            errors["ccs"] = "needs timed decisions and accuracy"

    return values, errors


def _session_params(session: Session, config: BenchmarkConfig) -> TaskParams:
    ref = session.config_ref
    if isinstance(ref, Mapping) and isinstance(ref.get("task"), Mapping):
        try:
            return TaskParams.from_payload(ref["task"])
        except (TypeError, ValueError):
            pass
    return config.task


def design_metrics(
    config: BenchmarkConfig, level: Optional[AutomationLevel]
) -> tuple[dict[str, Optional[float]], dict[str, str]]:
    """Design-level metric values: inventory counts, failure census scores,
    and the composite performance modules for one automation level."""
    values: dict[str, Optional[float]] = {}
    errors: dict[str, str] = {}
    select = set(config.metrics.select)

    if "inventory" in select:
        if config.inventory is None:
            errors["inventory"] = "no inventory declared in config"
        else:
            ib = interaction_balance(config.inventory)
            values["inventory.cib"] = ib.cib
            values["inventory.op"] = float(ib.op)
            values["inventory.ir"] = float(ib.ir)
            values["inventory.fe"] = ib.fe
            am = attention_metrics(config.inventory)
            values["inventory.ase"] = am.ase
            values["inventory.war"] = float(am.war)
            values["inventory.ni"] = float(am.ni)
            values["inventory.cri"] = float(critical_risk(config.inventory))
            for fld, msg in {**ib.errors, **am.errors}.items():
                errors[f"inventory.{fld}"] = msg

    if "weighted_failure" in select:
        if not config.failure_census:
            errors["weighted_failure"] = "no failure census declared in config"
        for flavor, items in sorted(config.failure_census.items()):
            try:
                r = weighted_failure_score(items, flavor=flavor)
                values[f"weighted_failure.{flavor}.raw"] = r.raw
                values[f"weighted_failure.{flavor}.paper_normalized"] = r.paper_normalized
            except ValueError as exc:
                errors[f"weighted_failure.{flavor}"] = str(exc)

    if "composite" in select:
        c = config.composite
        automation = LEVEL_AUTOMATION_SCORE[level] if level is not None else 0.0
        coeffs = CompositeCoefficients(
            automation_level=automation,
            alpha1=c.alpha1,
            beta1=c.beta1,
            delta1=c.delta1,
            alpha2=c.alpha2,
            l_threshold=c.l_threshold,
            h_error=c.h_error,
            c_load=c.c_load,
            f_base=c.f_base,
            bfid=c.bfid,
            failure_counts=dict(c.failure_counts),
        )
        try:
            values["composite.human_lumberjack"] = human_performance(coeffs, "lumberjack")
            values["composite.human_load"] = human_performance(coeffs, "load")
            values["composite.system_base"] = system_performance(coeffs, "base")
            values["composite.system_with_bfid"] = system_performance(coeffs, "with_bfid")
        except ValueError as exc:
            errors["composite"] = str(exc)

    return values, errors
