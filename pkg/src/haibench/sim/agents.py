"""Scripted operator agents with seeded response-time and error models.

Four behavioral profiles:

- ``manual``: ignores advice, solves the task itself; a configurable noise
  probability substitutes a plausible wrong action.
- ``compliant``: always follows decision-level recommendations, modeling
  complacent reliance on automation; falls back to its own (perfect) solve
  when the advice carries no recommendation.
- ``anchored``: sticks with the presented recommendation with a fixed
  probability regardless of its quality, modeling anchoring on automation
  output.
- ``calibrated``: follows advice with probability equal to its current
  trust, which moves down after incorrect-advice feedback and up after
  correct-advice feedback.

Response times are lognormal around a median that scales with how many
options the agent had to consider, so stronger decision automation yields
faster decisions for agents that use it, for identical RT parameters.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Any, Optional

from .advisor import Advice
from .scenario import Scenario, TaskParams, ranked_pairs, scenario_is_signal, solve_optimal

__all__ = ["AgentSpec", "Decision", "Agent", "make_agent", "AGENT_KINDS"]

AGENT_KINDS = ("manual", "compliant", "anchored", "calibrated")


@dataclass(frozen=True)
class AgentSpec:
    name: str
    kind: str
    rt_median_ms: float = 900.0
    rt_sigma: float = 0.35
    rt_per_option: float = 0.1
    noise: float = 0.0  # manual only
    anchor_prob: float = 0.7  # anchored only
    trust_init: float = 0.8  # calibrated only
    trust_step: float = 0.1  # calibrated only
    probe_accuracy: float = 0.95
    probe_rt_median_ms: float = 600.0
    probe_rt_sigma: float = 0.3
    seed: Optional[int] = None  # overrides the session-derived agent seed

    def __post_init__(self) -> None:
        if self.kind not in AGENT_KINDS:
            raise ValueError(f"unknown agent kind {self.kind!r}")
        if not self.rt_median_ms > 0 or not self.probe_rt_median_ms > 0:
            raise ValueError("rt medians must be positive")
        if self.rt_sigma < 0 or self.probe_rt_sigma < 0:
            raise ValueError("rt sigmas must be nonnegative")
        for name in ("noise", "anchor_prob", "trust_init", "trust_step", "probe_accuracy"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v!r}")

    def to_payload(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "kind": self.kind,
            "rt_median_ms": self.rt_median_ms,
            "rt_sigma": self.rt_sigma,
            "rt_per_option": self.rt_per_option,
            "noise": self.noise,
            "anchor_prob": self.anchor_prob,
            "trust_init": self.trust_init,
            "trust_step": self.trust_step,
            "probe_accuracy": self.probe_accuracy,
            "probe_rt_median_ms": self.probe_rt_median_ms,
            "probe_rt_sigma": self.probe_rt_sigma,
        }

    @classmethod
    def from_payload(cls, payload: dict[str, Any]) -> "AgentSpec":
        known = {f for f in cls.__dataclass_fields__}  # type: ignore[attr-defined]
        return cls(**{k: v for k, v in payload.items() if k in known})


@dataclass(frozen=True)
class Decision:
    action: str  # "engage" | "decline"
    option: str  # "E:F" or "none"
    enemy: Optional[str]
    friendly: Optional[str]
    rt_ms: int
    options_considered: int
    followed_advice: Optional[bool]  # None when no recommendation was shown


def _lognormal_ms(median_ms: float, sigma: float, rng: random.Random) -> int:
    return max(1, round(rng.lognormvariate(math.log(median_ms), sigma)))


class Agent:
    """Stateful per-session operator. Subclasses decide; this base handles
    RT sampling, the secondary probe, and the synthetic questionnaire."""

    def __init__(self, spec: AgentSpec, params: TaskParams, rng: random.Random):
        self.spec = spec
        self.params = params
        self.rng = rng
        self._advice_seen = 0
        self._advice_correct = 0
        self._own_correct = 0
        self._decisions = 0
        self._considered: list[int] = []

    # -- decision -----------------------------------------------------------

    def _own_action(self, scenario: Scenario) -> tuple[str, str, Optional[str], Optional[str], int]:
        sol = solve_optimal(scenario, self.params)
        n = len(scenario.enemies) * len(scenario.friendlies)
        if scenario_is_signal(scenario, self.params):
            return "engage", sol.option, sol.enemy_id, sol.friendly_id, n
        return "decline", "none", None, None, n

    def _erroneous_action(
        self, scenario: Scenario
    ) -> tuple[str, str, Optional[str], Optional[str], int]:
        pairs = ranked_pairs(scenario, self.params)
        n = len(pairs)
        if scenario_is_signal(scenario, self.params):
            if len(pairs) >= 2:
                p = pairs[1]
                return "engage", p.option, p.enemy_id, p.friendly_id, n
            return "decline", "none", None, None, n
        p = pairs[0]
        return "engage", p.option, p.enemy_id, p.friendly_id, n

    def _follow(self, advice: Advice) -> tuple[str, str, Optional[str], Optional[str], int]:
        considered = max(1, len(advice.pairs))
        if advice.recommended_action == "decline":
            return "decline", "none", None, None, considered
        top = advice.pairs[0]
        return "engage", f"{top['enemy']}:{top['friendly']}", top["enemy"], top["friendly"], considered

    def _choose(
        self, scenario: Scenario, advice: Optional[Advice]
    ) -> tuple[tuple[str, str, Optional[str], Optional[str], int], Optional[bool]]:
        raise NotImplementedError

    def decide(self, scenario: Scenario, advice: Optional[Advice]) -> Decision:
        (action, option, enemy, friendly, considered), followed = self._choose(
            scenario, advice
        )
        self._considered.append(considered)
        median = self.spec.rt_median_ms * (1.0 + self.spec.rt_per_option * considered)
        rt = _lognormal_ms(median, self.spec.rt_sigma, self.rng)
        return Decision(
            action=action,
            option=option,
            enemy=enemy,
            friendly=friendly,
            rt_ms=rt,
            options_considered=considered,
            followed_advice=followed,
        )

    # -- feedback and secondary task ----------------------------------------

    def observe_feedback(self, correct: bool, advice_correct: Optional[bool]) -> None:
        self._decisions += 1
        if correct:
            self._own_correct += 1
        if advice_correct is not None:
            self._advice_seen += 1
            if advice_correct:
                self._advice_correct += 1

    def probe_response(self, last_considered: int) -> tuple[bool, int]:
        """Secondary communications probe: accuracy draw plus an RT that
        inherits the primary task's load multiplier."""
        correct = self.rng.random() < self.spec.probe_accuracy
        median = self.spec.probe_rt_median_ms * (
            1.0 + self.spec.rt_per_option * last_considered
        )
        return correct, _lognormal_ms(median, self.spec.probe_rt_sigma, self.rng)

    # -- synthetic self-report ----------------------------------------------

    def _trust_value(self) -> float:
        if self._advice_seen == 0:
            return 0.5
        return self._advice_correct / self._advice_seen

    def questionnaire(self, n_pairs: int) -> list[tuple[str, int]]:
        """Deterministic scripted Likert responses (1-7), derived from the
        session the agent just experienced. These are synthetic stand-ins
        for human self-report, not a validated instrument.
        """

        def clamp(v: float) -> int:
            return max(1, min(7, round(v)))

        load = (
            sum(self._considered) / len(self._considered) / max(1, n_pairs)
            if self._considered
            else 0.0
        )
        workload = clamp(1 + 6 * load)
        trust = clamp(1 + 6 * self._trust_value())
        confidence = clamp(
            1 + 6 * (self._own_correct / self._decisions if self._decisions else 0.5)
        )
        clarity = clamp(8 - workload)
        return [
            ("workload", workload),
            ("trust", trust),
            ("self_confidence", confidence),
            ("clarity", clarity),
        ]


class ManualAgent(Agent):
    def _choose(self, scenario, advice):
        if self.spec.noise > 0 and self.rng.random() < self.spec.noise:
            return self._erroneous_action(scenario), None
        return self._own_action(scenario), None


class CompliantAgent(Agent):
    def _choose(self, scenario, advice):
        if advice is not None and advice.recommended_action is not None:
            return self._follow(advice), True
        return self._own_action(scenario), None


class AnchoredAgent(Agent):
    def _choose(self, scenario, advice):
        if advice is not None and advice.recommended_action is not None:
            if self.rng.random() < self.spec.anchor_prob:
                return self._follow(advice), True
            return self._own_action(scenario), False
        return self._own_action(scenario), None


class CalibratedAgent(Agent):
    def __init__(self, spec: AgentSpec, params: TaskParams, rng: random.Random):
        super().__init__(spec, params, rng)
        self.trust = spec.trust_init

    def _choose(self, scenario, advice):
        if advice is not None and advice.recommended_action is not None:
            if self.rng.random() < self.trust:
                return self._follow(advice), True
            return self._own_action(scenario), False
        return self._own_action(scenario), None

    def observe_feedback(self, correct: bool, advice_correct: Optional[bool]) -> None:
        super().observe_feedback(correct, advice_correct)
        if advice_correct is not None:
            step = self.spec.trust_step
            self.trust = min(1.0, max(0.0, self.trust + (step if advice_correct else -step)))

    def _trust_value(self) -> float:
        return self.trust


_AGENT_CLASSES = {
    "manual": ManualAgent,
    "compliant": CompliantAgent,
    "anchored": AnchoredAgent,
    "calibrated": CalibratedAgent,
}


def make_agent(spec: AgentSpec, params: TaskParams, rng: random.Random) -> Agent:
    return _AGENT_CLASSES[spec.kind](spec, params, rng)
