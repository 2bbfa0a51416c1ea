"""Automation advice at four support levels with a reliability schedule.

The information level shows the full pair/distance table and never
recommends; its content is always truthful, so its correctness flag is
always true. The three decision levels recommend: a prioritized full list,
the top three options, or a single best option. An incorrect decision-level
advice is deterministic, not random: on an engagement-warranted trial it
promotes the second-best pair (or recommends declining when only one pair
exists); on a no-engagement trial it recommends engaging the top pair.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

from .scenario import Scenario, TaskParams, ranked_pairs, scenario_is_signal

__all__ = [
    "AutomationLevel",
    "LEVEL_AUTOMATION_SCORE",
    "ReliabilitySchedule",
    "Advice",
    "advise",
]


class AutomationLevel(str, Enum):
    INFORMATION = "information"
    LOW_DECISION = "low_decision"
    MEDIUM_DECISION = "medium_decision"
    HIGH_DECISION = "high_decision"


# Numeric automation-level coding on [0, 1] for the composite performance
# modules, spanning information-only support up to full decision automation.
LEVEL_AUTOMATION_SCORE: dict[AutomationLevel, float] = {
    AutomationLevel.INFORMATION: 0.25,
    AutomationLevel.LOW_DECISION: 0.5,
    AutomationLevel.MEDIUM_DECISION: 0.75,
    AutomationLevel.HIGH_DECISION: 1.0,
}


@dataclass(frozen=True)
class ReliabilitySchedule:
    rate: float = 1.0
    first_failure_trial: Optional[int] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"rate must be in [0, 1], got {self.rate!r}")
        if self.first_failure_trial is not None and self.first_failure_trial < 1:
            raise ValueError("first_failure_trial must be >= 1")

    def draw_correct(self, trial_index: int, rng: random.Random) -> bool:
        """Correct before the scheduled first failure, incorrect exactly at
        it, Bernoulli(rate) afterwards (and throughout when unscheduled)."""
        if trial_index < 1:
            raise ValueError("trial_index starts at 1")
        if self.first_failure_trial is not None:
            if trial_index < self.first_failure_trial:
                return True
            if trial_index == self.first_failure_trial:
                return False
        return rng.random() < self.rate

    def to_payload(self) -> dict[str, Any]:
        out: dict[str, Any] = {"rate": self.rate}
        if self.first_failure_trial is not None:
            out["first_failure_trial"] = self.first_failure_trial
        return out

    @classmethod
    def from_payload(cls, payload: dict[str, Any]) -> "ReliabilitySchedule":
        return cls(
            rate=payload.get("rate", 1.0),
            first_failure_trial=payload.get("first_failure_trial"),
        )


@dataclass(frozen=True)
class Advice:
    level: AutomationLevel
    correct: bool  # ground-truth flag; hidden from agents' decision inputs
    recommended_action: Optional[str]  # "engage" | "decline"; None for information
    pairs: tuple[dict[str, Any], ...]  # level-shaped content, best first
    distances: tuple[dict[str, Any], ...] = ()  # information level only

    @property
    def recommended_option(self) -> Optional[str]:
        if self.recommended_action == "decline":
            return "none"
        if self.recommended_action == "engage" and self.pairs:
            return f"{self.pairs[0]['enemy']}:{self.pairs[0]['friendly']}"
        return None

    def to_payload(self, include_truth: bool = True) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "level": self.level.value,
            "pairs": [dict(p) for p in self.pairs],
        }
        if self.recommended_action is not None:
            payload["recommended_action"] = self.recommended_action
            payload["recommended_option"] = self.recommended_option
        if self.distances:
            payload["distances"] = [dict(d) for d in self.distances]
        if include_truth:
            payload["correct"] = self.correct
        return payload


def _pair_view(p: Any, rank: int) -> dict[str, Any]:
    return {
        "rank": rank,
        "enemy": p.enemy_id,
        "friendly": p.friendly_id,
        "distance": round(p.distance, 6),
    }


def advise(
    scenario: Scenario,
    level: AutomationLevel,
    schedule: ReliabilitySchedule,
    trial_index: int,
    rng: random.Random,
    params: TaskParams,
) -> Advice:
    """Produce the advice for one trial.

    Content shape per level: information shows every pair with true
    distances (and distances to headquarters); low shows the full
    prioritized list; medium only the top three; high a single option.
    """
    level = AutomationLevel(level)
    pairs = ranked_pairs(scenario, params)
    signal = scenario_is_signal(scenario, params)

    if level is AutomationLevel.INFORMATION:
        distances = tuple(
            {
                "enemy": e.id,
                "friendly": f.id,
                "distance": round(math.hypot(e.x - f.x, e.y - f.y), 6),
                "enemy_hq_distance": round(
                    math.hypot(e.x - scenario.hq[0], e.y - scenario.hq[1]), 6
                ),
                "threat": e.threat,
            }
            for e in scenario.enemies
            for f in scenario.friendlies
        )
        return Advice(
            level=level,
            correct=True,
            recommended_action=None,
            pairs=(),
            distances=distances,
        )

    correct = schedule.draw_correct(trial_index, rng)
    if correct:
        action = "engage" if signal else "decline"
        ordered = pairs
    elif signal:
        if len(pairs) >= 2:
            action = "engage"
            ordered = [pairs[1], pairs[0], *pairs[2:]]
        else:
            action = "decline"
            ordered = pairs
    else:
        action = "engage"
        ordered = pairs

    if level is AutomationLevel.LOW_DECISION:
        shown = ordered
    elif level is AutomationLevel.MEDIUM_DECISION:
        shown = ordered[: min(3, len(ordered))]
    else:
        shown = ordered[:1]
    return Advice(
        level=level,
        correct=correct,
        recommended_action=action,
        pairs=tuple(_pair_view(p, i + 1) for i, p in enumerate(shown)),
    )
