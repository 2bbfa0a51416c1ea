"""Seeded command-and-control engagement task: scenarios, advisors, agents."""

from .advisor import (
    LEVEL_AUTOMATION_SCORE,
    Advice,
    AutomationLevel,
    ReliabilitySchedule,
    advise,
)
from .agents import AgentSpec, make_agent
from .scenario import (
    Enemy,
    Friendly,
    Scenario,
    Solution,
    TaskParams,
    danger_score,
    generate_scenario,
    ranked_pairs,
    scenario_is_signal,
    solve_optimal,
)
from .runner import derive_seed, ground_truth_key, run_session

__all__ = [
    "TaskParams",
    "Scenario",
    "Enemy",
    "Friendly",
    "Solution",
    "generate_scenario",
    "danger_score",
    "ranked_pairs",
    "scenario_is_signal",
    "solve_optimal",
    "AutomationLevel",
    "LEVEL_AUTOMATION_SCORE",
    "ReliabilitySchedule",
    "Advice",
    "advise",
    "AgentSpec",
    "make_agent",
    "run_session",
    "ground_truth_key",
    "derive_seed",
]
