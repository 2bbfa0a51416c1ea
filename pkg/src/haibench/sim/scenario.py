"""Engagement-selection scenarios on a grid map.

Each scenario places a headquarters, enemies with threat values, and
friendly units. The danger of an enemy trades its threat against its
distance to headquarters; the optimal engagement pairs the most dangerous
enemy with its nearest friendly unit, found by exhaustive search. Trials
are either "signal" (an engagement is warranted: peak danger reaches the
task threshold) or "noise" (it is not), which is what gives detection
metrics both trial classes to work with.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Any, Mapping, Optional

__all__ = [
    "TaskParams",
    "Enemy",
    "Friendly",
    "Scenario",
    "PairRank",
    "Solution",
    "generate_scenario",
    "adjust_threats_for_kind",
    "danger_score",
    "scenario_is_signal",
    "ranked_pairs",
    "solve_optimal",
]


@dataclass(frozen=True)
class TaskParams:
    grid_size: int = 20
    n_enemies: int = 5
    n_friendlies: int = 4
    threat_low: float = 1.0
    threat_high: float = 10.0
    w_threat: float = 1.0
    w_distance: float = 0.1
    danger_threshold: float = 4.0
    danger_margin: float = 1.0
    p_signal: float = 0.5
    response_latency_ms: int = 50
    inter_trial_gap_ms: int = 250
    probe_enabled: bool = True
    probe_gap_ms: int = 100

    def __post_init__(self) -> None:
        if self.grid_size < 2:
            raise ValueError("grid_size must be at least 2")
        if self.n_enemies < 1 or self.n_friendlies < 1:
            raise ValueError("need at least one enemy and one friendly")
        if self.n_enemies + self.n_friendlies + 1 > self.grid_size**2:
            raise ValueError("grid too small for the requested unit counts")
        if not 0 < self.threat_low <= self.threat_high:
            raise ValueError("threat range must be positive and ordered")
        if self.w_threat <= 0 or self.w_distance < 0:
            raise ValueError("danger weights must be positive (threat) and nonnegative (distance)")
        if not 0.0 <= self.p_signal <= 1.0:
            raise ValueError("p_signal must be in [0, 1]")
        if self.danger_margin <= 0:
            raise ValueError("danger_margin must be positive")

    def to_payload(self) -> dict[str, Any]:
        return {
            "grid_size": self.grid_size,
            "n_enemies": self.n_enemies,
            "n_friendlies": self.n_friendlies,
            "threat_low": self.threat_low,
            "threat_high": self.threat_high,
            "w_threat": self.w_threat,
            "w_distance": self.w_distance,
            "danger_threshold": self.danger_threshold,
            "danger_margin": self.danger_margin,
            "p_signal": self.p_signal,
            "response_latency_ms": self.response_latency_ms,
            "inter_trial_gap_ms": self.inter_trial_gap_ms,
            "probe_enabled": self.probe_enabled,
            "probe_gap_ms": self.probe_gap_ms,
        }

    @classmethod
    def from_payload(cls, payload: Mapping[str, Any]) -> "TaskParams":
        known = {f for f in cls.__dataclass_fields__}  # type: ignore[attr-defined]
        return cls(**{k: v for k, v in payload.items() if k in known})


@dataclass(frozen=True)
class Enemy:
    id: str
    x: int
    y: int
    threat: float

    def __post_init__(self) -> None:
        if not self.threat > 0:
            raise ValueError(f"threat must be positive, got {self.threat!r}")


@dataclass(frozen=True)
class Friendly:
    id: str
    x: int
    y: int


@dataclass(frozen=True)
class Scenario:
    grid_size: int
    hq: tuple[int, int]
    enemies: tuple[Enemy, ...]
    friendlies: tuple[Friendly, ...]
    seed: int

    def __post_init__(self) -> None:
        if not self.enemies or not self.friendlies:
            raise ValueError("scenario needs at least one enemy and one friendly")
        for unit in (*self.enemies, *self.friendlies):
            if not (0 <= unit.x < self.grid_size and 0 <= unit.y < self.grid_size):
                raise ValueError(f"unit {unit.id!r} outside the grid")
        if not (0 <= self.hq[0] < self.grid_size and 0 <= self.hq[1] < self.grid_size):
            raise ValueError("hq outside the grid")

    def to_payload(self) -> dict[str, Any]:
        return {
            "grid_size": self.grid_size,
            "hq": list(self.hq),
            "enemies": [
                {"id": e.id, "x": e.x, "y": e.y, "threat": e.threat}
                for e in self.enemies
            ],
            "friendlies": [
                {"id": f.id, "x": f.x, "y": f.y} for f in self.friendlies
            ],
            "seed": self.seed,
        }

    @classmethod
    def from_payload(cls, payload: Mapping[str, Any]) -> "Scenario":
        return cls(
            grid_size=payload["grid_size"],
            hq=tuple(payload["hq"]),
            enemies=tuple(
                Enemy(e["id"], e["x"], e["y"], e["threat"])
                for e in payload["enemies"]
            ),
            friendlies=tuple(
                Friendly(f["id"], f["x"], f["y"]) for f in payload["friendlies"]
            ),
            seed=payload.get("seed", 0),
        )


def _distance(ax: int, ay: int, bx: int, by: int) -> float:
    return math.hypot(ax - bx, ay - by)


def danger_score(scenario: Scenario, params: TaskParams, enemy: Enemy) -> float:
    """w_threat * threat - w_distance * distance(enemy, hq)."""
    return params.w_threat * enemy.threat - params.w_distance * _distance(
        enemy.x, enemy.y, *scenario.hq
    )


def generate_scenario(params: TaskParams, seed: int) -> Scenario:
    """Deterministically place hq, enemies and friendlies on distinct cells."""
    rng = random.Random(seed)
    n_cells = params.grid_size**2
    picks = rng.sample(range(n_cells), params.n_enemies + params.n_friendlies + 1)
    coords = [(p % params.grid_size, p // params.grid_size) for p in picks]
    hq = coords[0]
    enemies = tuple(
        Enemy(
            id=f"E{i + 1}",
            x=coords[1 + i][0],
            y=coords[1 + i][1],
            threat=rng.uniform(params.threat_low, params.threat_high),
        )
        for i in range(params.n_enemies)
    )
    friendlies = tuple(
        Friendly(
            id=f"F{i + 1}",
            x=coords[1 + params.n_enemies + i][0],
            y=coords[1 + params.n_enemies + i][1],
        )
        for i in range(params.n_friendlies)
    )
    return Scenario(
        grid_size=params.grid_size,
        hq=hq,
        enemies=enemies,
        friendlies=friendlies,
        seed=seed,
    )


def adjust_threats_for_kind(
    scenario: Scenario, params: TaskParams, signal: bool
) -> Scenario:
    """Force the scenario's peak danger to the requested side of the
    threshold, keeping a margin so the label is unambiguous."""
    target_low = params.danger_threshold - params.danger_margin
    target_high = params.danger_threshold + params.danger_margin
    dangers = [danger_score(scenario, params, e) for e in scenario.enemies]
    peak = max(dangers)
    enemies = list(scenario.enemies)
    if signal:
        if peak < target_high:
            i = dangers.index(peak)
            e = enemies[i]
            dist = _distance(e.x, e.y, *scenario.hq)
            new_threat = (target_high + params.w_distance * dist) / params.w_threat
            enemies[i] = replace(e, threat=new_threat)
    else:
        for i, e in enumerate(enemies):
            if dangers[i] > target_low:
                dist = _distance(e.x, e.y, *scenario.hq)
                new_threat = (target_low + params.w_distance * dist) / params.w_threat
                enemies[i] = replace(e, threat=max(new_threat, 1e-3))
    return replace(scenario, enemies=tuple(enemies))


def scenario_is_signal(scenario: Scenario, params: TaskParams) -> bool:
    """Whether an engagement is warranted: peak danger reaches the threshold."""
    return (
        max(danger_score(scenario, params, e) for e in scenario.enemies)
        >= params.danger_threshold
    )


@dataclass(frozen=True)
class PairRank:
    enemy_id: str
    friendly_id: str
    danger: float
    distance: float  # enemy-to-friendly

    @property
    def option(self) -> str:
        return f"{self.enemy_id}:{self.friendly_id}"


def ranked_pairs(scenario: Scenario, params: TaskParams) -> list[PairRank]:
    """All engagement pairs, best first.

    Ordering is by enemy danger (descending), then enemy-friendly distance
    (ascending); ties fall back to list position, so the scenario's unit
    order is the tie order.
    """
    e_index = {e.id: i for i, e in enumerate(scenario.enemies)}
    f_index = {f.id: i for i, f in enumerate(scenario.friendlies)}
    pairs = []
    for e in scenario.enemies:
        d = danger_score(scenario, params, e)
        for f in scenario.friendlies:
            pairs.append(
                PairRank(
                    enemy_id=e.id,
                    friendly_id=f.id,
                    danger=d,
                    distance=_distance(e.x, e.y, f.x, f.y),
                )
            )
    pairs.sort(
        key=lambda p: (-p.danger, p.distance, e_index[p.enemy_id], f_index[p.friendly_id])
    )
    return pairs


@dataclass(frozen=True)
class Solution:
    enemy_id: str
    friendly_id: str
    danger: dict[str, float]

    @property
    def option(self) -> str:
        return f"{self.enemy_id}:{self.friendly_id}"


def solve_optimal(scenario: Scenario, params: TaskParams) -> Solution:
    """Exhaustive ground-truth solve: the most dangerous enemy paired with
    its nearest friendly unit, ties broken by list order.
    """
    dangers = {e.id: danger_score(scenario, params, e) for e in scenario.enemies}
    best_enemy = scenario.enemies[0]
    for e in scenario.enemies[1:]:
        if dangers[e.id] > dangers[best_enemy.id]:
            best_enemy = e
    best_friendly = scenario.friendlies[0]
    best_dist = _distance(best_enemy.x, best_enemy.y, best_friendly.x, best_friendly.y)
    for f in scenario.friendlies[1:]:
        d = _distance(best_enemy.x, best_enemy.y, f.x, f.y)
        if d < best_dist:
            best_friendly = f
            best_dist = d
    return Solution(
        enemy_id=best_enemy.id, friendly_id=best_friendly.id, danger=dangers
    )
