"""Benchmark configuration: schema, defaults, validation, fingerprinting.

Configs are YAML or JSON files. The fingerprint is the SHA-256 of the
canonicalized config (defaults applied, keys sorted, execution-only fields
like the output directory and worker count excluded), so it changes
exactly when a semantically meaningful field changes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

import yaml

from ..events import BackEndInteraction, FrontEndComponent, SystemInventory
from ..sim.advisor import AutomationLevel, ReliabilitySchedule
from ..sim.agents import AgentSpec
from ..sim.scenario import TaskParams
from ..system import WeightedItem

__all__ = [
    "ConfigError",
    "ScheduleSpec",
    "MetricSettings",
    "ServeSettings",
    "BenchmarkConfig",
    "load_config",
    "default_config_dict",
    "ALL_METRIC_GROUPS",
]


class ConfigError(ValueError):
    pass


ALL_METRIC_GROUPS = (
    "accuracy",
    "response_time",
    "sdt",
    "ndm",
    "coherence",
    "cct",
    "lens",
    "classification",
    "probe",
    "questionnaire",
    "ol",
    "csi",
    "ccs",
    "alignment",
    "inventory",
    "weighted_failure",
    "composite",
)


@dataclass(frozen=True)
class ScheduleSpec:
    label: str
    schedule: ReliabilitySchedule

    def to_payload(self) -> dict[str, Any]:
        return {"label": self.label, **self.schedule.to_payload()}


@dataclass(frozen=True)
class MetricSettings:
    select: tuple[str, ...] = ALL_METRIC_GROUPS
    sdt_correction: str = "loglinear"
    efficiency_time_limit_s: float = 5.0
    csi_alpha: float = 1.0
    csi_beta: float = 1.0
    csi_baseline_s: float = 2.0
    ccs_gamma: float = 1.0
    ccs_delta: float = 1.0
    ccs_baseline_s: float = 1.0

    def __post_init__(self) -> None:
        if not self.select:
            raise ConfigError("at least one metric group must be selected")
        unknown = set(self.select) - set(ALL_METRIC_GROUPS)
        if unknown:
            raise ConfigError(f"unknown metric groups: {sorted(unknown)}")
        if self.efficiency_time_limit_s <= 0:
            raise ConfigError("efficiency_time_limit_s must be positive")
        if self.csi_baseline_s <= 0 or self.ccs_baseline_s <= 0:
            raise ConfigError("baseline times must be positive")


@dataclass(frozen=True)
class CompositeSettings:
    alpha1: float = 1.0
    beta1: float = 1.0
    delta1: float = 1.0
    alpha2: float = 1.0
    l_threshold: float = 0.5
    h_error: float = 0.1
    c_load: float = 0.3
    f_base: float = 5.0
    bfid: int = 1
    failure_counts: Mapping[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class ServeSettings:
    level: AutomationLevel = AutomationLevel.HIGH_DECISION
    schedule: ReliabilitySchedule = ReliabilitySchedule(rate=0.8)
    n_trials: int = 10
    timestamp_tolerance_ms: int = 2000

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise ConfigError("serve.n_trials must be at least 1")
        if self.timestamp_tolerance_ms < 0:
            raise ConfigError("serve.timestamp_tolerance_ms must be nonnegative")


@dataclass(frozen=True)
class BenchmarkConfig:
    master_seed: int
    task: TaskParams = TaskParams()
    n_trials: int = 20
    sessions_per_cell: int = 10
    levels: tuple[Optional[AutomationLevel], ...] = tuple(AutomationLevel)
    schedules: tuple[ScheduleSpec, ...] = (
        ScheduleSpec("r60", ReliabilitySchedule(rate=0.6)),
        ScheduleSpec("r80", ReliabilitySchedule(rate=0.8)),
    )
    agents: tuple[AgentSpec, ...] = (
        AgentSpec(name="manual", kind="manual", noise=0.05),
        AgentSpec(name="compliant", kind="compliant"),
    )
    metrics: MetricSettings = MetricSettings()
    inventory: Optional[SystemInventory] = None
    failure_census: Mapping[str, tuple[WeightedItem, ...]] = field(default_factory=dict)
    composite: CompositeSettings = CompositeSettings()
    causal: Optional[Mapping[str, Any]] = None
    workers: int = 4
    output_dir: str = "haibench-out"
    serve: ServeSettings = ServeSettings()

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise ConfigError("n_trials must be at least 1")
        if self.sessions_per_cell < 1:
            raise ConfigError("sessions_per_cell must be at least 1")
        if not self.levels:
            raise ConfigError("at least one automation level (or null) is required")
        if not self.schedules:
            raise ConfigError("at least one reliability schedule is required")
        if len({s.label for s in self.schedules}) != len(self.schedules):
            raise ConfigError("schedule labels must be unique")
        if not self.agents:
            raise ConfigError("at least one agent is required")
        if len({a.name for a in self.agents}) != len(self.agents):
            raise ConfigError("agent names must be unique")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    # -- canonical form and fingerprint --------------------------------------

    def canonical_dict(self) -> dict[str, Any]:
        """Semantically meaningful fields only, with defaults applied."""
        return {
            "master_seed": self.master_seed,
            "task": self.task.to_payload(),
            "n_trials": self.n_trials,
            "sessions_per_cell": self.sessions_per_cell,
            "levels": [lv.value if lv else None for lv in self.levels],
            "schedules": [s.to_payload() for s in self.schedules],
            "agents": [a.to_payload() for a in self.agents],
            "metrics": {
                "select": sorted(self.metrics.select),
                "sdt_correction": self.metrics.sdt_correction,
                "efficiency_time_limit_s": self.metrics.efficiency_time_limit_s,
                "csi_alpha": self.metrics.csi_alpha,
                "csi_beta": self.metrics.csi_beta,
                "csi_baseline_s": self.metrics.csi_baseline_s,
                "ccs_gamma": self.metrics.ccs_gamma,
                "ccs_delta": self.metrics.ccs_delta,
                "ccs_baseline_s": self.metrics.ccs_baseline_s,
            },
            "inventory": _inventory_payload(self.inventory),
            "failure_census": {
                flavor: [{"weight": i.weight, "failed": i.failed} for i in items]
                for flavor, items in sorted(self.failure_census.items())
            },
            "composite": {
                "alpha1": self.composite.alpha1,
                "beta1": self.composite.beta1,
                "delta1": self.composite.delta1,
                "alpha2": self.composite.alpha2,
                "l_threshold": self.composite.l_threshold,
                "h_error": self.composite.h_error,
                "c_load": self.composite.c_load,
                "f_base": self.composite.f_base,
                "bfid": self.composite.bfid,
                "failure_counts": dict(sorted(self.composite.failure_counts.items())),
            },
            "causal": self.causal,
            "serve": {
                "level": self.serve.level.value,
                "schedule": self.serve.schedule.to_payload(),
                "n_trials": self.serve.n_trials,
                "timestamp_tolerance_ms": self.serve.timestamp_tolerance_ms,
            },
        }

    def fingerprint(self) -> str:
        canon = json.dumps(self.canonical_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _inventory_payload(inv: Optional[SystemInventory]) -> Optional[dict[str, Any]]:
    if inv is None:
        return None
    return {
        "front_end": [
            {"id": c.id, "chunk_group": c.chunk_group} for c in inv.front_end
        ],
        "back_end": [
            {
                "id": b.id,
                "provides_feedback": b.provides_feedback,
                "duplicate_of": b.duplicate_of,
                "critical": b.critical,
                "overlooked": b.overlooked,
            }
            for b in inv.back_end
        ],
    }


def _parse_inventory(obj: Optional[Mapping[str, Any]]) -> Optional[SystemInventory]:
    if obj is None:
        return None
    try:
        return SystemInventory(
            front_end=tuple(
                FrontEndComponent(id=c["id"], chunk_group=c.get("chunk_group"))
                for c in obj.get("front_end", [])
            ),
            back_end=tuple(
                BackEndInteraction(
                    id=b["id"],
                    provides_feedback=bool(b.get("provides_feedback", False)),
                    duplicate_of=b.get("duplicate_of"),
                    critical=bool(b.get("critical", False)),
                    overlooked=bool(b.get("overlooked", False)),
                )
                for b in obj.get("back_end", [])
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid inventory: {exc}") from exc


def _parse_level(value: Any) -> Optional[AutomationLevel]:
    if value is None or value == "manual" or value == "none":
        return None
    try:
        return AutomationLevel(value)
    except ValueError as exc:
        raise ConfigError(f"unknown automation level {value!r}") from exc


def _parse_schedule(obj: Mapping[str, Any]) -> ScheduleSpec:
    try:
        sched = ReliabilitySchedule(
            rate=float(obj.get("rate", 1.0)),
            first_failure_trial=obj.get("first_failure_trial"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid schedule {obj!r}: {exc}") from exc
    label = obj.get("label") or f"r{round(sched.rate * 100)}"
    return ScheduleSpec(label=str(label), schedule=sched)


def from_dict(obj: Mapping[str, Any]) -> BenchmarkConfig:
    if "master_seed" not in obj:
        raise ConfigError("master_seed is required (reproducibility is mandatory)")
    try:
        task = TaskParams.from_payload(obj.get("task", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid task params: {exc}") from exc
    metrics_obj = dict(obj.get("metrics", {}))
    select = metrics_obj.pop("select", None)
    try:
        metrics = MetricSettings(
            select=tuple(select) if select is not None else ALL_METRIC_GROUPS,
            **{
                k: v
                for k, v in metrics_obj.items()
                if k in MetricSettings.__dataclass_fields__  # type: ignore[attr-defined]
            },
        )
    except TypeError as exc:
        raise ConfigError(f"invalid metric settings: {exc}") from exc
    comp_obj = dict(obj.get("composite", {}))
    composite = CompositeSettings(
        **{
            k: v
            for k, v in comp_obj.items()
            if k in CompositeSettings.__dataclass_fields__  # type: ignore[attr-defined]
        }
    )
    census: dict[str, tuple[WeightedItem, ...]] = {}
    for flavor, items in (obj.get("failure_census") or {}).items():
        census[flavor] = tuple(
            WeightedItem(weight=float(i["weight"]), failed=bool(i["failed"]))
            for i in items
        )
    serve_obj = obj.get("serve", {})
    serve = ServeSettings(
        level=_parse_level(serve_obj.get("level", "high_decision"))
        or AutomationLevel.HIGH_DECISION,
        schedule=_parse_schedule(serve_obj.get("schedule", {"rate": 0.8})).schedule,
        n_trials=int(serve_obj.get("n_trials", 10)),
        timestamp_tolerance_ms=int(serve_obj.get("timestamp_tolerance_ms", 2000)),
    )
    kwargs: dict[str, Any] = {
        "master_seed": int(obj["master_seed"]),
        "task": task,
        "metrics": metrics,
        "inventory": _parse_inventory(obj.get("inventory")),
        "failure_census": census,
        "composite": composite,
        "causal": obj.get("causal"),
        "serve": serve,
    }
    if "n_trials" in obj:
        kwargs["n_trials"] = int(obj["n_trials"])
    if "sessions_per_cell" in obj:
        kwargs["sessions_per_cell"] = int(obj["sessions_per_cell"])
    if "levels" in obj:
        kwargs["levels"] = tuple(_parse_level(v) for v in obj["levels"])
    if "schedules" in obj:
        kwargs["schedules"] = tuple(_parse_schedule(s) for s in obj["schedules"])
    if obj.get("agents"):
        try:
            kwargs["agents"] = tuple(AgentSpec.from_payload(a) for a in obj["agents"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid agent spec: {exc}") from exc
    if "workers" in obj:
        kwargs["workers"] = int(obj["workers"])
    if "output_dir" in obj:
        kwargs["output_dir"] = str(obj["output_dir"])
    return BenchmarkConfig(**kwargs)


def load_config(source: Union[str, Path, Mapping[str, Any]]) -> BenchmarkConfig:
    """Load a config from a YAML/JSON file path, raw text, or a mapping."""
    if isinstance(source, Mapping):
        return from_dict(source)
    path = Path(source)
    if path.exists():
        text = path.read_text(encoding="utf-8")
    else:
        text = str(source)
    try:
        obj = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    if not isinstance(obj, Mapping):
        raise ConfigError("config must be a mapping")
    return from_dict(obj)


def default_config_dict(master_seed: int = 20250101) -> dict[str, Any]:
    """The full default suite: 4 levels x 2 schedules x 2 agents x 10 sessions,
    with a reference inventory of the task's own interface."""
    return {
        "master_seed": master_seed,
        "task": TaskParams().to_payload(),
        "n_trials": 20,
        "sessions_per_cell": 10,
        "levels": [lv.value for lv in AutomationLevel],
        "schedules": [
            {"label": "r60", "rate": 0.6},
            {"label": "r80", "rate": 0.8},
        ],
        "agents": [
            {"name": "manual", "kind": "manual", "noise": 0.05},
            {"name": "compliant", "kind": "compliant"},
        ],
        "metrics": {"select": list(ALL_METRIC_GROUPS)},
        "inventory": {
            "front_end": [
                {"id": "map", "chunk_group": "situation"},
                {"id": "threat_labels", "chunk_group": "situation"},
                {"id": "advice_panel", "chunk_group": "advice"},
                {"id": "engage_controls", "chunk_group": "actions"},
                {"id": "decline_control", "chunk_group": "actions"},
                {"id": "probe_panel", "chunk_group": None},
                {"id": "feedback_banner", "chunk_group": "advice"},
            ],
            "back_end": [
                {"id": "scenario_generator", "provides_feedback": False},
                {"id": "advisor", "provides_feedback": True},
                {"id": "reliability_scheduler", "provides_feedback": False},
                {"id": "scorer", "provides_feedback": True},
                {"id": "event_logger", "provides_feedback": False},
                {"id": "latency_stamper", "provides_feedback": False,
                 "duplicate_of": "event_logger"},
                {"id": "threat_model", "provides_feedback": False,
                 "critical": True, "overlooked": True},
            ],
        },
        "failure_census": {
            "weaf": [
                {"weight": 3.0, "failed": False},
                {"weight": 2.0, "failed": False},
                {"weight": 1.0, "failed": True},
            ],
            "wsaf": [
                {"weight": 2.0, "failed": False},
                {"weight": 1.0, "failed": False},
            ],
            "whaib": [
                {"weight": 2.0, "failed": True},
                {"weight": 2.0, "failed": False},
                {"weight": 1.0, "failed": False},
            ],
        },
        "composite": {
            "alpha1": 1.0,
            "beta1": 1.0,
            "delta1": 1.0,
            "alpha2": 1.0,
            "l_threshold": 0.5,
            "h_error": 0.1,
            "c_load": 0.3,
            "f_base": 5.0,
            "bfid": 1,
            "failure_counts": {"software": 1},
        },
        "causal": {
            "model": {
                "nodes": [
                    {"name": "expertise", "states": [0, 1]},
                    {"name": "advice_level", "states": [0, 1]},
                    {"name": "accuracy", "states": [0, 1]},
                ],
                "edges": [
                    ["expertise", "advice_level"],
                    ["expertise", "accuracy"],
                    ["advice_level", "accuracy"],
                ],
                "cpts": {
                    "expertise": [{"given": {}, "p": [0.5, 0.5]}],
                    "advice_level": [
                        {"given": {"expertise": 0}, "p": [0.7, 0.3]},
                        {"given": {"expertise": 1}, "p": [0.4, 0.6]},
                    ],
                    "accuracy": [
                        {"given": {"advice_level": 0, "expertise": 0}, "p": [0.6, 0.4]},
                        {"given": {"advice_level": 0, "expertise": 1}, "p": [0.3, 0.7]},
                        {"given": {"advice_level": 1, "expertise": 0}, "p": [0.4, 0.6]},
                        {"given": {"advice_level": 1, "expertise": 1}, "p": [0.1, 0.9]},
                    ],
                },
            },
            "queries": [
                {"kind": "backdoor_admissible", "x": "advice_level", "y": "accuracy",
                 "z": ["expertise"]},
                {"kind": "ate", "x": "advice_level", "y": "accuracy",
                 "z": ["expertise"]},
            ],
        },
        "workers": 4,
        "output_dir": "haibench-out",
        "serve": {
            "level": "high_decision",
            "schedule": {"rate": 0.8},
            "n_trials": 10,
            "timestamp_tolerance_ms": 2000,
        },
    }
