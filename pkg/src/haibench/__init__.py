"""haibench: benchmark harness for human-automation interaction systems.

Computes judgment/prediction metrics and interface metrics from
operator-system event logs, generates those logs with a seeded
command-and-control task simulator at configurable automation levels and
reliabilities, and quantifies design interventions with exact causal
effect estimation on discrete models.
"""

__version__ = "0.1.0"

from .events import (
    Event,
    EventKind,
    HeuristicOutcome,
    JudgmentRecord,
    LikertItem,
    LogError,
    Session,
    SystemInventory,
    TrialKey,
    derive_judgments,
    ingest_log,
    serialize_session,
)
from .judgment import (
    classification_metrics,
    cct_evaluate,
    coherence_evaluate,
    heuristic_alignment,
    lens_evaluate,
    ndm_evaluate,
    policy_capture_fit,
    policy_capture_predict,
    sdt_evaluate,
)
from .probit import normal_cdf, probit
from .system import (
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

__all__ = [
    "__version__",
    "Event",
    "EventKind",
    "Session",
    "LikertItem",
    "LogError",
    "SystemInventory",
    "JudgmentRecord",
    "HeuristicOutcome",
    "TrialKey",
    "ingest_log",
    "serialize_session",
    "derive_judgments",
    "probit",
    "normal_cdf",
    "sdt_evaluate",
    "ndm_evaluate",
    "coherence_evaluate",
    "cct_evaluate",
    "lens_evaluate",
    "heuristic_alignment",
    "classification_metrics",
    "policy_capture_fit",
    "policy_capture_predict",
    "weighted_failure_score",
    "interaction_balance",
    "attention_metrics",
    "cognitive_strain",
    "component_clarity",
    "operational_latency",
    "critical_risk",
    "human_performance",
    "system_performance",
]
