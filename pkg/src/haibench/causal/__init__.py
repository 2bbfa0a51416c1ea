"""Causal DAGs, d-separation, back-door adjustment, effects and mediation."""

from .dag import (
    CycleError,
    Dag,
    backdoor_admissible,
    d_separated,
    rule1_applicable,
    validate_dag,
)
from .discrete import (
    DiscreteModel,
    InterventionQuery,
    MediationResult,
    PositivityError,
    Variable,
    ate,
    backdoor_adjust,
    fit_cpts,
    mediation_effects,
)
from .textio import load_dag, load_model, run_queries, run_query

__all__ = [
    "CycleError",
    "Dag",
    "validate_dag",
    "d_separated",
    "backdoor_admissible",
    "rule1_applicable",
    "Variable",
    "DiscreteModel",
    "InterventionQuery",
    "MediationResult",
    "PositivityError",
    "backdoor_adjust",
    "ate",
    "mediation_effects",
    "fit_cpts",
    "load_dag",
    "load_model",
    "run_query",
    "run_queries",
]
